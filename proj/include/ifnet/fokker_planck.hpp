#pragma once

#include <span>
#include <vector>

#include "ifnet/measures.hpp"
#include "ifnet/model.hpp"

namespace ifnet {

// Product initial condition nu x rho0: M i.i.d. position atoms (or the
// explicit list), every row set to exact cell averages of rho0.
ConditionalGridDensity discretize_initial(const InitialLaws& laws, const DomainBox& domain,
                                          std::size_t m_atoms, std::size_t k_cells,
                                          std::uint64_t seed);

// Largest stable step for the explicit scheme: 0.4 min(h^2/max sigma^2,
// h/max|b|); the 0.4 safety keeps the update monotone (positivity).
double fp_max_dt(const ConditionalGridDensity& state, const ModelCoefficients& c);

// One conservative finite-volume row update with frozen interaction drift:
// upwind advection, centered FP-form diffusion d^2(D rho), periodic.
void fp_row_step(const double* rho_in, double* rho_out, std::size_t k_cells, double dt,
                 double interaction, const ModelCoefficients& c);

// One explicit step of the coupled system (all rows; firing masses
// recomputed once). Throws contract_error on CFL violation.
void fp_step(ConditionalGridDensity& state, double dt, const ModelCoefficients& c,
             bool parallel = true);
void fp_step_reference(ConditionalGridDensity& state, double dt, const ModelCoefficients& c);

// Snapshots of the nonlinear equation at the requested times. dt is chosen
// from the CFL bound and subdivides every output interval exactly.
std::vector<ConditionalGridDensity> fp_solve(const ConditionalGridDensity& initial, double t_final,
                                             const ModelCoefficients& c,
                                             std::span<const double> output_times,
                                             bool parallel = true);

// v-marginal of the measure as grid cell values.
std::vector<double> v_marginal(const ConditionalGridDensity& state);

// <mu, phi> with the midpoint pairing.
double pair_measure(const ConditionalGridDensity& state, const TestFunction& phi);
double pair_measure(const WeightedAtomMeasure& meas, const TestFunction& phi);

enum class SemigroupScheme { CrankNicolson, BackwardEuler };

// Diffusion semigroup T_t of A = (sigma^2/2) d^2/dv^2 on the K-cell grid;
// the discrete generator is the exact adjoint of the solver's diffusion
// term, and T_t 1 = 1 holds to solver precision.
class Semigroup {
  public:
    Semigroup(std::size_t k_cells, const ModelCoefficients& c);

    // T_t phi sampled at cell centers.
    std::vector<double> apply(std::span<const double> phi, double t,
                              SemigroupScheme scheme = SemigroupScheme::CrankNicolson,
                              double dt_max = 1e-3) const;

    // in-place stepping for incremental caching
    void step(std::vector<double>& u, double dt, SemigroupScheme scheme) const;

    std::size_t k_cells() const { return k_; }

  private:
    std::size_t k_;
    std::vector<double> diffusion_;  // sigma^2/2 at cell centers
};

// central difference with periodic wrap
std::vector<double> grid_derivative(std::span<const double> u);

// |<mu_t,phi> - <mu_0,T_t phi> - int_0^t <mu_s, b(mu_s) d_v T_{t-s} phi> ds|
// evaluated on a stored solution path (trapezoid in s). `path` must hold
// near-uniform snapshots from time 0 through t.
double mild_residual(std::span<const ConditionalGridDensity> path, const TestFunction& phi,
                     double t, const ModelCoefficients& c);

// Capped weak-solution residual sup_t |<mu_t,phi> - <mu_0,phi>
// - int <mu_s, b d_v phi> - int <mu_s,(sigma^2/2) d^2_v phi>| ^ 1.
double weak_residual_phi(std::span<const ConditionalGridDensity> path, const TestFunction& phi,
                         const ModelCoefficients& c);
double weak_residual_phi(std::span<const WeightedAtomMeasure> path, std::span<const double> times,
                         const TestFunction& phi, const ModelCoefficients& c);

}  // namespace ifnet
