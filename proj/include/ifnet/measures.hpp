#pragma once

#include <complex>
#include <span>
#include <vector>

#include "ifnet/particle.hpp"
#include "ifnet/torus.hpp"
#include "ifnet/types.hpp"

namespace ifnet {

// Mollified empirical density on a uniform K-cell grid over [0,2).
struct EmpiricalDensity {
    std::vector<double> values;  // cell values, midpoint semantics
    double alpha = 1.0;

    std::size_t k_cells() const { return values.size(); }
    double h() const { return 2.0 / static_cast<double>(values.size()); }
    double mass() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s * h();
    }
};

WeightedAtomMeasure empirical_measure(const ParticleSystemState& state);

// u(v_k) = sum_i w_i gamma_alpha(v_k - v_i), realized through exact cell
// averages of the kernel so the midpoint mass is 1 to table resolution at
// any admissible grid (grid_K >= 4/alpha).
EmpiricalDensity mollified_density(const WeightedAtomMeasure& meas, std::size_t grid_k,
                                   double alpha);

struct EnergyPair {
    double l2_sq;
    double h1_seminorm_sq;
};

// Midpoint quadrature of int u^2 and int |du/dv|^2 (central differences,
// periodic wrap).
EnergyPair l2_energy(const EmpiricalDensity& dens);

// Spectral H^{-2} norm on the period-2 torus with Parseval-consistent
// weights: ||f||^2 = 2 sum_k |f_k|^2 / (1 + (pi k)^2)^2.
double h_minus2_norm_sq(std::span<const double> grid_values);

// Fourier coefficients f_k = (h/2) sum_j f_j exp(-i pi k v_j), k = 0..K/2.
std::vector<std::complex<double>> torus_fourier(std::span<const double> grid_values);
double h_minus2_norm_sq_from_fourier(std::span<const std::complex<double>> coeff);

// Test functions phi(x,v) = a(x) * e(v) with analytic v-derivatives;
// members of the class T (bounded with two bounded v-derivatives).
struct TestFunction {
    enum class VKind { CosMode, SinMode, Bump };

    VKind vkind = VKind::CosMode;
    int mode = 1;                       // Fourier index k
    bool constant_in_v = false;         // degenerate phi(x,v) = a(x)
    double (*spatial)(const Position&) = nullptr;  // null: a == 1

    double a(const Position& x) const { return spatial ? spatial(x) : 1.0; }
    double ev(double v) const;
    double dev(double v) const;
    double ddev(double v) const;

    double eval(const Position& x, double v) const { return a(x) * ev(v); }
    double dv(const Position& x, double v) const { return a(x) * dev(v); }
    double dvv(const Position& x, double v) const { return a(x) * ddev(v); }

    static TestFunction cos_mode(int k);
    static TestFunction sin_mode(int k);
    static TestFunction bump();
};

struct MartingalePath {
    std::vector<double> times;
    std::vector<double> value;
    double sup_abs = 0.0;
};

// Discrete stochastic integral M^{N,phi} recomputed from the seed along a
// fresh simulation of cfg; sampled at every step.
MartingalePath martingale_functional(const SimConfig& cfg, std::uint32_t replica,
                                     const TestFunction& phi, double t_final);

// Kolmogorov-type double-sum functional of a measure path's v-marginals:
// sum_{t != s} W1(mu_t, mu_s)^p / |t-s|^{1+alpha p} dt ds, diagonal band
// |t-s| < grid step excluded. Requires p > 2 and alpha p < p/2 - 1.
double w1_holder_modulus(std::span<const WeightedAtomMeasure> path,
                         std::span<const double> times, double alpha, double p);

}  // namespace ifnet
