#pragma once

#include <vector>

#include "ifnet/rng.hpp"
#include "ifnet/torus.hpp"
#include "ifnet/types.hpp"

namespace ifnet {

// Discharge drift lambda(v) = -lambda_hat * v on [0,1], 1 on (1,2).
// Zero and Smoothed variants back oracle tests (heat kernel, strong-order
// fits); Smoothed is a C1 blend across the jumps with fixed half-width.
enum class LambdaVariant { Standard, Zero, Smoothed };

struct ThetaKernel {
    enum class Kind { Constant, Gaussian, Block };

    Kind kind = Kind::Constant;
    double theta0 = 0.0;
    double length = 1.0;                      // gaussian length scale
    std::vector<std::vector<double>> block;   // block[tag_i][tag_j], receiver first

    double eval(const Position& x, const Position& y) const;
    double sup_norm() const;

    static ThetaKernel constant(double theta0);
    static ThetaKernel gaussian(double theta0, double length);
    static ThetaKernel block_matrix(std::vector<std::vector<double>> b);
};

// sigma_eps(v) = sqrt(2 eps) + a * s(v) with the C1 bump
// s(v) = 16 v^2 (1-v)^2 on [0,1], 0 on [1,2].
struct SigmaProfile {
    double epsilon = 0.02;
    double bump_amplitude = 0.0;

    double eval(TorusPoint v) const;
    double floor() const { return std::sqrt(2.0 * epsilon); }
    double max() const { return floor() + bump_amplitude; }
};

struct PositionLaw {
    enum class Kind { UniformBox, ClippedGaussian, TwoCluster, Atoms };

    Kind kind = Kind::UniformBox;
    std::array<double, 3> lo{0, 0, 0}, hi{1, 1, 1};       // uniform box
    std::array<double, 3> center{0.5, 0.5, 0.5};          // gaussian
    double stddev = 0.2;
    std::array<double, 3> center2{0.5, 0.5, 0.5};         // second cluster
    double cluster_radius = 0.1;
    double mix_weight = 0.5;                              // P(first cluster)
    std::vector<Position> atoms;                          // explicit list
    std::vector<double> atom_weights;

    Position sample(StreamRng& rng, const DomainBox& domain) const;
    void validate(const DomainBox& domain) const;
};

struct VoltageDensity {
    enum class Kind { Uniform, GaussBump, PiecewiseConst };

    Kind kind = Kind::Uniform;
    double center = 0.5;                 // gaussian bump on (0,2)
    double stddev = 0.2;
    std::vector<double> breaks;          // piecewise-constant: 0=b0<...<bn=2
    std::vector<double> values;          // nonnegative, renormalized on load

    double eval(double v) const;
    // exact integral over [lo,hi] subset of [0,2]
    double integral(double lo, double hi) const;
    double sample(StreamRng& rng) const;
    void validate() const;
};

struct InitialLaws {
    PositionLaw nu;
    VoltageDensity rho0;
};

struct ModelCoefficients {
    double lambda_hat = 1.0;
    double epsilon = 0.02;
    double delta = 0.3;
    double horizon = 1.0;
    LambdaVariant lambda_variant = LambdaVariant::Standard;
    ThetaKernel theta;
    SigmaProfile sigma;

    void validate() const;

    // sup bound on |b|; the spike-detection guard and CFL conditions use it
    double drift_bound() const { return std::max(lambda_hat, 1.0) + theta.sup_norm(); }
};

double lambda2(TorusPoint v, const ModelCoefficients& c);
double sigma2(TorusPoint v, const ModelCoefficients& c);
double g2(const Position& x, TorusPoint v, const Position& y, TorusPoint w,
          const ModelCoefficients& c);

// Mass of [1, 1+delta] in each conditional row (midpoint rule, exact
// partial cells at both endpoints).
std::vector<double> firing_masses(const ConditionalGridDensity& state, double delta);

// Mean-field drift b(zeta)(x,v) = lambda2(v) + int g2(x,v,y,w) zeta(dy,dw).
// Throws contract_error if zeta is not normalized within 1e-8.
double drift_b(const WeightedAtomMeasure& zeta, const Position& x, TorusPoint v,
               const ModelCoefficients& c);
double drift_b(const ConditionalGridDensity& zeta, const Position& x, TorusPoint v,
               const ModelCoefficients& c);

}  // namespace ifnet
