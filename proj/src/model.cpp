#include "ifnet/model.hpp"

#include <algorithm>
#include <cmath>

namespace ifnet {

namespace {

// C1 smoothstep blend used by LambdaVariant::Smoothed
double smoothstep(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

constexpr double kSmoothHalfWidth = 0.05;

}  // namespace

ThetaKernel ThetaKernel::constant(double theta0) {
    ThetaKernel k;
    k.kind = Kind::Constant;
    k.theta0 = theta0;
    return k;
}

ThetaKernel ThetaKernel::gaussian(double theta0, double length) {
    ThetaKernel k;
    k.kind = Kind::Gaussian;
    k.theta0 = theta0;
    k.length = length;
    return k;
}

ThetaKernel ThetaKernel::block_matrix(std::vector<std::vector<double>> b) {
    ThetaKernel k;
    k.kind = Kind::Block;
    k.block = std::move(b);
    return k;
}

double ThetaKernel::eval(const Position& x, const Position& y) const {
    switch (kind) {
        case Kind::Constant:
            return theta0;
        case Kind::Gaussian: {
            const double d = euclid_dist(x, y);
            return theta0 * std::exp(-d * d / (2.0 * length * length));
        }
        case Kind::Block: {
            if (x.tag < 0 || y.tag < 0)
                throw config_error("block theta kernel needs positions from an explicit atom list");
            return block[static_cast<std::size_t>(x.tag)][static_cast<std::size_t>(y.tag)];
        }
    }
    return 0.0;
}

double ThetaKernel::sup_norm() const {
    if (kind != Kind::Block) return std::fabs(theta0);
    double s = 0.0;
    for (const auto& row : block)
        for (double v : row) s = std::max(s, std::fabs(v));
    return s;
}

double SigmaProfile::eval(TorusPoint v) const {
    double s = floor();
    if (bump_amplitude != 0.0 && v.v < 1.0) {
        const double u = v.v * (1.0 - v.v);
        s += bump_amplitude * 16.0 * u * u;
    }
    return s;
}

Position PositionLaw::sample(StreamRng& rng, const DomainBox& domain) const {
    switch (kind) {
        case Kind::UniformBox: {
            Position p;
            for (int i = 0; i < 3; ++i) p.r[i] = lo[i] + (hi[i] - lo[i]) * rng.uniform();
            return p;
        }
        case Kind::ClippedGaussian: {
            // rejection into the domain box
            for (int attempt = 0; attempt < 10000; ++attempt) {
                Position p;
                for (int i = 0; i < 3; ++i) p.r[i] = center[i] + stddev * rng.normal();
                if (domain.contains(p)) return p;
            }
            throw config_error("clipped-gaussian position law: rejection failed; check domain");
        }
        case Kind::TwoCluster: {
            const bool first = rng.uniform() < mix_weight;
            const auto& c = first ? center : center2;
            Position p;
            for (int i = 0; i < 3; ++i)
                p.r[i] = c[i] + cluster_radius * (2.0 * rng.uniform() - 1.0);
            return p;
        }
        case Kind::Atoms: {
            // categorical draw over the atom weights
            const double u = rng.uniform();
            double acc = 0.0;
            for (std::size_t i = 0; i < atoms.size(); ++i) {
                acc += atom_weights[i];
                if (u <= acc || i + 1 == atoms.size()) {
                    Position p = atoms[i];
                    p.tag = static_cast<std::int32_t>(i);
                    return p;
                }
            }
            break;
        }
    }
    throw config_error("position law: empty atom list");
}

void PositionLaw::validate(const DomainBox& domain) const {
    auto inside = [&](const std::array<double, 3>& r) {
        Position p;
        p.r = r;
        return domain.contains(p);
    };
    switch (kind) {
        case Kind::UniformBox:
            if (!inside(lo) || !inside(hi))
                throw config_error("position law support not inside D");
            return;
        case Kind::ClippedGaussian:
            if (!inside(center)) throw config_error("position law support not inside D");
            return;
        case Kind::TwoCluster: {
            for (const auto& c : {center, center2}) {
                for (int i = 0; i < 3; ++i) {
                    if (c[i] - cluster_radius < domain.lo[i] || c[i] + cluster_radius > domain.hi[i])
                        throw config_error("position law support not inside D");
                }
            }
            return;
        }
        case Kind::Atoms: {
            if (atoms.empty() || atoms.size() != atom_weights.size())
                throw config_error("explicit atom list malformed");
            double s = 0.0;
            for (double w : atom_weights) {
                if (w < 0.0) throw config_error("atom weights must be nonnegative");
                s += w;
            }
            if (std::fabs(s - 1.0) > 1e-10) throw config_error("atom weights must sum to 1");
            for (const auto& a : atoms)
                if (!domain.contains(a)) throw config_error("position law support not inside D");
            return;
        }
    }
}

double VoltageDensity::eval(double v) const {
    if (v < 0.0 || v >= 2.0) v = mod2(v).v;
    switch (kind) {
        case Kind::Uniform:
            return 0.5;
        case Kind::GaussBump: {
            const double z = 1.0 / (stddev * std::sqrt(2.0));
            const double norm =
                0.5 * (std::erf((2.0 - center) * z) - std::erf((0.0 - center) * z));
            const double g = std::exp(-(v - center) * (v - center) / (2.0 * stddev * stddev)) /
                             (stddev * std::sqrt(2.0 * 3.14159265358979323846));
            return g / norm;
        }
        case Kind::PiecewiseConst: {
            const auto it = std::upper_bound(breaks.begin(), breaks.end(), v);
            const std::size_t i = static_cast<std::size_t>(it - breaks.begin());
            if (i == 0 || i >= breaks.size()) return 0.0;
            return values[i - 1];
        }
    }
    return 0.0;
}

double VoltageDensity::integral(double lo, double hi) const {
    switch (kind) {
        case Kind::Uniform:
            return 0.5 * (hi - lo);
        case Kind::GaussBump: {
            const double z = 1.0 / (stddev * std::sqrt(2.0));
            const double norm =
                0.5 * (std::erf((2.0 - center) * z) - std::erf((0.0 - center) * z));
            return 0.5 * (std::erf((hi - center) * z) - std::erf((lo - center) * z)) / norm;
        }
        case Kind::PiecewiseConst: {
            double s = 0.0;
            for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
                const double a = std::max(lo, breaks[i]);
                const double b = std::min(hi, breaks[i + 1]);
                if (b > a) s += values[i] * (b - a);
            }
            return s;
        }
    }
    return 0.0;
}

double VoltageDensity::sample(StreamRng& rng) const {
    switch (kind) {
        case Kind::Uniform:
            return 2.0 * rng.uniform();
        case Kind::GaussBump: {
            // rejection against a uniform envelope
            const double peak = eval(std::clamp(center, 0.0, 2.0));
            for (int attempt = 0; attempt < 100000; ++attempt) {
                const double v = 2.0 * rng.uniform();
                if (rng.uniform() * peak <= eval(v)) return v;
            }
            throw config_error("voltage density rejection failed");
        }
        case Kind::PiecewiseConst: {
            const double u = rng.uniform();
            double acc = 0.0;
            for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
                const double m = values[i] * (breaks[i + 1] - breaks[i]);
                if (m > 0.0 && u <= acc + m) return breaks[i] + (u - acc) / values[i];
                acc += m;
            }
            return std::nextafter(2.0, 0.0);
        }
    }
    return 0.0;
}

void VoltageDensity::validate() const {
    if (kind == Kind::PiecewiseConst) {
        if (breaks.size() < 2 || values.size() + 1 != breaks.size())
            throw config_error("piecewise-constant density malformed");
        if (breaks.front() != 0.0 || breaks.back() != 2.0 ||
            !std::is_sorted(breaks.begin(), breaks.end()))
            throw config_error("piecewise-constant breaks must span [0,2]");
        for (double v : values)
            if (v < 0.0) throw config_error("density values must be nonnegative");
    }
    if (kind == Kind::GaussBump && !(stddev > 0.0))
        throw config_error("gaussian bump needs stddev > 0");
    const double mass = integral(0.0, 2.0);
    if (std::fabs(mass - 1.0) > 1e-10)
        throw config_error("initial voltage density must integrate to 1");
}

void ModelCoefficients::validate() const {
    if (!(lambda_hat > 0.0) && lambda_variant == LambdaVariant::Standard)
        throw config_error("lambda_hat must be positive");
    if (!(epsilon > 0.0)) throw config_error("epsilon must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw config_error("delta must be in (0,1)");
    if (!(horizon > 0.0)) throw config_error("horizon must be positive");
    if (sigma.epsilon != epsilon)
        throw config_error("sigma profile epsilon must match model epsilon");
    if (sigma.bump_amplitude < 0.0) throw config_error("sigma bump must be nonnegative");
}

double lambda2(TorusPoint v, const ModelCoefficients& c) {
    switch (c.lambda_variant) {
        case LambdaVariant::Zero:
            return 0.0;
        case LambdaVariant::Standard:
            if (v.v <= 1.0) return -c.lambda_hat * v.v;
            return 1.0;
        case LambdaVariant::Smoothed: {
            const double w = kSmoothHalfWidth;
            if (v.v <= 1.0 - w) return -c.lambda_hat * v.v;
            if (v.v < 1.0 + w) {
                const double t = smoothstep((v.v - (1.0 - w)) / (2.0 * w));
                return (1.0 - t) * (-c.lambda_hat * (1.0 - w)) + t * 1.0;
            }
            if (v.v <= 2.0 - w) return 1.0;
            // wrap to lambda(0) = 0 with zero slope at both ends
            const double t = smoothstep((v.v - (2.0 - w)) / w);
            return 1.0 - t;
        }
    }
    return 0.0;
}

double sigma2(TorusPoint v, const ModelCoefficients& c) {
    return c.sigma.eval(v);
}

double g2(const Position& x, TorusPoint v, const Position& y, TorusPoint w,
          const ModelCoefficients& c) {
    if (v.v > 1.0) return 0.0;
    if (w.v < 1.0 || w.v > 1.0 + c.delta) return 0.0;
    return c.theta.eval(x, y);
}

std::vector<double> firing_masses(const ConditionalGridDensity& state, double delta) {
    const double h = state.h();
    const double wlo = 1.0, whi = 1.0 + delta;
    std::vector<double> masses(state.n_atoms(), 0.0);
    const std::size_t k0 = static_cast<std::size_t>(wlo / h);
    const std::size_t k1 = std::min(state.k_cells - 1, static_cast<std::size_t>(whi / h));
    for (std::size_t m = 0; m < state.n_atoms(); ++m) {
        const double* r = state.row(m);
        double s = 0.0;
        for (std::size_t k = k0; k <= k1; ++k) {
            const double lo = std::max(wlo, k * h);
            const double hi = std::min(whi, (k + 1) * h);
            if (hi > lo) s += r[k] * (hi - lo);
        }
        masses[m] = s;
    }
    return masses;
}

namespace {

void check_normalized(double mass, const char* who) {
    if (std::fabs(mass - 1.0) > 1e-8)
        throw contract_error(std::string(who) + ": measure not normalized");
}

}  // namespace

double drift_b(const WeightedAtomMeasure& zeta, const Position& x, TorusPoint v,
               const ModelCoefficients& c) {
    check_normalized(zeta.total_mass(), "drift_b");
    double b = lambda2(v, c);
    if (v.v <= 1.0) {
        double inter = 0.0;
        for (std::size_t j = 0; j < zeta.size(); ++j) {
            const double w = zeta.voltages[j].v;
            if (w >= 1.0 && w <= 1.0 + c.delta)
                inter += zeta.weights[j] * c.theta.eval(x, zeta.positions[j]);
        }
        b += inter;
    }
    return b;
}

double drift_b(const ConditionalGridDensity& zeta, const Position& x, TorusPoint v,
               const ModelCoefficients& c) {
    double mass = 0.0;
    for (std::size_t m = 0; m < zeta.n_atoms(); ++m) mass += zeta.weights[m] * zeta.row_mass(m);
    check_normalized(mass, "drift_b");
    double b = lambda2(v, c);
    if (v.v <= 1.0) {
        const auto fm = firing_masses(zeta, c.delta);
        double inter = 0.0;
        for (std::size_t m = 0; m < zeta.n_atoms(); ++m)
            inter += zeta.weights[m] * c.theta.eval(x, zeta.positions[m]) * fm[m];
        b += inter;
    }
    return b;
}

}  // namespace ifnet
