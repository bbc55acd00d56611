#include "ifnet/measures.hpp"

#include <algorithm>
#include <cmath>

#include "ifnet/wasserstein.hpp"

namespace ifnet {

WeightedAtomMeasure empirical_measure(const ParticleSystemState& state) {
    const std::size_t n = state.size();
    if (n == 0) throw contract_error("empirical_measure: empty state");
    WeightedAtomMeasure m;
    m.positions = state.positions;
    m.voltages.resize(n);
    m.weights.assign(n, 1.0 / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) m.voltages[i] = state.canonical(i);
    return m;
}

EmpiricalDensity mollified_density(const WeightedAtomMeasure& meas, std::size_t grid_k,
                                   double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw config_error("mollified_density: alpha must be in (0,1]");
    if (static_cast<double>(grid_k) < 4.0 / alpha)
        throw config_error("mollified_density: grid too coarse to resolve the kernel");
    const MollifierFamily fam(alpha);
    EmpiricalDensity out;
    out.alpha = alpha;
    out.values.assign(grid_k, 0.0);
    const double h = 2.0 / static_cast<double>(grid_k);

    // support of gamma_alpha(. - v_i) covers ceil(alpha/(2h)) cells each side
    const auto reach = static_cast<long>(std::ceil(0.5 * alpha / h)) + 1;
    for (std::size_t i = 0; i < meas.size(); ++i) {
        const double vi = meas.voltages[i].v;
        const double w = meas.weights[i];
        const long kc = static_cast<long>(vi / h);
        for (long k = kc - reach; k <= kc + reach; ++k) {
            const long kk = ((k % static_cast<long>(grid_k)) + static_cast<long>(grid_k)) %
                            static_cast<long>(grid_k);
            const double lo = static_cast<double>(k) * h;
            out.values[static_cast<std::size_t>(kk)] +=
                w * fam.segment_integral(lo, lo + h, vi) / h;
        }
    }
    return out;
}

EnergyPair l2_energy(const EmpiricalDensity& dens) {
    const std::size_t k = dens.k_cells();
    if (k < 8) throw config_error("l2_energy: need at least 8 cells");
    const double h = dens.h();
    double l2 = 0.0, h1 = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double u = dens.values[i];
        l2 += u * u;
        const double up = dens.values[(i + 1) % k];
        const double um = dens.values[(i + k - 1) % k];
        const double du = (up - um) / (2.0 * h);
        h1 += du * du;
    }
    return {l2 * h, h1 * h};
}

std::vector<std::complex<double>> torus_fourier(std::span<const double> f) {
    const std::size_t k_cells = f.size();
    const double h = 2.0 / static_cast<double>(k_cells);
    const std::size_t kmax = k_cells / 2;
    std::vector<std::complex<double>> coeff(kmax + 1);
    for (std::size_t k = 0; k <= kmax; ++k) {
        double re = 0.0, im = 0.0;
        for (std::size_t j = 0; j < k_cells; ++j) {
            const double v = (static_cast<double>(j) + 0.5) * h;
            const double ang = 3.14159265358979323846 * static_cast<double>(k) * v;
            re += f[j] * std::cos(ang);
            im -= f[j] * std::sin(ang);
        }
        coeff[k] = std::complex<double>(re, im) * (h / 2.0);
    }
    return coeff;
}

double h_minus2_norm_sq_from_fourier(std::span<const std::complex<double>> coeff) {
    // k and -k coefficients are conjugate for real f; count k>0 twice
    double s = 0.0;
    for (std::size_t k = 0; k < coeff.size(); ++k) {
        const double pk = 3.14159265358979323846 * static_cast<double>(k);
        const double wgt = 1.0 / ((1.0 + pk * pk) * (1.0 + pk * pk));
        const double mag = std::norm(coeff[k]);
        s += (k == 0 ? 1.0 : 2.0) * mag * wgt;
    }
    return 2.0 * s;
}

double h_minus2_norm_sq(std::span<const double> grid_values) {
    if (grid_values.size() < 8) throw config_error("h_minus2_norm: need at least 8 cells");
    const auto coeff = torus_fourier(grid_values);
    return h_minus2_norm_sq_from_fourier(coeff);
}

double TestFunction::ev(double v) const {
    if (constant_in_v) return 1.0;
    const double pk = 3.14159265358979323846 * static_cast<double>(mode);
    switch (vkind) {
        case VKind::CosMode:
            return std::cos(pk * v);
        case VKind::SinMode:
            return std::sin(pk * v);
        case VKind::Bump: {
            const double s = std::sin(0.5 * 3.14159265358979323846 * v);
            return s * s * s * s;
        }
    }
    return 0.0;
}

double TestFunction::dev(double v) const {
    if (constant_in_v) return 0.0;
    const double pi = 3.14159265358979323846;
    const double pk = pi * static_cast<double>(mode);
    switch (vkind) {
        case VKind::CosMode:
            return -pk * std::sin(pk * v);
        case VKind::SinMode:
            return pk * std::cos(pk * v);
        case VKind::Bump: {
            const double a = 0.5 * pi * v;
            return 2.0 * pi * std::sin(a) * std::sin(a) * std::sin(a) * std::cos(a);
        }
    }
    return 0.0;
}

double TestFunction::ddev(double v) const {
    if (constant_in_v) return 0.0;
    const double pi = 3.14159265358979323846;
    const double pk = pi * static_cast<double>(mode);
    switch (vkind) {
        case VKind::CosMode:
            return -pk * pk * std::cos(pk * v);
        case VKind::SinMode:
            return -pk * pk * std::sin(pk * v);
        case VKind::Bump: {
            const double a = 0.5 * pi * v;
            const double s = std::sin(a), c = std::cos(a);
            return pi * pi * (3.0 * s * s * c * c - s * s * s * s);
        }
    }
    return 0.0;
}

TestFunction TestFunction::cos_mode(int k) {
    TestFunction f;
    f.vkind = VKind::CosMode;
    f.mode = k;
    f.constant_in_v = (k == 0);
    return f;
}

TestFunction TestFunction::sin_mode(int k) {
    TestFunction f;
    f.vkind = VKind::SinMode;
    f.mode = k;
    return f;
}

TestFunction TestFunction::bump() {
    TestFunction f;
    f.vkind = VKind::Bump;
    f.mode = 1;
    return f;
}

namespace {

class MartingaleObserver final : public StepObserver {
  public:
    MartingaleObserver(const SimConfig& cfg, const TestFunction& phi)
        : cfg_(cfg), phi_(phi) {}

    void on_step(const ParticleSystemState& before, std::span<const double> v_canonical,
                 std::span<const double> z, double dt) override {
        const double n = static_cast<double>(v_canonical.size());
        const double sqdt = std::sqrt(dt);
        double inc = 0.0;
        for (std::size_t i = 0; i < v_canonical.size(); ++i) {
            const double s = sigma2(TorusPoint{v_canonical[i]}, cfg_.coeffs);
            inc += s * phi_.dv(before.positions[i], v_canonical[i]) * sqdt * z[i];
        }
        value_ += inc / n;
        path_.times.push_back(before.time + dt);
        path_.value.push_back(value_);
        path_.sup_abs = std::max(path_.sup_abs, std::fabs(value_));
    }

    MartingalePath take() {
        path_.times.insert(path_.times.begin(), 0.0);
        path_.value.insert(path_.value.begin(), 0.0);
        return std::move(path_);
    }

  private:
    const SimConfig& cfg_;
    const TestFunction& phi_;
    double value_ = 0.0;
    MartingalePath path_;
};

}  // namespace

MartingalePath martingale_functional(const SimConfig& cfg, std::uint32_t replica,
                                     const TestFunction& phi, double t_final) {
    if (t_final > cfg.coeffs.horizon + 1e-12)
        throw config_error("martingale_functional: time beyond horizon");
    MartingaleObserver obs(cfg, phi);
    const double times[1] = {t_final};
    simulate(cfg, replica, times, &obs);
    return obs.take();
}

double w1_holder_modulus(std::span<const WeightedAtomMeasure> path,
                         std::span<const double> times, double alpha, double p) {
    if (!(p > 2.0)) throw config_error("w1_holder_modulus: need p > 2");
    if (!(alpha * p < 0.5 * p - 1.0))
        throw config_error("w1_holder_modulus: need alpha p < p/2 - 1");
    if (path.size() != times.size() || path.size() < 2)
        throw config_error("w1_holder_modulus: path and times mismatch");

    const std::size_t n = path.size();
    std::vector<CircleMeasure> marg(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> v(path[i].size());
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = path[i].voltages[j].v;
        marg[i] = CircleMeasure::from_atoms(v, path[i].weights);
    }

    const double dt = times[1] - times[0];
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double gap = std::fabs(times[j] - times[i]);
            if (gap < dt * (1.0 - 1e-12)) continue;  // exclude the diagonal band
            const double w = wasserstein1_v(marg[i], marg[j]);
            total += 2.0 * std::pow(w, p) / std::pow(gap, 1.0 + alpha * p) * dt * dt;
        }
    }
    return total;
}

}  // namespace ifnet
