#include "ifnet/particle.hpp"

#include <cassert>
#include <cmath>

namespace ifnet {

void SimConfig::validate() const {
    coeffs.validate();
    laws.rho0.validate();
    laws.nu.validate(domain);
    if (n_particles == 0) throw config_error("n_particles must be >= 1");
    if (!(dt > 0.0) || dt > coeffs.horizon)
        throw config_error("dt must satisfy 0 < dt <= horizon");
    if (dt * coeffs.drift_bound() >= 1.0)
        throw config_error("dt too large: dt * drift bound must stay below 1");
    if (coeffs.theta.kind == ThetaKernel::Kind::Block &&
        laws.nu.kind != PositionLaw::Kind::Atoms)
        throw config_error("block theta kernel requires an explicit atom position law");
}

ParticleSystemState init_system(const SimConfig& cfg, std::uint32_t replica) {
    cfg.validate();
    const std::uint32_t n = cfg.n_particles;
    ParticleSystemState st;
    st.positions.resize(n);
    st.voltages.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        StreamRng pos_rng(cfg.seed, StreamClass::InitPosition, replica, i);
        st.positions[i] = cfg.laws.nu.sample(pos_rng, cfg.domain);
        if (!cfg.domain.contains(st.positions[i]))
            throw config_error("sampled position outside D");
        StreamRng volt_rng(cfg.seed, StreamClass::InitVoltage, replica, i);
        st.voltages[i] = mod2(cfg.laws.rho0.sample(volt_rng)).v;
    }
    return st;
}

namespace {

struct FiringSet {
    std::vector<std::uint32_t> indices;  // ascending particle index
    std::vector<std::int64_t> block_counts;
    std::int64_t count = 0;
};

FiringSet build_firing_set(std::span<const double> v_canonical,
                           const ParticleSystemState& st, const ModelCoefficients& c) {
    FiringSet f;
    if (c.theta.kind == ThetaKernel::Kind::Block)
        f.block_counts.assign(c.theta.block.size(), 0);
    for (std::uint32_t j = 0; j < v_canonical.size(); ++j) {
        const double w = v_canonical[j];
        if (w >= 1.0 && w <= 1.0 + c.delta) {
            ++f.count;
            if (c.theta.kind == ThetaKernel::Kind::Gaussian) f.indices.push_back(j);
            if (c.theta.kind == ThetaKernel::Kind::Block)
                ++f.block_counts[static_cast<std::size_t>(st.positions[j].tag)];
        }
    }
    return f;
}

// Interaction sum (1/N) sum_j theta(x_i, x_j) 1_{[1,1+delta]}(w_j) for one
// receiver, exact O(N) scan over all particles.
double interaction_exact(std::uint32_t i, std::span<const double> v_canonical,
                         const ParticleSystemState& st, const ModelCoefficients& c) {
    const double n = static_cast<double>(v_canonical.size());
    switch (c.theta.kind) {
        case ThetaKernel::Kind::Constant: {
            std::int64_t count = 0;
            for (std::uint32_t j = 0; j < v_canonical.size(); ++j) {
                const double w = v_canonical[j];
                if (w >= 1.0 && w <= 1.0 + c.delta) ++count;
            }
            return c.theta.theta0 * static_cast<double>(count) / n;
        }
        case ThetaKernel::Kind::Block: {
            std::vector<std::int64_t> counts(c.theta.block.size(), 0);
            for (std::uint32_t j = 0; j < v_canonical.size(); ++j) {
                const double w = v_canonical[j];
                if (w >= 1.0 && w <= 1.0 + c.delta)
                    ++counts[static_cast<std::size_t>(st.positions[j].tag)];
            }
            const auto& row = c.theta.block[static_cast<std::size_t>(st.positions[i].tag)];
            double acc = 0.0;
            for (std::size_t b = 0; b < counts.size(); ++b)
                acc += row[b] * static_cast<double>(counts[b]);
            return acc / n;
        }
        case ThetaKernel::Kind::Gaussian: {
            double acc = 0.0;
            for (std::uint32_t j = 0; j < v_canonical.size(); ++j) {
                const double w = v_canonical[j];
                if (w >= 1.0 && w <= 1.0 + c.delta)
                    acc += c.theta.eval(st.positions[i], st.positions[j]);
            }
            return acc / n;
        }
    }
    return 0.0;
}

// Same sums assembled from the per-step firing set; addition order matches
// the exact scan, so results are bitwise equal.
double interaction_binned(std::uint32_t i, const FiringSet& f,
                          const ParticleSystemState& st, const ModelCoefficients& c,
                          double n) {
    switch (c.theta.kind) {
        case ThetaKernel::Kind::Constant:
            return c.theta.theta0 * static_cast<double>(f.count) / n;
        case ThetaKernel::Kind::Block: {
            const auto& row = c.theta.block[static_cast<std::size_t>(st.positions[i].tag)];
            double acc = 0.0;
            for (std::size_t b = 0; b < f.block_counts.size(); ++b)
                acc += row[b] * static_cast<double>(f.block_counts[b]);
            return acc / n;
        }
        case ThetaKernel::Kind::Gaussian: {
            double acc = 0.0;
            for (std::uint32_t j : f.indices)
                acc += c.theta.eval(st.positions[i], st.positions[j]);
            return acc / n;
        }
    }
    return 0.0;
}

void step_impl(ParticleSystemState& state, const SimConfig& cfg, std::uint32_t replica,
               StepObserver* observer, bool parallel) {
    const std::uint32_t n = static_cast<std::uint32_t>(state.size());
    const ModelCoefficients& c = cfg.coeffs;
    const std::uint64_t step = static_cast<std::uint64_t>(std::llround(state.time / cfg.dt));
    const double sqrt_dt = std::sqrt(cfg.dt);

    // (1) read-only snapshot of canonical voltages
    std::vector<double> v_bar(n);
    for (std::uint32_t i = 0; i < n; ++i) v_bar[i] = state.canonical(i).v;

    const bool binned = cfg.interaction == InteractionMode::Binned;
    FiringSet firing;
    if (binned) firing = build_firing_set(v_bar, state, c);

    // (2,3) data-parallel particle updates
    std::vector<double> z(n), v_new(n);
    const double bound = c.drift_bound();
    (void)bound;
#pragma omp parallel for schedule(static) if (parallel && n > 256)
    for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(n); ++ii) {
        const auto i = static_cast<std::uint32_t>(ii);
        double b = lambda2(TorusPoint{v_bar[i]}, c);
        if (v_bar[i] <= 1.0) {
            b += binned ? interaction_binned(i, firing, state, c, static_cast<double>(n))
                        : interaction_exact(i, v_bar, state, c);
        }
        assert(std::fabs(b) <= bound + 1e-12);
        z[i] = step_normal(cfg.seed, replica, i, step);
        v_new[i] = euler_update(state.voltages[i], b, sigma2(TorusPoint{v_bar[i]}, c),
                                cfg.dt, z[i]);
    }

    if (observer) observer->on_step(state, v_bar, z, cfg.dt);

    const double t0 = state.time;
    for (std::uint32_t i = 0; i < n; ++i) {
        const double dv = v_new[i] - state.voltages[i];
        if (spike_crossed(v_bar[i], dv)) {
            const double frac = (1.0 - v_bar[i]) / dv;  // linear sub-step crossing
            state.spike_log.push_back({i, t0 + frac * cfg.dt});
        }
        state.voltages[i] = v_new[i];
    }
    state.time = t0 + cfg.dt;
}

}  // namespace

void euler_step(ParticleSystemState& state, const SimConfig& cfg, std::uint32_t replica,
                StepObserver* observer) {
    step_impl(state, cfg, replica, observer, cfg.parallel);
}

void euler_step_reference(ParticleSystemState& state, const SimConfig& cfg,
                          std::uint32_t replica, StepObserver* observer) {
    step_impl(state, cfg, replica, observer, false);
}

ParticleSystemState euler_step(const ParticleSystemState& state, const SimConfig& cfg,
                               std::uint32_t replica) {
    if (state.time + cfg.dt > cfg.coeffs.horizon + 1e-12)
        throw contract_error("euler_step: step would pass the horizon");
    ParticleSystemState next = state;
    euler_step(next, cfg, replica, nullptr);
    return next;
}

std::vector<ParticleSystemState> simulate(const SimConfig& cfg, std::uint32_t replica,
                                          std::span<const double> output_times,
                                          StepObserver* observer) {
    ParticleSystemState st = init_system(cfg, replica);
    std::vector<ParticleSystemState> out;
    out.reserve(output_times.size());
    for (double t : output_times) {
        if (t > cfg.coeffs.horizon + 1e-12)
            throw config_error("simulate: output time beyond horizon");
        const auto target = static_cast<std::uint64_t>(std::llround(t / cfg.dt));
        while (static_cast<std::uint64_t>(std::llround(st.time / cfg.dt)) < target)
            step_impl(st, cfg, replica, observer, cfg.parallel);
        out.push_back(st);
    }
    return out;
}

std::vector<double> euler_refinement_error(const SimConfig& cfg,
                                           std::span<const double> dt_levels,
                                           std::uint32_t replica) {
    if (dt_levels.size() < 2) throw config_error("need at least two dt levels");
    for (std::size_t l = 1; l < dt_levels.size(); ++l) {
        if (std::fabs(dt_levels[l] - 0.5 * dt_levels[l - 1]) > 1e-15 * dt_levels[l - 1])
            throw config_error("dt levels must be dyadic (each half the previous)");
    }
    const double dt_fine = dt_levels.back();
    const double T = cfg.coeffs.horizon;
    const auto n_fine = static_cast<std::uint64_t>(std::llround(T / dt_fine));
    const std::uint32_t n = cfg.n_particles;

    ParticleSystemState init = init_system(cfg, replica);

    // Shared Brownian path: fine increments; coarse steps sum them.
    auto path_at_level = [&](std::size_t level) {
        const double dt = dt_levels[level];
        const auto stride = static_cast<std::uint64_t>(std::llround(dt / dt_fine));
        const auto steps = n_fine / stride;
        std::vector<std::vector<double>> path(n, std::vector<double>(steps + 1));
        for (std::uint32_t i = 0; i < n; ++i) {
            double v = init.voltages[i];
            path[i][0] = v;
            for (std::uint64_t s = 0; s < steps; ++s) {
                double dW = 0.0;
                for (std::uint64_t q = 0; q < stride; ++q)
                    dW += std::sqrt(dt_fine) *
                          step_normal(cfg.seed, replica, i, s * stride + q);
                const TorusPoint vb = mod2(v);
                double b = lambda2(vb, cfg.coeffs);
                if (cfg.coeffs.theta.sup_norm() != 0.0) {
                    // interaction only defined against the whole system;
                    // refinement study runs with theta == 0
                    throw config_error("euler_refinement_error requires theta == 0");
                }
                v += b * dt + sigma2(vb, cfg.coeffs) * dW;
                path[i][s + 1] = v;
            }
        }
        return path;
    };

    std::vector<double> sup_err(dt_levels.size() - 1, 0.0);
    auto coarse = path_at_level(0);
    for (std::size_t l = 1; l < dt_levels.size(); ++l) {
        auto fine = path_at_level(l);
        double err = 0.0;
        for (std::uint32_t i = 0; i < n; ++i) {
            for (std::size_t s = 0; s < coarse[i].size(); ++s) {
                const double d = std::fabs(coarse[i][s] - fine[i][2 * s]);
                err = std::max(err, d);
            }
        }
        sup_err[l - 1] = err;
        coarse = std::move(fine);
    }
    return sup_err;
}

}  // namespace ifnet
