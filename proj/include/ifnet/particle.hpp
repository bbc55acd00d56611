#pragma once

#include <span>
#include <vector>

#include "ifnet/model.hpp"

namespace ifnet {

struct SpikeEvent {
    std::uint32_t particle;
    double time;
};

struct ParticleSystemState {
    std::vector<Position> positions;        // frozen after init (dX = 0)
    std::vector<double> voltages;           // unwrapped R-valued V^{i,N}
    double time = 0.0;
    std::vector<SpikeEvent> spike_log;

    std::size_t size() const { return voltages.size(); }
    TorusPoint canonical(std::size_t i) const { return mod2(voltages[i]); }
};

enum class InteractionMode { Exact, Binned };

struct SimConfig {
    std::uint32_t n_particles = 100;
    double dt = 1e-3;
    std::uint64_t seed = 0;
    std::uint32_t n_replicas = 1;
    ModelCoefficients coeffs;
    InitialLaws laws;
    DomainBox domain;
    InteractionMode interaction = InteractionMode::Binned;
    bool parallel = true;

    void validate() const;
};

// Hook invoked once per completed Euler step with the pre-step canonical
// voltages and the normal draws that produced the step.
struct StepObserver {
    virtual ~StepObserver() = default;
    virtual void on_step(const ParticleSystemState& before,
                         std::span<const double> v_canonical,
                         std::span<const double> z, double dt) = 0;
};

// One Euler-Maruyama update: v + b dt + sigma sqrt(dt) z.
inline double euler_update(double v, double b, double sigma, double dt, double z) {
    return v + b * dt + sigma * std::sqrt(dt) * z;
}

// Threshold crossing within one cycle: canonical voltage passes 1 from
// below and the raw increment is not pathological.
inline bool spike_crossed(double v_canonical, double dv) {
    return v_canonical < 1.0 && v_canonical + dv >= 1.0 && dv < 1.0;
}

ParticleSystemState init_system(const SimConfig& cfg, std::uint32_t replica);

// Advances the state in place by one step of length cfg.dt.
void euler_step(ParticleSystemState& state, const SimConfig& cfg, std::uint32_t replica,
                StepObserver* observer = nullptr);

// Plain serial loop kept as the reference the OpenMP kernel is checked
// against; results are bitwise identical.
void euler_step_reference(ParticleSystemState& state, const SimConfig& cfg,
                          std::uint32_t replica, StepObserver* observer = nullptr);

// Value-returning form of the step contract.
ParticleSystemState euler_step(const ParticleSystemState& state, const SimConfig& cfg,
                               std::uint32_t replica);

// Snapshots at the requested times (each <= horizon); the state advances
// with fixed dt and snapshots are taken at the nearest step boundary.
std::vector<ParticleSystemState> simulate(const SimConfig& cfg, std::uint32_t replica,
                                          std::span<const double> output_times,
                                          StepObserver* observer = nullptr);

// Couples dyadically refined Euler paths through shared Brownian
// increments; returns sup_t |V^{dt_k} - V^{dt_{k+1}}| for consecutive
// levels, averaged over particles.
std::vector<double> euler_refinement_error(const SimConfig& cfg,
                                           std::span<const double> dt_levels,
                                           std::uint32_t replica);

}  // namespace ifnet
