#pragma once

#include <span>
#include <vector>

#include "ifnet/fokker_planck.hpp"

namespace ifnet {

struct MkvSample {
    Position x;
    double v_canonical;
};

struct MkvResult {
    std::vector<double> times;
    // samples[t][s] for output time t and sample s
    std::vector<std::vector<MkvSample>> samples;
};

// Decoupled single-particle SDE driven by a precomputed solution path:
// positions drawn from the path's atom set, drift interpolated
// piecewise-constant between snapshots, per-sample noise streams shared
// with the particle simulator's keying.
MkvResult mkv_simulate(std::span<const ConditionalGridDensity> mu_path,
                       const ModelCoefficients& coeffs, const VoltageDensity& rho0,
                       std::size_t n_samples, std::uint64_t seed, double dt,
                       std::span<const double> output_times, bool parallel = true);

}  // namespace ifnet
