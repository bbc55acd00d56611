#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ifnet/config.hpp"

namespace ifnet {

// Every study is a pure function of its config: byte-identical files and
// metrics for equal (config, seed) at any thread count.
struct StudyOutputs {
    // filename -> file content, in emission order
    std::vector<std::pair<std::string, std::string>> files;
    std::map<std::string, double> metrics;

    void write_to(const std::string& dir) const;
    const std::string& file(const std::string& name) const;
};

StudyOutputs run_trajectories(const ExperimentConfig& cfg);
StudyOutputs run_pde_study(const ExperimentConfig& cfg);
StudyOutputs run_convergence_study(const ExperimentConfig& cfg);
StudyOutputs run_energy_study(const ExperimentConfig& cfg);
StudyOutputs run_spike_study(const ExperimentConfig& cfg);
StudyOutputs run_mild_check(const ExperimentConfig& cfg);
StudyOutputs run_mkv_check(const ExperimentConfig& cfg);
StudyOutputs run_euler_order(const ExperimentConfig& cfg);

StudyOutputs run_study(const ExperimentConfig& cfg);

// least-squares slope of log2(err) against log2(dt)
double fit_order(std::span<const double> dts, std::span<const double> errs);

}  // namespace ifnet
