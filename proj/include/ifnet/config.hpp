#pragma once

#include <string>
#include <vector>

#include "ifnet/particle.hpp"

namespace ifnet {

enum class StudyKind {
    Trajectories,
    Pde,
    Spikes,
    Convergence,
    Energy,
    MildCheck,
    MkvCheck,
    EulerOrder,
};

struct PdeConfig {
    std::size_t m_atoms = 100;
    std::size_t k_cells = 200;
    std::vector<double> output_times{0.0, 0.5, 1.0};
};

struct ConvergenceConfig {
    std::vector<std::uint32_t> n_list{100, 1000, 10000};
    std::uint32_t replicas = 20;
    std::vector<double> times{1.0};
    std::size_t pde_k = 400;
};

struct EnergyConfig {
    std::vector<std::uint32_t> n_list{100, 1000, 10000};
    std::uint32_t replicas = 10;
    double t_final = 1.0;
    double snapshot_dt = 0.02;
    double time_alpha = 0.1;  // Lemma-5.2 exponent, exposed as a knob
};

struct SpikesConfig {
    std::uint32_t replicas = 10;
    double window = 0.3;
    double t_max = 4.0;
};

struct MildConfig {
    std::size_t k_cells = 400;
    std::size_t m_atoms = 100;
    int max_mode = 4;
    std::vector<double> t_list{0.25, 0.5, 1.0};
    double snapshot_dt = 0.01;
};

struct MkvConfig {
    std::size_t n_samples = 10000;
    double t = 1.0;
    double dt = 1e-3;
    double snapshot_dt = 0.01;
};

struct EulerOrderConfig {
    double dt_coarse = 0.02;
    std::size_t levels = 5;
    std::uint32_t replicas = 20;
};

struct ExperimentConfig {
    StudyKind study = StudyKind::Trajectories;
    std::string output_dir = "out";
    bool plot = false;
    int threads = 0;  // 0: library default

    DomainBox domain;
    ModelCoefficients coeffs;
    InitialLaws laws;
    SimConfig sim;  // coeffs/laws/domain mirrored into it on load

    PdeConfig pde;
    ConvergenceConfig convergence;
    EnergyConfig energy;
    SpikesConfig spikes;
    MildConfig mild;
    MkvConfig mkv;
    EulerOrderConfig euler_order;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);
std::string serialize_config(const ExperimentConfig& cfg);

StudyKind study_from_name(const std::string& name);
std::string study_name(StudyKind kind);

}  // namespace ifnet
