#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "ifnet/studies.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    long long seed = -1;
    int threads = 0;
    bool plot = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "experiment config file (JSON)")->required();
    cmd->add_option("--out", f.out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", f.seed, "base RNG seed (overrides config)");
    cmd->add_option("--threads", f.threads, "OpenMP thread count");
    cmd->add_flag("--plot", f.plot, "emit SVG figures");
}

int run(ifnet::StudyKind kind, const CommonFlags& f) {
    ifnet::ExperimentConfig cfg = ifnet::load_config(f.config_path);
    cfg.study = kind;
    if (!f.out_dir.empty()) cfg.output_dir = f.out_dir;
    if (f.seed >= 0) cfg.sim.seed = static_cast<std::uint64_t>(f.seed);
    if (f.plot) cfg.plot = true;
    if (f.threads > 0) cfg.threads = f.threads;
#ifdef _OPENMP
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
    const auto out = ifnet::run_study(cfg);
    out.write_to(cfg.output_dir);
    for (const auto& [k, v] : out.metrics) std::printf("%s = %.6g\n", k.c_str(), v);
    std::printf("wrote %zu file(s) to %s\n", out.files.size(), cfg.output_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulation and verification suite for spatially interacting "
                 "integrate-and-fire neurons on the torus"};
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* help;
        ifnet::StudyKind kind;
    };
    const Sub subs[] = {
        {"simulate", "run the N-particle system and export snapshots/spikes",
         ifnet::StudyKind::Trajectories},
        {"pde", "solve the limiting Fokker-Planck equation", ifnet::StudyKind::Pde},
        {"convergence", "empirical-measure convergence study (W1 vs N)",
         ifnet::StudyKind::Convergence},
        {"energy", "mollified-density energy and time-regularity study",
         ifnet::StudyKind::Energy},
        {"spikes", "spike raster and cascade study", ifnet::StudyKind::Spikes},
        {"mkv-check", "decoupled McKean-Vlasov fixed-point check", ifnet::StudyKind::MkvCheck},
        {"mild-check", "mild/weak residual verification of PDE solutions",
         ifnet::StudyKind::MildCheck},
        {"euler-order", "empirical strong order of the Euler scheme",
         ifnet::StudyKind::EulerOrder},
    };

    CommonFlags flags[std::size(subs)];
    ifnet::StudyKind chosen{};
    const CommonFlags* chosen_flags = nullptr;
    for (std::size_t i = 0; i < std::size(subs); ++i) {
        auto* cmd = app.add_subcommand(subs[i].name, subs[i].help);
        add_common(cmd, flags[i]);
        const auto kind = subs[i].kind;
        const CommonFlags* fp = &flags[i];
        cmd->callback([&chosen, &chosen_flags, kind, fp]() {
            chosen = kind;
            chosen_flags = fp;
        });
    }

    CLI11_PARSE(app, argc, argv);
    try {
        return run(chosen, *chosen_flags);
    } catch (const ifnet::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const ifnet::contract_error& e) {
        std::fprintf(stderr, "numerical contract violation: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
