#include "ifnet/studies.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ifnet/csv.hpp"
#include "ifnet/fokker_planck.hpp"
#include "ifnet/mckean_vlasov.hpp"
#include "ifnet/measures.hpp"
#include "ifnet/svg.hpp"
#include "ifnet/wasserstein.hpp"

namespace ifnet {

void StudyOutputs::write_to(const std::string& dir) const {
    ensure_directory(dir);
    for (const auto& [name, content] : files) write_text_file(dir + "/" + name, content);
}

const std::string& StudyOutputs::file(const std::string& name) const {
    for (const auto& [n, c] : files)
        if (n == name) return c;
    throw config_error("study output missing file: " + name);
}

double fit_order(std::span<const double> dts, std::span<const double> errs) {
    const std::size_t n = dts.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log2(dts[i]);
        const double y = std::log2(std::max(errs[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double d = static_cast<double>(n) * sxx - sx * sx;
    return (static_cast<double>(n) * sxy - sx * sy) / d;
}

namespace {

std::string fmt_time(double t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", t);
    return buf;
}

std::vector<double> uniform_times(double t_final, double dt) {
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::llround(t_final / dt));
    out.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        out.push_back(static_cast<double>(i) * t_final / static_cast<double>(n));
    return out;
}

// every-step trace recorder for small systems
class TraceRecorder final : public StepObserver {
  public:
    void on_step(const ParticleSystemState& before, std::span<const double>,
                 std::span<const double>, double) override {
        times_.push_back(before.time);
        traces_.push_back(before.voltages);
    }
    std::vector<double> times_;
    std::vector<std::vector<double>> traces_;
};

std::string spikes_csv(const std::vector<std::vector<SpikeEvent>>& per_replica) {
    CsvWriter csv("spikes-1", {"replica", "particle", "time"});
    for (std::size_t r = 0; r < per_replica.size(); ++r)
        for (const auto& s : per_replica[r])
            csv.add_row({static_cast<double>(r), static_cast<double>(s.particle), s.time});
    return csv.str();
}

WeightedAtomMeasure pde_as_atoms(const ConditionalGridDensity& st) {
    WeightedAtomMeasure m;
    const double h = st.h();
    for (std::size_t a = 0; a < st.n_atoms(); ++a) {
        const double* r = st.row(a);
        for (std::size_t k = 0; k < st.k_cells; ++k) {
            const double w = st.weights[a] * r[k] * h;
            if (w > 0.0) {
                m.positions.push_back(st.positions[a]);
                m.voltages.push_back(TorusPoint{st.cell_center(k)});
                m.weights.push_back(w);
            }
        }
    }
    return m;
}

struct CascadeStats {
    double first_spike = std::numeric_limits<double>::quiet_NaN();
    double fraction = 0.0;
    double delay = std::numeric_limits<double>::quiet_NaN();  // two-cluster only
};

CascadeStats cascade_stats(const ParticleSystemState& final_state, std::uint32_t n,
                           double window, bool two_cluster) {
    CascadeStats cs;
    const auto& log = final_state.spike_log;
    if (log.empty()) return cs;
    cs.first_spike = log.front().time;
    std::vector<char> seen(n, 0);
    const std::uint32_t first = log.front().particle;
    std::uint32_t others = 0;
    for (const auto& s : log) {
        if (s.time <= cs.first_spike + window && s.particle != first && !seen[s.particle]) {
            seen[s.particle] = 1;
            ++others;
        }
    }
    cs.fraction = n > 1 ? static_cast<double>(others) / static_cast<double>(n - 1) : 0.0;
    if (two_cluster) {
        const std::uint32_t half = n / 2;
        double t1 = std::numeric_limits<double>::quiet_NaN();
        double t2 = t1;
        for (const auto& s : log) {
            if (s.particle < half && std::isnan(t1)) t1 = s.time;
            if (s.particle >= half && std::isnan(t2)) t2 = s.time;
        }
        if (!std::isnan(t1) && !std::isnan(t2)) cs.delay = t2 - t1;
    }
    return cs;
}

}  // namespace

StudyOutputs run_trajectories(const ExperimentConfig& cfg) {
    StudyOutputs out;
    SimConfig sim = cfg.sim;
    sim.coeffs.horizon = std::max(sim.coeffs.horizon, cfg.pde.output_times.back());
    std::vector<std::vector<SpikeEvent>> spikes(sim.n_replicas);
    std::vector<ParticleSystemState> replica0_snaps;

    for (std::uint32_t r = 0; r < sim.n_replicas; ++r) {
        TraceRecorder tracer;
        const bool trace = cfg.plot && r == 0 && sim.n_particles <= 32;
        auto snaps = simulate(sim, r, cfg.pde.output_times, trace ? &tracer : nullptr);
        spikes[r] = snaps.back().spike_log;
        if (r == 0) {
            replica0_snaps = snaps;
            if (trace && !tracer.times_.empty()) {
                std::vector<SvgSeries> series(sim.n_particles);
                for (std::uint32_t i = 0; i < sim.n_particles; ++i) {
                    series[i].label = "V" + std::to_string(i);
                    series[i].x = tracer.times_;
                    for (const auto& v : tracer.traces_) series[i].y.push_back(v[i]);
                }
                out.files.emplace_back("traces.svg", emit_line_svg(series, "voltage traces"));
            }
        }
    }

    out.files.emplace_back("spikes.csv", spikes_csv(spikes));
    for (const auto& st : replica0_snaps) {
        CsvWriter csv("snapshot-1", {"particle", "x1", "x2", "x3", "v_canonical"});
        for (std::size_t i = 0; i < st.size(); ++i)
            csv.add_row({static_cast<double>(i), st.positions[i].r[0], st.positions[i].r[1],
                         st.positions[i].r[2], st.canonical(i).v});
        out.files.emplace_back("snapshot_t" + fmt_time(st.time) + ".csv", csv.str());
    }
    out.metrics["total_spikes_r0"] = static_cast<double>(spikes[0].size());
    return out;
}

StudyOutputs run_pde_study(const ExperimentConfig& cfg) {
    StudyOutputs out;
    auto init = discretize_initial(cfg.laws, cfg.domain, cfg.pde.m_atoms, cfg.pde.k_cells,
                                   cfg.sim.seed);
    const double t_final = cfg.pde.output_times.back();
    auto snaps = fp_solve(init, t_final, cfg.coeffs, cfg.pde.output_times);

    CsvWriter rate("firing-rate-1", {"t", "total_firing_mass"});
    for (const auto& st : snaps) {
        const auto fm = firing_masses(st, cfg.coeffs.delta);
        double total = 0.0;
        for (std::size_t m = 0; m < st.n_atoms(); ++m) total += st.weights[m] * fm[m];
        rate.add_row({st.time, total});

        CsvWriter csv("fp-snapshot-1", {"m", "x1", "x2", "x3", "weight", "k", "v_center", "rho"});
        for (std::size_t m = 0; m < st.n_atoms(); ++m) {
            const double* r = st.row(m);
            for (std::size_t k = 0; k < st.k_cells; ++k)
                csv.add_row({static_cast<double>(m), st.positions[m].r[0], st.positions[m].r[1],
                             st.positions[m].r[2], st.weights[m], static_cast<double>(k),
                             st.cell_center(k), r[k]});
        }
        out.files.emplace_back("fp_t" + fmt_time(st.time) + ".csv", csv.str());
    }
    out.files.emplace_back("firing_rate.csv", rate.str());

    double worst = 0.0;
    for (const auto& st : snaps)
        for (std::size_t m = 0; m < st.n_atoms(); ++m)
            worst = std::max(worst, std::fabs(st.row_mass(m) - 1.0));
    out.metrics["max_mass_error"] = worst;
    if (cfg.plot) {
        SvgSeries s;
        s.label = "firing mass";
        for (const auto& st : snaps) {
            const auto fm = firing_masses(st, cfg.coeffs.delta);
            double total = 0.0;
            for (std::size_t m = 0; m < st.n_atoms(); ++m) total += st.weights[m] * fm[m];
            s.x.push_back(st.time);
            s.y.push_back(total);
        }
        out.files.emplace_back("firing_rate.svg", emit_line_svg({s}, "firing mass"));
    }
    return out;
}

StudyOutputs run_convergence_study(const ExperimentConfig& cfg) {
    StudyOutputs out;
    const auto& times = cfg.convergence.times;
    const double t_final = times.back();

    auto init = discretize_initial(cfg.laws, cfg.domain, cfg.pde.m_atoms, cfg.convergence.pde_k,
                                   cfg.sim.seed);
    ModelCoefficients pde_coeffs = cfg.coeffs;
    pde_coeffs.horizon = std::max(pde_coeffs.horizon, t_final);
    auto pde_snaps = fp_solve(init, t_final, pde_coeffs, times);
    std::vector<CircleMeasure> pde_marginals;
    pde_marginals.reserve(pde_snaps.size());
    for (const auto& st : pde_snaps) pde_marginals.push_back(CircleMeasure::from_grid(v_marginal(st)));

    CsvWriter csv("w1-convergence-1", {"N", "t", "w1_v", "w1_joint_or_nan"});
    CsvWriter se_csv("w1-convergence-se-1", {"N", "t", "w1_v_se", "replicas"});

    for (std::uint32_t n : cfg.convergence.n_list) {
        SimConfig sim = cfg.sim;
        sim.n_particles = n;
        sim.coeffs.horizon = std::max(sim.coeffs.horizon, t_final);
        const std::uint32_t reps = cfg.convergence.replicas;
        std::vector<std::vector<double>> w1v(times.size(), std::vector<double>(reps, 0.0));
        std::vector<std::vector<double>> w1j(times.size(),
                                             std::vector<double>(reps,
                                                                 std::numeric_limits<double>::quiet_NaN()));

#pragma omp parallel for schedule(dynamic)
        for (std::int64_t rr = 0; rr < static_cast<std::int64_t>(reps); ++rr) {
            const auto r = static_cast<std::uint32_t>(rr);
            SimConfig local = sim;
            local.parallel = false;
            auto snaps = simulate(local, r, times);
            for (std::size_t ti = 0; ti < times.size(); ++ti) {
                const auto emp = empirical_measure(snaps[ti]);
                std::vector<double> v(emp.size());
                for (std::size_t i = 0; i < v.size(); ++i) v[i] = emp.voltages[i].v;
                const auto emp_circle = CircleMeasure::from_uniform_atoms(v);
                w1v[ti][r] = wasserstein1_v(emp_circle, pde_marginals[ti]);
                if (emp.size() + pde_snaps[ti].n_atoms() * pde_snaps[ti].k_cells <= 4000) {
                    const auto pde_atoms = pde_as_atoms(pde_snaps[ti]);
                    if (emp.size() + pde_atoms.size() <= 4000)
                        w1j[ti][r] = wasserstein1_joint(emp, pde_atoms);
                }
            }
        }

        for (std::size_t ti = 0; ti < times.size(); ++ti) {
            double mean = 0.0;
            for (double x : w1v[ti]) mean += x;
            mean /= static_cast<double>(reps);
            double var = 0.0;
            for (double x : w1v[ti]) var += (x - mean) * (x - mean);
            const double se = reps > 1 ? std::sqrt(var / (reps - 1.0) / reps) : 0.0;
            double jmean = 0.0;
            std::size_t jcount = 0;
            for (double x : w1j[ti])
                if (!std::isnan(x)) {
                    jmean += x;
                    ++jcount;
                }
            const double joint = jcount ? jmean / static_cast<double>(jcount)
                                        : std::numeric_limits<double>::quiet_NaN();
            csv.add_row({static_cast<double>(n), times[ti], mean, joint});
            se_csv.add_row({static_cast<double>(n), times[ti], se, static_cast<double>(reps)});
            out.metrics["w1_N" + std::to_string(n) + "_t" + fmt_time(times[ti])] = mean;
        }
    }

    out.files.emplace_back("w1_convergence.csv", csv.str());
    out.files.emplace_back("w1_convergence_se.csv", se_csv.str());
    if (cfg.plot) {
        // one series per output time across N
        std::vector<SvgSeries> by_time(times.size());
        for (std::size_t ti = 0; ti < times.size(); ++ti) {
            by_time[ti].label = "t=" + fmt_time(times[ti]);
            for (std::uint32_t n : cfg.convergence.n_list) {
                by_time[ti].x.push_back(static_cast<double>(n));
                by_time[ti].y.push_back(
                    out.metrics.at("w1_N" + std::to_string(n) + "_t" + fmt_time(times[ti])));
            }
        }
        out.files.emplace_back("w1_convergence.svg",
                               emit_line_svg(by_time, "W1 vs N", /*loglog=*/true));
    }
    return out;
}

StudyOutputs run_energy_study(const ExperimentConfig& cfg) {
    StudyOutputs out;
    const auto times = uniform_times(cfg.energy.t_final, cfg.energy.snapshot_dt);

    CsvWriter csv("energy-1",
                  {"N", "alpha", "sup_l2", "h1_time_integral", "time_regularity", "replicas"});

    for (std::uint32_t n : cfg.energy.n_list) {
        const double alpha = mollifier_scale_for(n);
        const std::size_t grid_k = 256;
        SimConfig sim = cfg.sim;
        sim.n_particles = n;
        sim.coeffs.horizon = std::max(sim.coeffs.horizon, cfg.energy.t_final);
        const std::uint32_t reps = cfg.energy.replicas;

        std::vector<double> sup_l2(reps, 0.0), h1_int(reps, 0.0), treg(reps, 0.0);
        std::vector<double> u_final_r0;

#pragma omp parallel for schedule(dynamic)
        for (std::int64_t rr = 0; rr < static_cast<std::int64_t>(reps); ++rr) {
            const auto r = static_cast<std::uint32_t>(rr);
            SimConfig local = sim;
            local.parallel = false;
            auto snaps = simulate(local, r, times);
            std::vector<std::vector<std::complex<double>>> fouriers(snaps.size());
            double sup = 0.0, h1acc = 0.0, prev_h1 = 0.0;
            for (std::size_t ti = 0; ti < snaps.size(); ++ti) {
                const auto dens = mollified_density(empirical_measure(snaps[ti]), grid_k, alpha);
                const auto e = l2_energy(dens);
                sup = std::max(sup, e.l2_sq);
                if (ti > 0)
                    h1acc += 0.5 * (e.h1_seminorm_sq + prev_h1) * (times[ti] - times[ti - 1]);
                prev_h1 = e.h1_seminorm_sq;
                fouriers[ti] = torus_fourier(dens.values);
                if (r == 0 && ti + 1 == snaps.size()) {
#pragma omp critical
                    u_final_r0 = dens.values;
                }
            }
            // Lemma-5.2 style functional with the diagonal band excluded
            const double dt = times[1] - times[0];
            double func = 0.0;
            for (std::size_t i = 0; i < snaps.size(); ++i) {
                for (std::size_t j = i + 1; j < snaps.size(); ++j) {
                    const double gap = times[j] - times[i];
                    if (gap < dt * (1.0 - 1e-12)) continue;
                    std::vector<std::complex<double>> diff(fouriers[i].size());
                    for (std::size_t k = 0; k < diff.size(); ++k)
                        diff[k] = fouriers[i][k] - fouriers[j][k];
                    func += 2.0 * h_minus2_norm_sq_from_fourier(diff) /
                            std::pow(gap, 1.0 + 2.0 * cfg.energy.time_alpha) * dt * dt;
                }
            }
            sup_l2[r] = sup;
            h1_int[r] = h1acc;
            treg[r] = func;
        }

        auto mean = [&](const std::vector<double>& x) {
            double s = 0.0;
            for (double v : x) s += v;
            return s / static_cast<double>(x.size());
        };
        csv.add_row({static_cast<double>(n), alpha, mean(sup_l2), mean(h1_int), mean(treg),
                     static_cast<double>(reps)});
        out.metrics["sup_l2_N" + std::to_string(n)] = mean(sup_l2);
        out.metrics["treg_N" + std::to_string(n)] = mean(treg);

        CsvWriter dcsv("density-1", {"v", "u"});
        const double h = 2.0 / static_cast<double>(grid_k);
        for (std::size_t k = 0; k < u_final_r0.size(); ++k)
            dcsv.add_row({(static_cast<double>(k) + 0.5) * h, u_final_r0[k]});
        out.files.emplace_back(
            "density_t" + fmt_time(cfg.energy.t_final) + "_N" + std::to_string(n) + ".csv",
            dcsv.str());
    }
    out.files.emplace_back("energy.csv", csv.str());
    return out;
}

StudyOutputs run_spike_study(const ExperimentConfig& cfg) {
    StudyOutputs out;
    SimConfig sim = cfg.sim;
    sim.coeffs.horizon = std::max(sim.coeffs.horizon, cfg.spikes.t_max);
    const bool two_cluster = cfg.coeffs.theta.kind == ThetaKernel::Kind::Block;
    const std::uint32_t reps = cfg.spikes.replicas;

    std::vector<std::vector<SpikeEvent>> spikes(reps);
    std::vector<CascadeStats> stats(reps);
    const double t_end[1] = {cfg.spikes.t_max};

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t rr = 0; rr < static_cast<std::int64_t>(reps); ++rr) {
        const auto r = static_cast<std::uint32_t>(rr);
        SimConfig local = sim;
        local.parallel = false;
        auto snaps = simulate(local, r, t_end);
        spikes[r] = snaps.back().spike_log;
        stats[r] = cascade_stats(snaps.back(), sim.n_particles, cfg.spikes.window, two_cluster);
    }

    out.files.emplace_back("spikes.csv", spikes_csv(spikes));
    CsvWriter csv("cascade-1", {"replica", "first_spike_time", "cascade_fraction", "delay"});
    double frac_sum = 0.0;
    int high = 0, delayed = 0;
    for (std::uint32_t r = 0; r < reps; ++r) {
        csv.add_row({static_cast<double>(r), stats[r].first_spike, stats[r].fraction,
                     stats[r].delay});
        frac_sum += stats[r].fraction;
        if (stats[r].fraction >= 0.8) ++high;
        if (!std::isnan(stats[r].delay) && stats[r].delay > 0.0) ++delayed;
    }
    out.files.emplace_back("cascade.csv", csv.str());
    out.metrics["cascade_fraction_mean"] = frac_sum / static_cast<double>(reps);
    out.metrics["replicas_cascading"] = static_cast<double>(high);
    out.metrics["replicas_with_positive_delay"] = static_cast<double>(delayed);
    if (cfg.plot) {
        std::vector<std::pair<int, double>> marks;
        for (const auto& s : spikes[0]) marks.emplace_back(static_cast<int>(s.particle), s.time);
        out.files.emplace_back("raster.svg",
                               emit_raster_svg(marks, static_cast<int>(sim.n_particles),
                                               cfg.spikes.t_max, "spike raster (replica 0)"));
    }
    return out;
}

StudyOutputs run_mild_check(const ExperimentConfig& cfg) {
    StudyOutputs out;
    const double t_final = *std::max_element(cfg.mild.t_list.begin(), cfg.mild.t_list.end());
    auto init = discretize_initial(cfg.laws, cfg.domain, cfg.mild.m_atoms, cfg.mild.k_cells,
                                   cfg.sim.seed);
    ModelCoefficients coeffs = cfg.coeffs;
    coeffs.horizon = std::max(coeffs.horizon, t_final);
    const auto times = uniform_times(t_final, cfg.mild.snapshot_dt);
    auto path = fp_solve(init, t_final, coeffs, times);

    std::vector<TestFunction> modes;
    std::vector<std::string> names;
    for (int k = 1; k <= cfg.mild.max_mode; ++k) {
        modes.push_back(TestFunction::cos_mode(k));
        names.push_back("cos" + std::to_string(k));
        modes.push_back(TestFunction::sin_mode(k));
        names.push_back("sin" + std::to_string(k));
    }

    CsvWriter mcsv("mild-residual-1", {"t", "mode", "residual"});
    double worst = 0.0;
    for (double t : cfg.mild.t_list) {
        for (std::size_t i = 0; i < modes.size(); ++i) {
            const double r = mild_residual(path, modes[i], t, coeffs);
            mcsv.add_row_raw({format_full(t), names[i], format_full(r)});
            worst = std::max(worst, r);
            out.metrics["mild_" + names[i] + "_t" + fmt_time(t)] = r;
        }
    }
    out.files.emplace_back("mild_residual.csv", mcsv.str());
    out.metrics["mild_max"] = worst;

    CsvWriter wcsv("weak-residual-1", {"source", "n", "mode", "value"});
    double worst_weak = 0.0;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const double r = weak_residual_phi(path, modes[i], coeffs);
        wcsv.add_row_raw({"pde", "0", names[i], format_full(r)});
        worst_weak = std::max(worst_weak, r);
        out.metrics["weak_pde_" + names[i]] = r;
    }
    out.metrics["weak_pde_max"] = worst_weak;

    // empirical counterpart at the configured particle count
    {
        SimConfig sim = cfg.sim;
        sim.coeffs.horizon = std::max(sim.coeffs.horizon, t_final);
        const auto emp_times = uniform_times(t_final, sim.dt);
        std::vector<double> means(modes.size(), 0.0);
        for (std::uint32_t r = 0; r < sim.n_replicas; ++r) {
            auto snaps = simulate(sim, r, emp_times);
            std::vector<WeightedAtomMeasure> emp_path(snaps.size());
            for (std::size_t j = 0; j < snaps.size(); ++j)
                emp_path[j] = empirical_measure(snaps[j]);
            for (std::size_t i = 0; i < modes.size(); ++i)
                means[i] += weak_residual_phi(emp_path, emp_times, modes[i], sim.coeffs);
        }
        for (std::size_t i = 0; i < modes.size(); ++i) {
            means[i] /= static_cast<double>(sim.n_replicas);
            wcsv.add_row_raw({"empirical", std::to_string(sim.n_particles), names[i],
                              format_full(means[i])});
            out.metrics["weak_emp_" + names[i]] = means[i];
        }
    }
    out.files.emplace_back("weak_residual.csv", wcsv.str());
    return out;
}

StudyOutputs run_mkv_check(const ExperimentConfig& cfg) {
    StudyOutputs out;
    auto init = discretize_initial(cfg.laws, cfg.domain, cfg.pde.m_atoms, cfg.pde.k_cells,
                                   cfg.sim.seed);
    ModelCoefficients coeffs = cfg.coeffs;
    coeffs.horizon = std::max(coeffs.horizon, cfg.mkv.t);
    const auto times = uniform_times(cfg.mkv.t, cfg.mkv.snapshot_dt);
    auto path = fp_solve(init, cfg.mkv.t, coeffs, times);

    const double out_times[1] = {cfg.mkv.t};
    auto res = mkv_simulate(path, coeffs, cfg.laws.rho0, cfg.mkv.n_samples, cfg.sim.seed,
                            cfg.mkv.dt, out_times);

    CsvWriter scsv("mkv-samples-1", {"sample", "x1", "x2", "x3", "v_canonical", "t"});
    std::vector<double> v(cfg.mkv.n_samples);
    for (std::size_t s = 0; s < cfg.mkv.n_samples; ++s) {
        const auto& smp = res.samples[0][s];
        scsv.add_row({static_cast<double>(s), smp.x.r[0], smp.x.r[1], smp.x.r[2],
                      smp.v_canonical, cfg.mkv.t});
        v[s] = smp.v_canonical;
    }
    out.files.emplace_back("mkv_samples.csv", scsv.str());

    const auto emp = CircleMeasure::from_uniform_atoms(v);
    const auto marg = CircleMeasure::from_grid(v_marginal(path.back()));
    const double w1 = wasserstein1_v(emp, marg);
    CsvWriter csv("mkv-check-1", {"t", "n_samples", "w1_v"});
    csv.add_row({cfg.mkv.t, static_cast<double>(cfg.mkv.n_samples), w1});
    out.files.emplace_back("mkv_check.csv", csv.str());
    out.metrics["w1"] = w1;
    return out;
}

StudyOutputs run_euler_order(const ExperimentConfig& cfg) {
    StudyOutputs out;
    std::vector<double> dts(cfg.euler_order.levels);
    for (std::size_t l = 0; l < dts.size(); ++l)
        dts[l] = cfg.euler_order.dt_coarse / std::pow(2.0, static_cast<double>(l));

    SimConfig sim = cfg.sim;
    const std::uint32_t reps = cfg.euler_order.replicas;
    std::vector<std::vector<double>> errs(reps);

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t rr = 0; rr < static_cast<std::int64_t>(reps); ++rr) {
        errs[static_cast<std::size_t>(rr)] =
            euler_refinement_error(sim, dts, static_cast<std::uint32_t>(rr));
    }

    std::vector<double> mean_err(dts.size() - 1, 0.0);
    for (const auto& e : errs)
        for (std::size_t l = 0; l < mean_err.size(); ++l) mean_err[l] += e[l];
    for (double& e : mean_err) e /= static_cast<double>(reps);

    CsvWriter csv("euler-order-1", {"dt", "mean_sup_err"});
    std::vector<double> fit_dt(dts.begin(), dts.end() - 1);
    for (std::size_t l = 0; l < mean_err.size(); ++l) csv.add_row({fit_dt[l], mean_err[l]});
    out.files.emplace_back("euler_order.csv", csv.str());
    const double order = fit_order(fit_dt, mean_err);
    out.metrics["order"] = order;
    if (cfg.plot) {
        SvgSeries s;
        s.label = "sup error";
        s.x = fit_dt;
        s.y = mean_err;
        out.files.emplace_back("euler_order.svg", emit_line_svg({s}, "strong error vs dt", true));
    }
    return out;
}

StudyOutputs run_study(const ExperimentConfig& cfg) {
    switch (cfg.study) {
        case StudyKind::Trajectories: return run_trajectories(cfg);
        case StudyKind::Pde: return run_pde_study(cfg);
        case StudyKind::Spikes: return run_spike_study(cfg);
        case StudyKind::Convergence: return run_convergence_study(cfg);
        case StudyKind::Energy: return run_energy_study(cfg);
        case StudyKind::MildCheck: return run_mild_check(cfg);
        case StudyKind::MkvCheck: return run_mkv_check(cfg);
        case StudyKind::EulerOrder: return run_euler_order(cfg);
    }
    throw config_error("unknown study");
}

}  // namespace ifnet
