#include "ifnet/config.hpp"

#include <fstream>

#include <json.hpp>

namespace ifnet {

using json = nlohmann::ordered_json;

StudyKind study_from_name(const std::string& name) {
    if (name == "trajectories" || name == "simulate") return StudyKind::Trajectories;
    if (name == "pde") return StudyKind::Pde;
    if (name == "spikes") return StudyKind::Spikes;
    if (name == "convergence") return StudyKind::Convergence;
    if (name == "energy") return StudyKind::Energy;
    if (name == "mild_check") return StudyKind::MildCheck;
    if (name == "mkv_check") return StudyKind::MkvCheck;
    if (name == "euler_order") return StudyKind::EulerOrder;
    throw config_error("unknown study: " + name);
}

std::string study_name(StudyKind kind) {
    switch (kind) {
        case StudyKind::Trajectories: return "trajectories";
        case StudyKind::Pde: return "pde";
        case StudyKind::Spikes: return "spikes";
        case StudyKind::Convergence: return "convergence";
        case StudyKind::Energy: return "energy";
        case StudyKind::MildCheck: return "mild_check";
        case StudyKind::MkvCheck: return "mkv_check";
        case StudyKind::EulerOrder: return "euler_order";
    }
    return "trajectories";
}

namespace {

std::array<double, 3> vec3(const json& j) {
    if (!j.is_array() || j.size() != 3) throw config_error("expected a 3-vector");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec3_json(const std::array<double, 3>& v) {
    return json::array({v[0], v[1], v[2]});
}

ThetaKernel theta_from_json(const json& j) {
    const std::string kind = j.value("kind", "constant");
    if (kind == "constant") return ThetaKernel::constant(j.value("theta0", 0.0));
    if (kind == "gaussian")
        return ThetaKernel::gaussian(j.value("theta0", 0.0), j.value("length", 1.0));
    if (kind == "block") {
        std::vector<std::vector<double>> mat;
        for (const auto& row : j.at("matrix")) mat.push_back(row.get<std::vector<double>>());
        return ThetaKernel::block_matrix(std::move(mat));
    }
    throw config_error("unknown theta kind: " + kind);
}

json theta_to_json(const ThetaKernel& t) {
    json j;
    switch (t.kind) {
        case ThetaKernel::Kind::Constant:
            j["kind"] = "constant";
            j["theta0"] = t.theta0;
            break;
        case ThetaKernel::Kind::Gaussian:
            j["kind"] = "gaussian";
            j["theta0"] = t.theta0;
            j["length"] = t.length;
            break;
        case ThetaKernel::Kind::Block:
            j["kind"] = "block";
            j["matrix"] = t.block;
            break;
    }
    return j;
}

PositionLaw positions_from_json(const json& j) {
    PositionLaw law;
    const std::string kind = j.value("kind", "uniform_box");
    if (kind == "uniform_box") {
        law.kind = PositionLaw::Kind::UniformBox;
        if (j.contains("lo")) law.lo = vec3(j["lo"]);
        if (j.contains("hi")) law.hi = vec3(j["hi"]);
    } else if (kind == "clipped_gaussian") {
        law.kind = PositionLaw::Kind::ClippedGaussian;
        if (j.contains("center")) law.center = vec3(j["center"]);
        law.stddev = j.value("stddev", 0.2);
    } else if (kind == "two_cluster") {
        law.kind = PositionLaw::Kind::TwoCluster;
        if (j.contains("center")) law.center = vec3(j["center"]);
        if (j.contains("center2")) law.center2 = vec3(j["center2"]);
        law.cluster_radius = j.value("radius", 0.1);
        law.mix_weight = j.value("mix", 0.5);
    } else if (kind == "atoms") {
        law.kind = PositionLaw::Kind::Atoms;
        for (const auto& a : j.at("atoms")) {
            Position p;
            p.r = vec3(a);
            law.atoms.push_back(p);
        }
        if (j.contains("weights")) {
            law.atom_weights = j["weights"].get<std::vector<double>>();
        } else {
            law.atom_weights.assign(law.atoms.size(), 1.0 / static_cast<double>(law.atoms.size()));
        }
    } else {
        throw config_error("unknown position law: " + kind);
    }
    return law;
}

json positions_to_json(const PositionLaw& law) {
    json j;
    switch (law.kind) {
        case PositionLaw::Kind::UniformBox:
            j["kind"] = "uniform_box";
            j["lo"] = vec3_json(law.lo);
            j["hi"] = vec3_json(law.hi);
            break;
        case PositionLaw::Kind::ClippedGaussian:
            j["kind"] = "clipped_gaussian";
            j["center"] = vec3_json(law.center);
            j["stddev"] = law.stddev;
            break;
        case PositionLaw::Kind::TwoCluster:
            j["kind"] = "two_cluster";
            j["center"] = vec3_json(law.center);
            j["center2"] = vec3_json(law.center2);
            j["radius"] = law.cluster_radius;
            j["mix"] = law.mix_weight;
            break;
        case PositionLaw::Kind::Atoms: {
            j["kind"] = "atoms";
            json atoms = json::array();
            for (const auto& a : law.atoms) atoms.push_back(vec3_json(a.r));
            j["atoms"] = atoms;
            j["weights"] = law.atom_weights;
            break;
        }
    }
    return j;
}

VoltageDensity rho0_from_json(const json& j) {
    VoltageDensity d;
    const std::string kind = j.value("kind", "uniform");
    if (kind == "uniform") {
        d.kind = VoltageDensity::Kind::Uniform;
    } else if (kind == "gauss_bump") {
        d.kind = VoltageDensity::Kind::GaussBump;
        d.center = j.value("center", 0.5);
        d.stddev = j.value("stddev", 0.2);
    } else if (kind == "piecewise") {
        d.kind = VoltageDensity::Kind::PiecewiseConst;
        d.breaks = j.at("breaks").get<std::vector<double>>();
        d.values = j.at("values").get<std::vector<double>>();
        // renormalize to unit mass
        double mass = 0.0;
        for (std::size_t i = 0; i + 1 < d.breaks.size(); ++i)
            mass += d.values[i] * (d.breaks[i + 1] - d.breaks[i]);
        if (!(mass > 0.0)) throw config_error("piecewise density has zero mass");
        for (double& v : d.values) v /= mass;
    } else {
        throw config_error("unknown rho0 kind: " + kind);
    }
    return d;
}

json rho0_to_json(const VoltageDensity& d) {
    json j;
    switch (d.kind) {
        case VoltageDensity::Kind::Uniform:
            j["kind"] = "uniform";
            break;
        case VoltageDensity::Kind::GaussBump:
            j["kind"] = "gauss_bump";
            j["center"] = d.center;
            j["stddev"] = d.stddev;
            break;
        case VoltageDensity::Kind::PiecewiseConst:
            j["kind"] = "piecewise";
            j["breaks"] = d.breaks;
            j["values"] = d.values;
            break;
    }
    return j;
}

LambdaVariant lambda_variant_from_name(const std::string& s) {
    if (s == "standard") return LambdaVariant::Standard;
    if (s == "zero") return LambdaVariant::Zero;
    if (s == "smoothed") return LambdaVariant::Smoothed;
    throw config_error("unknown lambda variant: " + s);
}

std::string lambda_variant_name(LambdaVariant v) {
    switch (v) {
        case LambdaVariant::Standard: return "standard";
        case LambdaVariant::Zero: return "zero";
        case LambdaVariant::Smoothed: return "smoothed";
    }
    return "standard";
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw config_error(std::string("config parse failure: ") + e.what());
    }

    ExperimentConfig cfg;
    try {
        cfg.study = study_from_name(j.value("study", "trajectories"));
        cfg.output_dir = j.value("output_dir", "out");
        cfg.plot = j.value("plot", false);
        cfg.threads = j.value("threads", 0);

        if (j.contains("domain")) {
            cfg.domain.lo = vec3(j["domain"].value("lo", json::array({0.0, 0.0, 0.0})));
            cfg.domain.hi = vec3(j["domain"].value("hi", json::array({1.0, 1.0, 1.0})));
        }

        const json& m = j.at("model");
        cfg.coeffs.lambda_hat = m.value("lambda_hat", 1.0);
        cfg.coeffs.epsilon = m.value("epsilon", 0.02);
        cfg.coeffs.delta = m.value("delta", 0.3);
        cfg.coeffs.horizon = m.value("horizon", 1.0);
        cfg.coeffs.lambda_variant = lambda_variant_from_name(m.value("lambda_variant", "standard"));
        cfg.coeffs.sigma.epsilon = cfg.coeffs.epsilon;
        cfg.coeffs.sigma.bump_amplitude = m.value("sigma_bump", 0.0);
        if (m.contains("theta")) cfg.coeffs.theta = theta_from_json(m["theta"]);
        if (m.contains("positions")) cfg.laws.nu = positions_from_json(m["positions"]);
        if (m.contains("rho0")) cfg.laws.rho0 = rho0_from_json(m["rho0"]);

        if (j.contains("sim")) {
            const json& s = j["sim"];
            cfg.sim.n_particles = s.value("n_particles", 100u);
            cfg.sim.dt = s.value("dt", 1e-3);
            cfg.sim.n_replicas = s.value("n_replicas", 1u);
            cfg.sim.seed = s.value("seed", 0ull);
            const std::string mode = s.value("interaction", "binned");
            if (mode == "binned")
                cfg.sim.interaction = InteractionMode::Binned;
            else if (mode == "exact")
                cfg.sim.interaction = InteractionMode::Exact;
            else
                throw config_error("unknown interaction mode: " + mode);
        }
        cfg.sim.coeffs = cfg.coeffs;
        cfg.sim.laws = cfg.laws;
        cfg.sim.domain = cfg.domain;

        if (j.contains("pde")) {
            const json& p = j["pde"];
            cfg.pde.m_atoms = p.value("m_atoms", std::size_t{100});
            cfg.pde.k_cells = p.value("k_cells", std::size_t{200});
            if (p.contains("output_times"))
                cfg.pde.output_times = p["output_times"].get<std::vector<double>>();
        }
        if (j.contains("convergence")) {
            const json& p = j["convergence"];
            if (p.contains("n_list")) cfg.convergence.n_list = p["n_list"].get<std::vector<std::uint32_t>>();
            cfg.convergence.replicas = p.value("replicas", 20u);
            if (p.contains("times")) cfg.convergence.times = p["times"].get<std::vector<double>>();
            cfg.convergence.pde_k = p.value("pde_k", std::size_t{400});
        }
        if (j.contains("energy")) {
            const json& p = j["energy"];
            if (p.contains("n_list")) cfg.energy.n_list = p["n_list"].get<std::vector<std::uint32_t>>();
            cfg.energy.replicas = p.value("replicas", 10u);
            cfg.energy.t_final = p.value("t_final", 1.0);
            cfg.energy.snapshot_dt = p.value("snapshot_dt", 0.02);
            cfg.energy.time_alpha = p.value("time_alpha", 0.1);
        }
        if (j.contains("spikes")) {
            const json& p = j["spikes"];
            cfg.spikes.replicas = p.value("replicas", 10u);
            cfg.spikes.window = p.value("window", 0.3);
            cfg.spikes.t_max = p.value("t_max", 4.0);
        }
        if (j.contains("mild")) {
            const json& p = j["mild"];
            cfg.mild.k_cells = p.value("k_cells", std::size_t{400});
            cfg.mild.m_atoms = p.value("m_atoms", std::size_t{100});
            cfg.mild.max_mode = p.value("max_mode", 4);
            if (p.contains("t_list")) cfg.mild.t_list = p["t_list"].get<std::vector<double>>();
            cfg.mild.snapshot_dt = p.value("snapshot_dt", 0.01);
        }
        if (j.contains("mkv")) {
            const json& p = j["mkv"];
            cfg.mkv.n_samples = p.value("n_samples", std::size_t{10000});
            cfg.mkv.t = p.value("t", 1.0);
            cfg.mkv.dt = p.value("dt", 1e-3);
            cfg.mkv.snapshot_dt = p.value("snapshot_dt", 0.01);
        }
        if (j.contains("euler_order")) {
            const json& p = j["euler_order"];
            cfg.euler_order.dt_coarse = p.value("dt_coarse", 0.02);
            cfg.euler_order.levels = p.value("levels", std::size_t{5});
            cfg.euler_order.replicas = p.value("replicas", 20u);
        }
    } catch (const config_error&) {
        throw;
    } catch (const std::exception& e) {
        throw config_error(std::string("config field error: ") + e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

std::string serialize_config(const ExperimentConfig& cfg) {
    json j;
    j["study"] = study_name(cfg.study);
    j["output_dir"] = cfg.output_dir;
    j["plot"] = cfg.plot;
    j["threads"] = cfg.threads;
    j["domain"] = {{"lo", vec3_json(cfg.domain.lo)}, {"hi", vec3_json(cfg.domain.hi)}};
    json m;
    m["lambda_hat"] = cfg.coeffs.lambda_hat;
    m["epsilon"] = cfg.coeffs.epsilon;
    m["delta"] = cfg.coeffs.delta;
    m["horizon"] = cfg.coeffs.horizon;
    m["lambda_variant"] = lambda_variant_name(cfg.coeffs.lambda_variant);
    m["sigma_bump"] = cfg.coeffs.sigma.bump_amplitude;
    m["theta"] = theta_to_json(cfg.coeffs.theta);
    m["positions"] = positions_to_json(cfg.laws.nu);
    m["rho0"] = rho0_to_json(cfg.laws.rho0);
    j["model"] = m;
    j["sim"] = {{"n_particles", cfg.sim.n_particles},
                {"dt", cfg.sim.dt},
                {"n_replicas", cfg.sim.n_replicas},
                {"seed", cfg.sim.seed},
                {"interaction",
                 cfg.sim.interaction == InteractionMode::Binned ? "binned" : "exact"}};
    j["pde"] = {{"m_atoms", cfg.pde.m_atoms},
                {"k_cells", cfg.pde.k_cells},
                {"output_times", cfg.pde.output_times}};
    j["convergence"] = {{"n_list", cfg.convergence.n_list},
                        {"replicas", cfg.convergence.replicas},
                        {"times", cfg.convergence.times},
                        {"pde_k", cfg.convergence.pde_k}};
    j["energy"] = {{"n_list", cfg.energy.n_list},
                   {"replicas", cfg.energy.replicas},
                   {"t_final", cfg.energy.t_final},
                   {"snapshot_dt", cfg.energy.snapshot_dt},
                   {"time_alpha", cfg.energy.time_alpha}};
    j["spikes"] = {{"replicas", cfg.spikes.replicas},
                   {"window", cfg.spikes.window},
                   {"t_max", cfg.spikes.t_max}};
    j["mild"] = {{"k_cells", cfg.mild.k_cells},
                 {"m_atoms", cfg.mild.m_atoms},
                 {"max_mode", cfg.mild.max_mode},
                 {"t_list", cfg.mild.t_list},
                 {"snapshot_dt", cfg.mild.snapshot_dt}};
    j["mkv"] = {{"n_samples", cfg.mkv.n_samples},
                {"t", cfg.mkv.t},
                {"dt", cfg.mkv.dt},
                {"snapshot_dt", cfg.mkv.snapshot_dt}};
    j["euler_order"] = {{"dt_coarse", cfg.euler_order.dt_coarse},
                        {"levels", cfg.euler_order.levels},
                        {"replicas", cfg.euler_order.replicas}};
    return j.dump(2) + "\n";
}

}  // namespace ifnet
