#include "ifnet/mckean_vlasov.hpp"

#include <algorithm>
#include <cmath>

namespace ifnet {

MkvResult mkv_simulate(std::span<const ConditionalGridDensity> mu_path,
                       const ModelCoefficients& coeffs, const VoltageDensity& rho0,
                       std::size_t n_samples, std::uint64_t seed, double dt,
                       std::span<const double> output_times, bool parallel) {
    if (mu_path.empty()) throw config_error("mkv_simulate: empty driving path");
    if (n_samples < 1) throw config_error("mkv_simulate: need n_samples >= 1");
    const double t_max = mu_path.back().time;
    for (double t : output_times)
        if (t > t_max + 1e-12)
            throw std::out_of_range("mkv_simulate: requested time beyond driving path");

    // interaction coefficient per (snapshot, atom): sum_m' p theta F
    const std::size_t m_atoms = mu_path.front().n_atoms();
    std::vector<std::vector<double>> drive(mu_path.size(), std::vector<double>(m_atoms, 0.0));
    for (std::size_t j = 0; j < mu_path.size(); ++j) {
        const auto& st = mu_path[j];
        const auto fm = firing_masses(st, coeffs.delta);
        if (coeffs.theta.kind == ThetaKernel::Kind::Constant) {
            double tot = 0.0;
            for (std::size_t m = 0; m < m_atoms; ++m) tot += st.weights[m] * fm[m];
            std::fill(drive[j].begin(), drive[j].end(), coeffs.theta.theta0 * tot);
        } else {
            for (std::size_t m = 0; m < m_atoms; ++m) {
                double acc = 0.0;
                for (std::size_t q = 0; q < m_atoms; ++q)
                    acc += st.weights[q] * coeffs.theta.eval(st.positions[m], st.positions[q]) *
                           fm[q];
                drive[j][m] = acc;
            }
        }
    }
    std::vector<double> snap_times(mu_path.size());
    for (std::size_t j = 0; j < mu_path.size(); ++j) snap_times[j] = mu_path[j].time;

    // cumulative atom weights for the categorical position draw
    std::vector<double> cum(m_atoms);
    double acc = 0.0;
    for (std::size_t m = 0; m < m_atoms; ++m) {
        acc += mu_path.front().weights[m];
        cum[m] = acc;
    }

    MkvResult out;
    out.times.assign(output_times.begin(), output_times.end());
    out.samples.assign(output_times.size(), std::vector<MkvSample>(n_samples));

#pragma omp parallel for schedule(static) if (parallel && n_samples > 256)
    for (std::int64_t ss = 0; ss < static_cast<std::int64_t>(n_samples); ++ss) {
        const auto s = static_cast<std::uint32_t>(ss);
        StreamRng sel(seed, StreamClass::MkvSelect, 0, s);
        const double u = sel.uniform();
        std::size_t m = static_cast<std::size_t>(
            std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
        if (m >= m_atoms) m = m_atoms - 1;
        const Position x = mu_path.front().positions[m];

        StreamRng volt(seed, StreamClass::InitVoltage, 0, s);
        double v = mod2(rho0.sample(volt)).v;

        std::size_t snap = 0;
        std::size_t out_idx = 0;
        std::uint64_t step = 0;
        double t = 0.0;
        auto record_due = [&]() {
            while (out_idx < out.times.size() && t >= out.times[out_idx] - 1e-12) {
                out.samples[out_idx][static_cast<std::size_t>(s)] = {x, mod2(v).v};
                ++out_idx;
            }
        };
        record_due();
        while (out_idx < out.times.size()) {
            while (snap + 1 < snap_times.size() && snap_times[snap + 1] <= t + 1e-12) ++snap;
            const TorusPoint vb = mod2(v);
            double b = lambda2(vb, coeffs);
            if (vb.v <= 1.0) b += drive[snap][m];
            const double z = step_normal(seed, 0, s, step);
            v = euler_update(v, b, sigma2(vb, coeffs), dt, z);
            ++step;
            t = static_cast<double>(step) * dt;
            record_due();
        }
    }
    return out;
}

}  // namespace ifnet
