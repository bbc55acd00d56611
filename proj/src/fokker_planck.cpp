#include "ifnet/fokker_planck.hpp"

#include <algorithm>
#include <cmath>

namespace ifnet {

ConditionalGridDensity discretize_initial(const InitialLaws& laws, const DomainBox& domain,
                                          std::size_t m_atoms, std::size_t k_cells,
                                          std::uint64_t seed) {
    if (m_atoms < 1 || k_cells < 2) throw config_error("discretize_initial: M, K too small");
    laws.rho0.validate();
    laws.nu.validate(domain);

    ConditionalGridDensity st;
    st.k_cells = k_cells;
    st.time = 0.0;
    if (laws.nu.kind == PositionLaw::Kind::Atoms) {
        st.positions = laws.nu.atoms;
        for (std::size_t i = 0; i < st.positions.size(); ++i)
            st.positions[i].tag = static_cast<std::int32_t>(i);
        st.weights = laws.nu.atom_weights;
    } else {
        st.positions.resize(m_atoms);
        st.weights.assign(m_atoms, 1.0 / static_cast<double>(m_atoms));
        for (std::size_t m = 0; m < m_atoms; ++m) {
            StreamRng rng(seed, StreamClass::PdeAtoms, 0, static_cast<std::uint32_t>(m));
            st.positions[m] = laws.nu.sample(rng, domain);
        }
    }

    const std::size_t m_total = st.positions.size();
    const double h = st.h();
    std::vector<double> row(k_cells);
    double mass = 0.0;
    for (std::size_t k = 0; k < k_cells; ++k) {
        row[k] = laws.rho0.integral(k * h, (k + 1) * h) / h;
        mass += row[k] * h;
    }
    for (double& x : row) x /= mass;  // absorb quadrature residue
    st.rho.resize(m_total * k_cells);
    for (std::size_t m = 0; m < m_total; ++m)
        std::copy(row.begin(), row.end(), st.row(m));
    return st;
}

double fp_max_dt(const ConditionalGridDensity& state, const ModelCoefficients& c) {
    const double h = state.h();
    const double smax = c.sigma.max();
    const double bmax = c.drift_bound();
    double dt = 0.4 * h * h / (smax * smax);
    if (bmax > 0.0) dt = std::min(dt, 0.4 * h / bmax);
    return dt;
}

namespace {

// step-invariant face/cell tables shared by all rows
struct RowStepTables {
    std::size_t k_cells;
    double h;
    std::vector<double> lambda_face;      // lambda2 at face (k+1) h
    std::vector<std::uint8_t> face_gated; // indicator 1_{[0,1]}(face)
    std::vector<double> d_cell;           // sigma^2/2 at cell centers

    RowStepTables(std::size_t k, const ModelCoefficients& c)
        : k_cells(k), h(2.0 / static_cast<double>(k)), lambda_face(k), face_gated(k), d_cell(k) {
        for (std::size_t i = 0; i < k; ++i) {
            const TorusPoint face = mod2((static_cast<double>(i) + 1.0) * h);
            lambda_face[i] = lambda2(face, c);
            face_gated[i] = face.v <= 1.0 ? 1 : 0;
            const double s = sigma2(TorusPoint{(static_cast<double>(i) + 0.5) * h}, c);
            d_cell[i] = 0.5 * s * s;
        }
    }
};

void row_step_kernel(const double* rho_in, double* rho_out, double dt, double interaction,
                     const RowStepTables& t) {
    const std::size_t n = t.k_cells;
    const double h = t.h;
    auto flux = [&](std::size_t k) {
        const std::size_t kp = (k + 1) % n;
        const double b = t.lambda_face[k] + (t.face_gated[k] ? interaction : 0.0);
        const double adv = b >= 0.0 ? b * rho_in[k] : b * rho_in[kp];
        const double grad = (t.d_cell[kp] * rho_in[kp] - t.d_cell[k] * rho_in[k]) / h;
        return adv - grad;
    };
    const double f_wrap = flux(n - 1);  // face between cells n-1 and 0
    double f_prev = f_wrap;
    for (std::size_t k = 0; k < n; ++k) {
        const double f_next = (k + 1 == n) ? f_wrap : flux(k);
        rho_out[k] = rho_in[k] - dt / h * (f_next - f_prev);
        f_prev = f_next;
    }
}

}  // namespace

void fp_row_step(const double* rho_in, double* rho_out, std::size_t k_cells, double dt,
                 double interaction, const ModelCoefficients& c) {
    const RowStepTables tables(k_cells, c);
    row_step_kernel(rho_in, rho_out, dt, interaction, tables);
}

namespace {

// interaction coefficients I_m = sum_m' p_m' theta(x_m, x_m') F_m'
std::vector<double> interaction_coefficients(const ConditionalGridDensity& st,
                                             const ModelCoefficients& c) {
    const auto fm = firing_masses(st, c.delta);
    const std::size_t m_total = st.n_atoms();
    std::vector<double> out(m_total, 0.0);
    if (c.theta.kind == ThetaKernel::Kind::Constant) {
        double total = 0.0;
        for (std::size_t m = 0; m < m_total; ++m) total += st.weights[m] * fm[m];
        const double val = c.theta.theta0 * total;
        std::fill(out.begin(), out.end(), val);
        return out;
    }
    for (std::size_t m = 0; m < m_total; ++m) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m_total; ++j)
            acc += st.weights[j] * c.theta.eval(st.positions[m], st.positions[j]) * fm[j];
        out[m] = acc;
    }
    return out;
}

void fp_step_impl(ConditionalGridDensity& state, double dt, const ModelCoefficients& c,
                  bool parallel, const RowStepTables& tables) {
    if (dt > fp_max_dt(state, c) * (1.0 + 1e-9))
        throw contract_error("fp_step: dt violates the CFL bound");
    const auto inter = interaction_coefficients(state, c);
    const std::size_t m_total = state.n_atoms();
    const std::size_t k_cells = state.k_cells;
    std::vector<double> next(state.rho.size());
#pragma omp parallel for schedule(static) if (parallel && m_total > 1)
    for (std::int64_t m = 0; m < static_cast<std::int64_t>(m_total); ++m) {
        row_step_kernel(state.row(static_cast<std::size_t>(m)),
                        next.data() + static_cast<std::size_t>(m) * k_cells, dt,
                        inter[static_cast<std::size_t>(m)], tables);
    }
    state.rho.swap(next);
    state.time += dt;
}

}  // namespace

void fp_step(ConditionalGridDensity& state, double dt, const ModelCoefficients& c,
             bool parallel) {
    const RowStepTables tables(state.k_cells, c);
    fp_step_impl(state, dt, c, parallel, tables);
}

void fp_step_reference(ConditionalGridDensity& state, double dt, const ModelCoefficients& c) {
    const RowStepTables tables(state.k_cells, c);
    fp_step_impl(state, dt, c, false, tables);
}

std::vector<ConditionalGridDensity> fp_solve(const ConditionalGridDensity& initial, double t_final,
                                             const ModelCoefficients& c,
                                             std::span<const double> output_times,
                                             bool parallel) {
    ConditionalGridDensity st = initial;
    const double dt0 = fp_max_dt(st, c);
    const RowStepTables tables(st.k_cells, c);
    std::vector<ConditionalGridDensity> out;
    out.reserve(output_times.size());
    double t_prev = st.time;
    for (double t : output_times) {
        if (t > t_final + 1e-12) throw config_error("fp_solve: output time beyond t_final");
        const double gap = t - t_prev;
        if (gap < -1e-12) throw config_error("fp_solve: output times must be nondecreasing");
        if (gap > 1e-14) {
            const auto steps = static_cast<std::size_t>(std::ceil(gap / dt0 - 1e-12));
            const double dt = gap / static_cast<double>(steps);
            for (std::size_t s = 0; s < steps; ++s) fp_step_impl(st, dt, c, parallel, tables);
        }
        st.time = t;
        out.push_back(st);
        t_prev = t;
    }
    return out;
}

std::vector<double> v_marginal(const ConditionalGridDensity& state) {
    std::vector<double> out(state.k_cells, 0.0);
    for (std::size_t m = 0; m < state.n_atoms(); ++m) {
        const double* r = state.row(m);
        for (std::size_t k = 0; k < state.k_cells; ++k) out[k] += state.weights[m] * r[k];
    }
    return out;
}

double pair_measure(const ConditionalGridDensity& state, const TestFunction& phi) {
    const double h = state.h();
    double s = 0.0;
    for (std::size_t m = 0; m < state.n_atoms(); ++m) {
        const double* r = state.row(m);
        double row_sum = 0.0;
        for (std::size_t k = 0; k < state.k_cells; ++k)
            row_sum += r[k] * phi.ev(state.cell_center(k));
        s += state.weights[m] * phi.a(state.positions[m]) * row_sum * h;
    }
    return s;
}

double pair_measure(const WeightedAtomMeasure& meas, const TestFunction& phi) {
    double s = 0.0;
    for (std::size_t i = 0; i < meas.size(); ++i)
        s += meas.weights[i] * phi.eval(meas.positions[i], meas.voltages[i].v);
    return s;
}

Semigroup::Semigroup(std::size_t k_cells, const ModelCoefficients& c) : k_(k_cells) {
    diffusion_.resize(k_);
    const double h = 2.0 / static_cast<double>(k_);
    for (std::size_t k = 0; k < k_; ++k) {
        const double s = sigma2(TorusPoint{(static_cast<double>(k) + 0.5) * h}, c);
        diffusion_[k] = 0.5 * s * s;
    }
}

namespace {

// Solves (I - c_k delta^2) u = rhs with periodic wrap via Sherman-Morrison
// over the standard tridiagonal algorithm.
void cyclic_solve(std::span<const double> a_coeff, std::vector<double>& rhs) {
    const std::size_t n = rhs.size();
    std::vector<double> diag(n), sub(n), sup(n);
    for (std::size_t i = 0; i < n; ++i) {
        diag[i] = 1.0 + 2.0 * a_coeff[i];
        sub[i] = -a_coeff[i];
        sup[i] = -a_coeff[i];
    }
    // corner entries sub[0] (to n-1) and sup[n-1] (to 0)
    const double alpha = sub[0], beta = sup[n - 1];
    const double gamma = -diag[0];
    std::vector<double> d2(n, 0.0);
    d2[0] = gamma;
    d2[n - 1] = alpha;

    auto thomas = [&](std::vector<double>& b, double d0_shift, double dn_shift) {
        std::vector<double> cp(n), dp(n);
        double m0 = diag[0] + d0_shift;
        cp[0] = sup[0] / m0;
        dp[0] = b[0] / m0;
        for (std::size_t i = 1; i < n; ++i) {
            const double di = diag[i] + (i == n - 1 ? dn_shift : 0.0);
            const double m = di - sub[i] * cp[i - 1];
            cp[i] = sup[i] / m;
            dp[i] = (b[i] - sub[i] * dp[i - 1]) / m;
        }
        b[n - 1] = dp[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) b[i] = dp[i] - cp[i] * b[i + 1];
    };

    std::vector<double> y = rhs;
    thomas(y, -gamma, -alpha * beta / gamma);
    std::vector<double> z = d2;
    thomas(z, -gamma, -alpha * beta / gamma);
    const double fact = (y[0] + beta * y[n - 1] / gamma) /
                        (1.0 + z[0] + beta * z[n - 1] / gamma);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = y[i] - fact * z[i];
}

}  // namespace

void Semigroup::step(std::vector<double>& u, double dt, SemigroupScheme scheme) const {
    const double h = 2.0 / static_cast<double>(k_);
    const double w = scheme == SemigroupScheme::CrankNicolson ? 0.5 : 1.0;
    std::vector<double> a_coeff(k_), rhs(k_);
    for (std::size_t k = 0; k < k_; ++k) a_coeff[k] = w * dt * diffusion_[k] / (h * h);
    if (scheme == SemigroupScheme::CrankNicolson) {
        for (std::size_t k = 0; k < k_; ++k) {
            const std::size_t kp = (k + 1) % k_;
            const std::size_t km = (k + k_ - 1) % k_;
            rhs[k] = u[k] + a_coeff[k] * (u[kp] - 2.0 * u[k] + u[km]);
        }
    } else {
        rhs = u;
    }
    cyclic_solve(a_coeff, rhs);
    u = rhs;
}

std::vector<double> Semigroup::apply(std::span<const double> phi, double t,
                                     SemigroupScheme scheme, double dt_max) const {
    std::vector<double> u(phi.begin(), phi.end());
    if (t <= 0.0) return u;
    const auto steps = static_cast<std::size_t>(std::ceil(t / dt_max - 1e-12));
    const double dt = t / static_cast<double>(steps);
    for (std::size_t s = 0; s < steps; ++s) step(u, dt, scheme);
    return u;
}

std::vector<double> grid_derivative(std::span<const double> u) {
    const std::size_t n = u.size();
    const double h = 2.0 / static_cast<double>(n);
    std::vector<double> d(n);
    for (std::size_t k = 0; k < n; ++k)
        d[k] = (u[(k + 1) % n] - u[(k + n - 1) % n]) / (2.0 * h);
    return d;
}

namespace {

// <mu, g(v) * b_row(v)> for a grid measure, g given at cell centers
double pair_rows_with_drift(const ConditionalGridDensity& st, const ModelCoefficients& c,
                            std::span<const double> g, const TestFunction& phi) {
    const auto inter = interaction_coefficients(st, c);
    const double h = st.h();
    double total = 0.0;
    for (std::size_t m = 0; m < st.n_atoms(); ++m) {
        const double* r = st.row(m);
        double row_sum = 0.0;
        for (std::size_t k = 0; k < st.k_cells; ++k) {
            const double v = st.cell_center(k);
            double b = lambda2(TorusPoint{v}, c);
            if (v <= 1.0) b += inter[m];
            row_sum += r[k] * b * g[k];
        }
        total += st.weights[m] * phi.a(st.positions[m]) * row_sum * h;
    }
    return total;
}

}  // namespace

double mild_residual(std::span<const ConditionalGridDensity> path, const TestFunction& phi,
                     double t, const ModelCoefficients& c) {
    if (path.empty()) throw config_error("mild_residual: empty path");
    // locate t in the stored path
    std::size_t j_end = path.size();
    for (std::size_t j = 0; j < path.size(); ++j) {
        if (std::fabs(path[j].time - t) < 1e-9) {
            j_end = j;
            break;
        }
    }
    if (j_end == path.size()) throw config_error("mild_residual: t not on the stored path");
    if (t == 0.0) return 0.0;

    const std::size_t k_cells = path[0].k_cells;
    const Semigroup sg(k_cells, c);
    std::vector<double> phi_grid(k_cells);
    for (std::size_t k = 0; k < k_cells; ++k) phi_grid[k] = phi.ev(path[0].cell_center(k));

    // cache T_{g Delta} phi walking the gaps from 0 to t
    std::vector<std::vector<double>> tphi(j_end + 1);
    tphi[0] = phi_grid;
    for (std::size_t g = 1; g <= j_end; ++g) {
        tphi[g] = tphi[g - 1];
        const double gap = path[g].time - path[g - 1].time;
        const auto sub = static_cast<std::size_t>(std::ceil(gap / 1e-3 - 1e-12));
        const double dt = gap / static_cast<double>(sub);
        for (std::size_t s = 0; s < sub; ++s) sg.step(tphi[g], dt, SemigroupScheme::CrankNicolson);
    }

    // trapezoid of <mu_s, b(mu_s) d_v T_{t-s} phi> over s = path times
    double integral = 0.0;
    double prev_val = 0.0;
    for (std::size_t j = 0; j <= j_end; ++j) {
        const auto dtphi = grid_derivative(tphi[j_end - j]);
        const double val = pair_rows_with_drift(path[j], c, dtphi, phi);
        if (j > 0) integral += 0.5 * (val + prev_val) * (path[j].time - path[j - 1].time);
        prev_val = val;
    }

    const double lhs = pair_measure(path[j_end], phi);
    // <mu_0, T_t phi>
    const double h = path[0].h();
    double init_term = 0.0;
    for (std::size_t m = 0; m < path[0].n_atoms(); ++m) {
        const double* r = path[0].row(m);
        double row_sum = 0.0;
        for (std::size_t k = 0; k < k_cells; ++k) row_sum += r[k] * tphi[j_end][k];
        init_term += path[0].weights[m] * phi.a(path[0].positions[m]) * row_sum * h;
    }
    return std::fabs(lhs - init_term - integral);
}

double weak_residual_phi(std::span<const ConditionalGridDensity> path, const TestFunction& phi,
                         const ModelCoefficients& c) {
    if (path.size() < 2) throw config_error("weak_residual_phi: need at least two snapshots");
    const std::size_t k_cells = path[0].k_cells;
    std::vector<double> dphi(k_cells), ddphi_halfsig(k_cells);
    for (std::size_t k = 0; k < k_cells; ++k) {
        const double v = path[0].cell_center(k);
        dphi[k] = phi.dev(v);
        const double s = sigma2(TorusPoint{v}, c);
        ddphi_halfsig[k] = 0.5 * s * s * phi.ddev(v);
    }

    const double base = pair_measure(path[0], phi);
    double sup = 0.0;
    double integral = 0.0;
    double prev_drift = pair_rows_with_drift(path[0], c, dphi, phi);
    double prev_diff = 0.0;
    {
        const double h = path[0].h();
        for (std::size_t m = 0; m < path[0].n_atoms(); ++m) {
            const double* r = path[0].row(m);
            double rs = 0.0;
            for (std::size_t k = 0; k < k_cells; ++k) rs += r[k] * ddphi_halfsig[k];
            prev_diff += path[0].weights[m] * phi.a(path[0].positions[m]) * rs * h;
        }
    }
    for (std::size_t j = 1; j < path.size(); ++j) {
        const double drift = pair_rows_with_drift(path[j], c, dphi, phi);
        double diff = 0.0;
        const double h = path[j].h();
        for (std::size_t m = 0; m < path[j].n_atoms(); ++m) {
            const double* r = path[j].row(m);
            double rs = 0.0;
            for (std::size_t k = 0; k < k_cells; ++k) rs += r[k] * ddphi_halfsig[k];
            diff += path[j].weights[m] * phi.a(path[j].positions[m]) * rs * h;
        }
        const double gap = path[j].time - path[j - 1].time;
        integral += 0.5 * (drift + prev_drift + diff + prev_diff) * gap;
        prev_drift = drift;
        prev_diff = diff;
        const double r = std::fabs(pair_measure(path[j], phi) - base - integral);
        sup = std::max(sup, std::min(r, 1.0));
    }
    return sup;
}

namespace {

double atom_drift_pairing(const WeightedAtomMeasure& s, const TestFunction& phi,
                          const ModelCoefficients& c) {
    // firing set in index order
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double v = s.voltages[i].v;
        double b = lambda2(s.voltages[i], c);
        if (v <= 1.0) {
            double inter = 0.0;
            for (std::size_t j = 0; j < s.size(); ++j) {
                const double w = s.voltages[j].v;
                if (w >= 1.0 && w <= 1.0 + c.delta)
                    inter += s.weights[j] * c.theta.eval(s.positions[i], s.positions[j]);
            }
            b += inter;
        }
        total += s.weights[i] * b * phi.dv(s.positions[i], v);
    }
    return total;
}

double atom_diffusion_pairing(const WeightedAtomMeasure& s, const TestFunction& phi,
                              const ModelCoefficients& c) {
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double sig = sigma2(s.voltages[i], c);
        total += s.weights[i] * 0.5 * sig * sig * phi.dvv(s.positions[i], s.voltages[i].v);
    }
    return total;
}

}  // namespace

double weak_residual_phi(std::span<const WeightedAtomMeasure> path, std::span<const double> times,
                         const TestFunction& phi, const ModelCoefficients& c) {
    if (path.size() != times.size() || path.size() < 2)
        throw config_error("weak_residual_phi: path/times mismatch");
    const double base = pair_measure(path[0], phi);
    double sup = 0.0;
    double integral = 0.0;
    double prev = atom_drift_pairing(path[0], phi, c) + atom_diffusion_pairing(path[0], phi, c);
    for (std::size_t j = 1; j < path.size(); ++j) {
        const double cur = atom_drift_pairing(path[j], phi, c) +
                           atom_diffusion_pairing(path[j], phi, c);
        integral += 0.5 * (cur + prev) * (times[j] - times[j - 1]);
        prev = cur;
        const double r = std::fabs(pair_measure(path[j], phi) - base - integral);
        sup = std::max(sup, std::min(r, 1.0));
    }
    return sup;
}

}  // namespace ifnet
