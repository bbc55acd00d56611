#include "ifnet/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "ifnet/torus.hpp"

namespace ifnet {

CircleMeasure CircleMeasure::from_atoms(std::span<const double> v, std::span<const double> w) {
    CircleMeasure m;
    m.atom_v.assign(v.begin(), v.end());
    m.atom_w.assign(w.begin(), w.end());
    for (double& x : m.atom_v) x = mod2(x).v;
    return m;
}

CircleMeasure CircleMeasure::from_uniform_atoms(std::span<const double> v) {
    std::vector<double> w(v.size(), 1.0 / static_cast<double>(v.size()));
    return from_atoms(v, w);
}

CircleMeasure CircleMeasure::from_grid(std::span<const double> cell_values) {
    CircleMeasure m;
    m.density.assign(cell_values.begin(), cell_values.end());
    return m;
}

double CircleMeasure::total_mass() const {
    double s = 0.0;
    for (double w : atom_w) s += w;
    if (!density.empty()) {
        const double h = 2.0 / static_cast<double>(density.size());
        for (double d : density) s += d * h;
    }
    return s;
}

namespace {

struct Segment {
    double len;   // Lebesgue length
    double y0;    // psi at left end
    double y1;    // psi at right end
};

// Builds the piecewise-linear CDF difference psi = F_mu - F_nu over [0,2).
std::vector<Segment> cdf_difference(const CircleMeasure& mu, const CircleMeasure& nu) {
    struct Event {
        double v;
        double jump;    // atom mass difference at v
    };
    std::vector<Event> events;
    for (std::size_t i = 0; i < mu.atom_v.size(); ++i)
        events.push_back({mu.atom_v[i], mu.atom_w[i]});
    for (std::size_t i = 0; i < nu.atom_v.size(); ++i)
        events.push_back({nu.atom_v[i], -nu.atom_w[i]});

    std::vector<double> cuts{0.0, 2.0};
    for (const auto& e : events) cuts.push_back(e.v);
    auto add_grid_cuts = [&](const std::vector<double>& density) {
        const std::size_t k = density.size();
        for (std::size_t i = 1; i < k; ++i)
            cuts.push_back(2.0 * static_cast<double>(i) / static_cast<double>(k));
    };
    add_grid_cuts(mu.density);
    add_grid_cuts(nu.density);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.v < b.v; });

    auto cell_density = [](const std::vector<double>& density, double v) {
        if (density.empty()) return 0.0;
        const double h = 2.0 / static_cast<double>(density.size());
        auto k = static_cast<std::size_t>(v / h);
        if (k >= density.size()) k = density.size() - 1;
        return density[k];
    };

    std::vector<Segment> segs;
    segs.reserve(cuts.size());
    double psi = 0.0;
    std::size_t ev = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        while (ev < events.size() && events[ev].v <= a) psi += events[ev++].jump;
        const double slope = cell_density(mu.density, 0.5 * (a + b)) -
                             cell_density(nu.density, 0.5 * (a + b));
        const double y0 = psi;
        const double y1 = psi + slope * (b - a);
        segs.push_back({b - a, y0, y1});
        psi = y1;
    }
    return segs;
}

// Lebesgue measure of { v : psi(v) <= s }.
double measure_below(const std::vector<Segment>& segs, double s) {
    double m = 0.0;
    for (const auto& g : segs) {
        const double lo = std::min(g.y0, g.y1);
        const double hi = std::max(g.y0, g.y1);
        if (s >= hi) {
            m += g.len;
        } else if (s > lo && hi > lo) {
            m += g.len * (s - lo) / (hi - lo);
        }
    }
    return m;
}

double integral_abs_minus(const std::vector<Segment>& segs, double s) {
    double total = 0.0;
    for (const auto& g : segs) {
        const double a = g.y0 - s, b = g.y1 - s;
        if (a * b >= 0.0) {
            total += 0.5 * (std::fabs(a) + std::fabs(b)) * g.len;
        } else {
            // sign change: two triangles
            const double fa = std::fabs(a), fb = std::fabs(b);
            total += 0.5 * g.len * (fa * fa + fb * fb) / (fa + fb);
        }
    }
    return total;
}

void check_probability(const CircleMeasure& m, const char* who) {
    if (std::fabs(m.total_mass() - 1.0) > 1e-8)
        throw contract_error(std::string(who) + ": input measure not normalized");
    for (double w : m.atom_w)
        if (w < 0.0) throw contract_error(std::string(who) + ": negative atom weight");
}

}  // namespace

double wasserstein1_v(const CircleMeasure& mu, const CircleMeasure& nu) {
    check_probability(mu, "wasserstein1_v");
    check_probability(nu, "wasserstein1_v");
    const auto segs = cdf_difference(mu, nu);

    // weighted median of psi under Lebesgue measure: smallest level with
    // measure_below >= 1 (half of |T| = 2)
    std::vector<double> levels;
    levels.reserve(2 * segs.size());
    for (const auto& g : segs) {
        levels.push_back(g.y0);
        levels.push_back(g.y1);
    }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    std::size_t lo = 0, hi = levels.size() - 1;
    if (measure_below(segs, levels[lo]) >= 1.0) {
        return integral_abs_minus(segs, levels[lo]);
    }
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (measure_below(segs, levels[mid]) >= 1.0)
            hi = mid;
        else
            lo = mid;
    }
    // measure_below is linear on [levels[lo], levels[hi]]; interpolate
    const double mlo = measure_below(segs, levels[lo]);
    const double mhi = measure_below(segs, levels[hi]);
    double s = levels[hi];
    if (mhi > mlo)
        s = levels[lo] + (1.0 - mlo) / (mhi - mlo) * (levels[hi] - levels[lo]);
    s = std::clamp(s, levels[lo], levels[hi]);
    return integral_abs_minus(segs, s);
}

namespace {

// successive shortest paths with Dijkstra over reduced costs
struct MinCostTransport {
    std::size_t n, m;
    std::vector<double> supply, demand;
    std::vector<std::vector<double>> cost;  // n x m

    double solve() {
        const std::size_t total = n + m;
        std::vector<double> pot(total, 0.0);
        std::vector<double> flow_remaining_src = supply;
        std::vector<double> flow_remaining_dst = demand;
        std::vector<std::vector<double>> flow(n, std::vector<double>(m, 0.0));

        // initial potentials: pot of sinks = min arc cost (Dijkstra from
        // sources with zero potential is equivalent; costs nonnegative)
        double total_cost = 0.0;
        double remaining = 0.0;
        for (double s : flow_remaining_src) remaining += s;

        const double inf = std::numeric_limits<double>::infinity();
        while (remaining > 1e-15) {
            // Dijkstra on the residual bipartite graph
            std::vector<double> dist(total, inf);
            std::vector<int> prev(total, -1);
            std::vector<bool> done(total, false);
            using Item = std::pair<double, std::size_t>;
            std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
            for (std::size_t i = 0; i < n; ++i) {
                if (flow_remaining_src[i] > 1e-15) {
                    dist[i] = 0.0;
                    pq.push({0.0, i});
                }
            }
            while (!pq.empty()) {
                const auto [d, u] = pq.top();
                pq.pop();
                if (done[u]) continue;
                done[u] = true;
                if (u < n) {
                    for (std::size_t j = 0; j < m; ++j) {
                        const double rc = cost[u][j] + pot[u] - pot[n + j];
                        if (dist[u] + rc < dist[n + j] - 1e-18) {
                            dist[n + j] = dist[u] + rc;
                            prev[n + j] = static_cast<int>(u);
                            pq.push({dist[n + j], n + j});
                        }
                    }
                } else {
                    const std::size_t j = u - n;
                    for (std::size_t i = 0; i < n; ++i) {
                        if (flow[i][j] > 1e-15) {
                            const double rc = -cost[i][j] + pot[u] - pot[i];
                            if (dist[u] + rc < dist[i] - 1e-18) {
                                dist[i] = dist[u] + rc;
                                prev[i] = static_cast<int>(u);
                                pq.push({dist[i], i});
                            }
                        }
                    }
                }
            }

            // closest sink with unmet demand
            std::size_t best = total;
            double best_d = inf;
            for (std::size_t j = 0; j < m; ++j) {
                if (flow_remaining_dst[j] > 1e-15 && dist[n + j] < best_d) {
                    best_d = dist[n + j];
                    best = n + j;
                }
            }
            if (best == total)
                throw contract_error("wasserstein1_joint: infeasible transport instance");

            for (std::size_t u2 = 0; u2 < total; ++u2)
                if (dist[u2] < inf) pot[u2] += dist[u2];

            // bottleneck along the augmenting path
            double push = flow_remaining_dst[best - n];
            for (std::size_t u2 = best; prev[u2] != -1;) {
                const auto p = static_cast<std::size_t>(prev[u2]);
                if (u2 >= n) {
                    // forward arc p -> u2 has infinite capacity
                } else {
                    push = std::min(push, flow[u2][p - n]);
                }
                u2 = p;
            }
            {
                // source end of the path
                std::size_t u2 = best;
                while (prev[u2] != -1) u2 = static_cast<std::size_t>(prev[u2]);
                push = std::min(push, flow_remaining_src[u2]);
            }

            // apply
            {
                std::size_t u2 = best;
                while (prev[u2] != -1) {
                    const auto p = static_cast<std::size_t>(prev[u2]);
                    if (u2 >= n) {
                        flow[p][u2 - n] += push;
                        total_cost += push * cost[p][u2 - n];
                    } else {
                        flow[u2][p - n] -= push;
                        total_cost -= push * cost[u2][p - n];
                    }
                    u2 = p;
                }
                flow_remaining_src[u2] -= push;
            }
            flow_remaining_dst[best - n] -= push;
            remaining -= push;
        }
        return total_cost;
    }
};

}  // namespace

double wasserstein1_joint(const WeightedAtomMeasure& mu, const WeightedAtomMeasure& nu) {
    if (mu.size() + nu.size() > 4000)
        throw budget_error(
            "wasserstein1_joint: combined support exceeds 4000 atoms; use wasserstein1_v");
    if (std::fabs(mu.total_mass() - 1.0) > 1e-8 || std::fabs(nu.total_mass() - 1.0) > 1e-8)
        throw contract_error("wasserstein1_joint: inputs must be probability measures");

    MinCostTransport t;
    t.n = mu.size();
    t.m = nu.size();
    t.supply = mu.weights;
    t.demand = nu.weights;
    t.cost.assign(t.n, std::vector<double>(t.m, 0.0));
    for (std::size_t i = 0; i < t.n; ++i)
        for (std::size_t j = 0; j < t.m; ++j)
            t.cost[i][j] = euclid_dist(mu.positions[i], nu.positions[j]) +
                           torus_dist(mu.voltages[i], nu.voltages[j]);
    return t.solve();
}

}  // namespace ifnet
