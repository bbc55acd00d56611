#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ifnet {

// Thrown for malformed experiment configuration; CLI maps it to exit code 2.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a numerical contract is violated at runtime (unnormalized
// measure, CFL breach, ...); CLI maps it to exit code 3.
struct contract_error : std::runtime_error {
    explicit contract_error(const std::string& what) : std::runtime_error(what) {}
};

// Exact-OT support budget exceeded; callers should fall back to the
// v-marginal distance.
struct budget_error : contract_error {
    explicit budget_error(const std::string& what) : contract_error(what) {}
};

// Voltage on the torus [0,2) with 0 == 2. Construct through mod2() so the
// canonical-range invariant holds everywhere.
struct TorusPoint {
    double v = 0.0;
};

// Neuron location in D subset of R^3. `tag` is the index into an explicit
// atom list when the position was drawn from one (-1 otherwise); block
// interaction kernels are defined through tags.
struct Position {
    std::array<double, 3> r{0.0, 0.0, 0.0};
    std::int32_t tag = -1;
};

inline double euclid_dist(const Position& a, const Position& b) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double d = a.r[i] - b.r[i];
        s += d * d;
    }
    return std::sqrt(s);
}

// Axis-aligned bounding box used as the domain D.
struct DomainBox {
    std::array<double, 3> lo{0.0, 0.0, 0.0};
    std::array<double, 3> hi{1.0, 1.0, 1.0};

    bool contains(const Position& p) const {
        for (int i = 0; i < 3; ++i)
            if (p.r[i] < lo[i] || p.r[i] > hi[i]) return false;
        return true;
    }
};

// Finitely supported probability measure on D x T.
struct WeightedAtomMeasure {
    std::vector<Position> positions;
    std::vector<TorusPoint> voltages;
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
    double total_mass() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }
};

// The PDE unknown: M position atoms with weights, each carrying a
// conditional density of v on a uniform K-cell grid over [0,2).
// rho is row-major M x K; row m integrates to 1 (midpoint rule).
struct ConditionalGridDensity {
    std::vector<Position> positions;
    std::vector<double> weights;
    std::size_t k_cells = 0;
    std::vector<double> rho;
    double time = 0.0;

    double h() const { return 2.0 / static_cast<double>(k_cells); }
    double cell_center(std::size_t k) const { return (static_cast<double>(k) + 0.5) * h(); }
    const double* row(std::size_t m) const { return rho.data() + m * k_cells; }
    double* row(std::size_t m) { return rho.data() + m * k_cells; }
    std::size_t n_atoms() const { return positions.size(); }

    // mass of row m under the midpoint rule
    double row_mass(std::size_t m) const {
        double s = 0.0;
        const double* r = row(m);
        for (std::size_t k = 0; k < k_cells; ++k) s += r[k];
        return s * h();
    }
};

}  // namespace ifnet
