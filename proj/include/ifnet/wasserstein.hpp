#pragma once

#include <span>
#include <vector>

#include "ifnet/types.hpp"

namespace ifnet {

// Probability measure on the circle [0,2): atoms plus an optional
// piecewise-constant density on a uniform grid.
struct CircleMeasure {
    std::vector<double> atom_v;   // in [0,2)
    std::vector<double> atom_w;
    std::vector<double> density;  // K cell values, cell k = [k h,(k+1) h)

    static CircleMeasure from_atoms(std::span<const double> v, std::span<const double> w);
    static CircleMeasure from_uniform_atoms(std::span<const double> v);
    static CircleMeasure from_grid(std::span<const double> cell_values);

    double total_mass() const;
};

// Exact W1 on the circle via min_s int |F - G - s|; the optimal shift is a
// weighted median of the CDF difference. Throws contract_error if either
// input deviates from unit mass by more than 1e-8.
double wasserstein1_v(const CircleMeasure& mu, const CircleMeasure& nu);

// Exact discrete optimal transport on D x T under the l1 product metric
// |x-x'| + d_T(v,v'), solved by successive-shortest-path min-cost flow.
// Throws budget_error when the combined support exceeds 4000 atoms.
double wasserstein1_joint(const WeightedAtomMeasure& mu, const WeightedAtomMeasure& nu);

}  // namespace ifnet
