#pragma once

#include <cstdint>

#include "ifnet/types.hpp"

namespace ifnet {

// Canonical representative of x mod 2 in [0,2). Total on finite inputs,
// throws std::domain_error otherwise.
TorusPoint mod2(double x);

// Representative of a in (-1,1].
double torus_repr(TorusPoint a);

// Geodesic metric on T = R/2Z; values in [0,1].
double torus_dist(TorusPoint a, TorusPoint b);

// Scale alpha_N = N^{-1/3}, nudged up by ulps if rounding ever breaks
// alpha^{-3} <= N.
double mollifier_scale_for(std::uint64_t n_particles);

// The compactly supported smooth bump
//   gamma(w) = c * exp(-1/(1/4 - w^2)) * (1/4 - w^2)^2   for |w| < 1/2
// normalized to unit mass on T, rescaled as gamma_alpha(v) =
// alpha^{-1} gamma(alpha^{-1} v) with the argument taken in (-1,1].
class MollifierFamily {
  public:
    explicit MollifierFamily(double alpha);

    double alpha() const { return alpha_; }

    // gamma_alpha at v; zero when torus_dist(v,0) >= alpha/2.
    double eval(TorusPoint v) const;

    // d/dv gamma_alpha at the representative of v.
    double deriv(TorusPoint v) const;

    // Integral of gamma_alpha(. - center) over the arc [lo, hi] (lo <= hi,
    // hi - lo <= 2), exact to the resolution of the cached antiderivative
    // table (~1e-12).
    double segment_integral(double lo, double hi, double center) const;

    // Normalization constant c of the unit-scale bump.
    static double normalization();

  private:
    double alpha_;
};

}  // namespace ifnet
