#include "ifnet/torus.hpp"

#include <cmath>
#include <mutex>
#include <vector>

namespace ifnet {

TorusPoint mod2(double x) {
    if (!std::isfinite(x)) throw std::domain_error("mod2: non-finite input");
    double r = std::fmod(x, 2.0);
    if (r < 0.0) r += 2.0;
    if (r >= 2.0) r = 0.0;  // fmod rounding can land exactly on 2
    return TorusPoint{r};
}

double torus_repr(TorusPoint a) {
    return a.v > 1.0 ? a.v - 2.0 : a.v;
}

double torus_dist(TorusPoint a, TorusPoint b) {
    const double d = std::fabs(a.v - b.v);
    return d > 1.0 ? 2.0 - d : d;
}

double mollifier_scale_for(std::uint64_t n_particles) {
    if (n_particles == 0) throw config_error("mollifier_scale_for: N must be >= 1");
    const double n = static_cast<double>(n_particles);
    double a = 1.0 / std::cbrt(n);
    while (1.0 / (a * a * a) > n) a = std::nextafter(a, 2.0);
    return a;
}

namespace {

// unnormalized bump on (-1/2, 1/2)
double bump_raw(double w) {
    const double q = 0.25 - w * w;
    if (q <= 0.0) return 0.0;
    return std::exp(-1.0 / q) * q * q;
}

// gamma' / c at w (analytic)
double bump_raw_deriv(double w) {
    const double q = 0.25 - w * w;
    if (q <= 0.0) return 0.0;
    // d/dw [exp(-1/q) q^2] = exp(-1/q) * q' * (1 + 2q), q' = -2w
    return std::exp(-1.0 / q) * (-2.0 * w) * (1.0 + 2.0 * q);
}

struct BumpTable {
    std::vector<double> cdf;  // antiderivative of the normalized bump at knots
    double c = 0.0;           // normalization constant
    static constexpr int kKnots = 200001;
    static constexpr double kLo = -0.5;
    static constexpr double kStep = 1.0 / (kKnots - 1);

    BumpTable() {
        // composite Simpson prefix integral over [-1/2, 1/2]
        cdf.assign(kKnots, 0.0);
        double acc = 0.0;
        for (int i = 1; i < kKnots; ++i) {
            const double a = kLo + (i - 1) * kStep;
            const double b = kLo + i * kStep;
            const double m = 0.5 * (a + b);
            acc += (kStep / 6.0) * (bump_raw(a) + 4.0 * bump_raw(m) + bump_raw(b));
            cdf[i] = acc;
        }
        c = 1.0 / acc;
        for (double& x : cdf) x *= c;
    }

    // integral of the normalized unit-scale bump over (-1/2, w]
    double prefix(double w) const {
        if (w <= kLo) return 0.0;
        if (w >= 0.5) return 1.0;
        const double t = (w - kLo) / kStep;
        const int i = static_cast<int>(t);
        const double f = t - i;
        return cdf[i] + f * (cdf[i + 1] - cdf[i]);
    }
};

const BumpTable& bump_table() {
    static const BumpTable table;
    return table;
}

}  // namespace

MollifierFamily::MollifierFamily(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw config_error("MollifierFamily: alpha must be in (0,1]");
}

double MollifierFamily::eval(TorusPoint v) const {
    const double w = torus_repr(v) / alpha_;
    return bump_table().c * bump_raw(w) / alpha_;
}

double MollifierFamily::deriv(TorusPoint v) const {
    const double w = torus_repr(v) / alpha_;
    return bump_table().c * bump_raw_deriv(w) / (alpha_ * alpha_);
}

double MollifierFamily::segment_integral(double lo, double hi, double center) const {
    if (hi < lo || hi - lo > 2.0)
        throw contract_error("segment_integral: require lo <= hi <= lo + 2");
    // shift so the kernel sits at 0, map endpoints to representatives
    const double a = torus_repr(mod2(lo - center));
    const double len = hi - lo;
    double b = a + len;
    const BumpTable& tab = bump_table();
    if (b <= 1.0) return tab.prefix(b / alpha_) - tab.prefix(a / alpha_);
    // interval wraps past the representative cut at +1: split at 1 ~ -1
    double s = tab.prefix(0.5) - tab.prefix(a / alpha_);  // [a, 1) part (support ends at 1/2)
    b -= 2.0;
    s += tab.prefix(b / alpha_);  // (-1, b] part
    return s;
}

double MollifierFamily::normalization() {
    return bump_table().c;
}

}  // namespace ifnet
