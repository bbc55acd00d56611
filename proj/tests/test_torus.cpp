#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ifnet/rng.hpp"
#include "ifnet/torus.hpp"

using namespace ifnet;

TEST_CASE("mod2 canonicalization") {
    CHECK(mod2(3.5).v == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(mod2(-0.3).v == doctest::Approx(1.7).epsilon(1e-15));
    CHECK(mod2(0.0).v == 0.0);
    CHECK(mod2(2.0).v == 0.0);
    CHECK(mod2(-4.0).v == 0.0);
    CHECK_THROWS_AS(mod2(std::nan("")), std::domain_error);
    CHECK_THROWS_AS(mod2(std::numeric_limits<double>::infinity()), std::domain_error);
}

TEST_CASE("mod2 idempotent on random inputs") {
    StreamRng rng(1, StreamClass::Scenario, 0, 0);
    for (int i = 0; i < 1000; ++i) {
        const double x = (rng.uniform() - 0.5) * 1e6;
        const TorusPoint p = mod2(x);
        CHECK(p.v >= 0.0);
        CHECK(p.v < 2.0);
        CHECK(mod2(p.v).v == p.v);
    }
}

TEST_CASE("torus_dist examples") {
    CHECK(torus_dist(TorusPoint{0.1}, TorusPoint{1.9}) == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(torus_dist(TorusPoint{0.5}, TorusPoint{1.5}) == doctest::Approx(1.0));
    CHECK(torus_dist(TorusPoint{0.77}, TorusPoint{0.77}) == 0.0);
}

TEST_CASE("torus_dist is a metric") {
    StreamRng rng(2, StreamClass::Scenario, 0, 0);
    for (int i = 0; i < 10000; ++i) {
        const TorusPoint a = mod2(2.0 * rng.uniform());
        const TorusPoint b = mod2(2.0 * rng.uniform());
        const TorusPoint c = mod2(2.0 * rng.uniform());
        const double dab = torus_dist(a, b);
        CHECK(dab >= 0.0);
        CHECK(dab <= 1.0);
        CHECK(dab == torus_dist(b, a));
        CHECK(torus_dist(a, c) <= dab + torus_dist(b, c) + 1e-14);
    }
    CHECK(torus_dist(TorusPoint{0.3}, TorusPoint{0.3}) == 0.0);
}

TEST_CASE("mollifier support and normalization") {
    MollifierFamily unit(1.0);
    // zero outside radius alpha/2
    CHECK(unit.eval(mod2(0.6)) == 0.0);   // d_T = 0.6 >= 0.5
    CHECK(unit.eval(mod2(0.5)) == 0.0);   // boundary exactly
    CHECK(unit.eval(mod2(0.49)) > 0.0);
    CHECK(unit.eval(mod2(2.0 - 0.49)) > 0.0);  // symmetric across the wrap

    // independent composite-Simpson oracle for the mass, on both scales
    for (double alpha : {1.0, 0.1}) {
        MollifierFamily fam(alpha);
        const int n = 200000;
        const double h = 2.0 / n;
        double mass = 0.0;
        for (int i = 0; i < n; ++i) {
            const double a = i * h, m = (i + 0.5) * h, b = (i + 1) * h;
            mass += (h / 6.0) *
                    (fam.eval(mod2(a)) + 4.0 * fam.eval(mod2(m)) + fam.eval(mod2(b)));
        }
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("mollifier derivative bound |g'(w) w| <= C g(w) on a sampled grid") {
    MollifierFamily fam(1.0);
    double worst_ratio = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double w = -1.0 + 2.0 * (i + 0.5) / 10000.0;
        const double g = fam.eval(mod2(w));
        if (g <= 1e-300) continue;
        const double ratio = std::fabs(fam.deriv(mod2(w)) * w) / g;
        worst_ratio = std::max(worst_ratio, ratio);
    }
    CHECK(std::isfinite(worst_ratio));
    CHECK(worst_ratio <= 1e6);
}

TEST_CASE("mollifier segment integrals agree with quadrature") {
    MollifierFamily fam(0.25);
    // integral over a cell near the center vs Simpson
    const double lo = 1.95, hi = 2.05, center = 0.0;  // wraps through 0
    const int n = 20000;
    double ref = 0.0;
    for (int i = 0; i < n; ++i) {
        const double a = lo + (hi - lo) * i / n;
        const double b = lo + (hi - lo) * (i + 1) / n;
        const double m = 0.5 * (a + b);
        ref += (b - a) / 6.0 *
               (fam.eval(mod2(a - center)) + 4.0 * fam.eval(mod2(m - center)) +
                fam.eval(mod2(b - center)));
    }
    CHECK(fam.segment_integral(lo, hi, center) == doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("mollifier_scale_for") {
    CHECK(mollifier_scale_for(1000) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(mollifier_scale_for(1) == 1.0);
    CHECK(mollifier_scale_for(8) == doctest::Approx(0.5).epsilon(1e-15));
    StreamRng rng(3, StreamClass::Scenario, 0, 0);
    for (int i = 0; i < 200; ++i) {
        const auto n = static_cast<std::uint64_t>(1 + rng.uniform() * 1e7);
        const double a = mollifier_scale_for(n);
        CHECK(1.0 / (a * a * a) <= static_cast<double>(n));
        CHECK(a <= 1.0);
    }
}
