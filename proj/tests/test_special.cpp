// Tests for the scaled complementary error function.
#include <catch2/catch.hpp>

#include <cmath>
#include <limits>

#include "decolab/quadrature.hpp"
#include "decolab/special.hpp"

using decolab::erfcx;
using decolab::rel_diff;

// Independent oracle: erfcx(x) = (2/√π) ∫₀^∞ e^{−t² − 2xt} dt, valid for all x.
static double erfcx_by_quadrature(double x) {
    const auto f = [x](double t) { return std::exp(-t * t - 2.0 * x * t); };
    // Integrand support: e^{−2xt} shrinks it for x > 0; e^{−t²} always caps it.
    const double hi = x >= 0.0 ? std::min(40.0, 10.0 + 40.0 / (1.0 + x)) : 40.0;
    return 2.0 / std::sqrt(std::acos(-1.0)) * decolab::integrate(f, 0.0, hi);
}

TEST_CASE("erfcx matches its defining integral", "[special]") {
    for (const double x : {0.0, 0.3, 1.0, 2.5, 7.0, 11.9, 12.1, 16.0, 25.0, 60.0, -0.5, -2.0}) {
        const double ref = erfcx_by_quadrature(x);
        REQUIRE(rel_diff(erfcx(x), ref) < 1e-11);
    }
}

TEST_CASE("erfcx agrees with direct product where erfc is representable", "[special]") {
    // Crosses the series/direct switch at x = 12.
    for (double x = 0.0; x <= 26.0; x += 0.25) {
        const double direct = std::exp(x * x) * std::erfc(x);
        REQUIRE(rel_diff(erfcx(x), direct) < 2e-13);
    }
    for (double x = -5.0; x < 0.0; x += 0.25) {
        const double direct = std::exp(x * x) * std::erfc(x);
        REQUIRE(rel_diff(erfcx(x), direct) < 2e-13);
    }
}

TEST_CASE("erfcx special points and limits", "[special]") {
    REQUIRE(erfcx(0.0) == Approx(1.0).epsilon(1e-15));
    // Deep negative arguments overflow to +inf by design.
    REQUIRE(std::isinf(erfcx(-27.0)));
    // Large-x asymptote ~ 1/(x√π).
    const double x = 1e6;
    REQUIRE(rel_diff(erfcx(x), 1.0 / (x * std::sqrt(std::acos(-1.0)))) < 1e-10);
    // Monotone decreasing.
    double prev = erfcx(-3.0);
    for (double v = -2.75; v < 20.0; v += 0.25) {
        const double cur = erfcx(v);
        REQUIRE(cur < prev);
        prev = cur;
    }
}
