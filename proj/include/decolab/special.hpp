// special.hpp — Scaled complementary error function and small numeric helpers
#pragma once

#include <cmath>
#include <limits>
#include <numbers>

namespace decolab {

// erfcx(x) = exp(x^2) * erfc(x), evaluated without overflow for large |x|.
//
// Regimes:
//   x >= 12   : asymptotic series 1/(x*sqrt(pi)) * sum_k (-1)^k (2k-1)!! / (2x^2)^k,
//               truncated when terms drop below machine epsilon (well before the
//               series turns divergent at k ~ x^2).
//   0 <= x<12 : direct product exp(x^2)*erfc(x); both factors are representable
//               (x^2 <= 144, erfc(12) ~ 1.4e-64) and the product is O(1/x).
//   x < 0     : reflection erfcx(x) = 2*exp(x^2) - erfcx(-x); exp(x^2) overflows
//               for x < -26.6 and we return +inf, which is the correct limit.
namespace detail {
inline double erfcx_nonneg(double x) {
    constexpr double inv_sqrt_pi = std::numbers::inv_sqrtpi;
    if (x >= 12.0) {
        const double half_inv_x2 = 0.5 / (x * x);
        double term = 1.0;
        double sum = 1.0;
        for (int k = 1; k < 40; ++k) {
            term *= -(2 * k - 1) * half_inv_x2;
            sum += term;
            if (std::abs(term) < std::numeric_limits<double>::epsilon() * std::abs(sum)) break;
        }
        return inv_sqrt_pi * sum / x;
    }
    return std::exp(x * x) * std::erfc(x);
}
}  // namespace detail

inline double erfcx(double x) {
    if (std::isnan(x)) return x;
    if (x >= 0.0) return detail::erfcx_nonneg(x);
    // Negative argument: 2*exp(x^2) dominates rapidly.
    const double x2 = x * x;
    if (x2 > 700.0) return std::numeric_limits<double>::infinity();
    return 2.0 * std::exp(x2) - detail::erfcx_nonneg(-x);
}

// Relative difference |a-b| / max(|a|, |b|, floor); floor guards the zero case.
inline double rel_diff(double a, double b, double floor = 1e-300) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace decolab
