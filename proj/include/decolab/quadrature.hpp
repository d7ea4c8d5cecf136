// quadrature.hpp — Adaptive Gauss-Kronrod integration with checked convergence
#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace decolab {

struct QuadratureOptions {
    double rel_tol = 1e-12;    // per-panel relative termination target
    unsigned max_depth = 18;   // adaptive bisection depth
    double check_factor = 1e3; // accept error estimates up to factor * target
};

class IntegrationError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Integrate f over [a, b] with a 31-point Gauss-Kronrod rule refined adaptively.
// Throws IntegrationError when the returned error estimate is far above the
// requested tolerance (the estimate itself is conservative, hence check_factor).
template <typename F>
double integrate(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
    if (a == b) return 0.0;
    double err = 0.0;
    double l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, a, b, opts.max_depth, opts.rel_tol, &err, &l1);
    const double scale = std::max(std::abs(value), l1 * 1e-6);
    if (err > opts.check_factor * opts.rel_tol * std::max(scale, 1e-300)) {
        throw IntegrationError("adaptive quadrature failed to reach requested tolerance");
    }
    return value;
}

// Integrate across a partition, splitting at interior points where the
// integrand has kinks or sharp features the adaptive rule should not straddle.
template <typename F>
double integrate_segments(F&& f, const std::vector<double>& breakpoints,
                          const QuadratureOptions& opts = {}) {
    if (breakpoints.size() < 2) throw std::invalid_argument("need at least two breakpoints");
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        total += integrate(f, breakpoints[i], breakpoints[i + 1], opts);
    }
    return total;
}

}  // namespace decolab
