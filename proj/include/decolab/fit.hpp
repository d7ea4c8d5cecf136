// fit.hpp — Levenberg–Marquardt least squares and linear regression
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace decolab::fit {

// Scalar model y = f(x; p). Parameters flagged positive are optimized in log
// space, which both enforces the constraint and equalizes scales across
// decades (rates and widths here span 1e-6..1e2).
using ScalarModel = std::function<double(double, const std::vector<double>&)>;

struct LmOptions {
    int max_iterations = 400;
    double ftol = 1e-14;   // relative SSE improvement considered converged
    double step_tol = 1e-13;
    double lambda_init = 1e-3;
};

struct LmResult {
    std::vector<double> params;
    double sse = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

namespace detail {

inline std::vector<double> decode(const std::vector<double>& q, const std::vector<bool>& log_scale) {
    std::vector<double> p(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (log_scale[i]) {
            // Clamp to the finite range: a wild trial step can push q past
            // log(DBL_MIN) or log(DBL_MAX), and exp() would produce exactly
            // zero (violating the positivity the log parameterization is meant
            // to guarantee) or infinity. The clamped value is rejected on
            // merit like any other.
            p[i] = std::clamp(std::exp(q[i]), std::numeric_limits<double>::min(),
                              std::numeric_limits<double>::max());
        } else {
            p[i] = q[i];
        }
    }
    return p;
}

inline double sse_of(const ScalarModel& model, const std::vector<double>& xs,
                     const std::vector<double>& ys, const std::vector<double>& p) {
    double sse = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = model(xs[i], p) - ys[i];
        sse += r * r;
    }
    return sse;
}

}  // namespace detail

// Damped Gauss-Newton with numeric (central-difference) Jacobian in the
// transformed coordinates. Uniform weights on the raw samples.
inline LmResult levenberg_marquardt(const ScalarModel& model, const std::vector<double>& xs,
                                    const std::vector<double>& ys, std::vector<double> p0,
                                    const std::vector<bool>& log_scale,
                                    const LmOptions& opts = {}) {
    if (xs.size() != ys.size()) throw std::invalid_argument("x/y size mismatch");
    const std::size_t n_pts = xs.size();
    const std::size_t n_par = p0.size();
    if (log_scale.size() != n_par) throw std::invalid_argument("log_scale mask size mismatch");
    if (n_pts < n_par) throw std::invalid_argument("fewer samples than parameters");

    std::vector<double> q(n_par);
    for (std::size_t i = 0; i < n_par; ++i) {
        if (log_scale[i] && !(p0[i] > 0.0)) throw std::invalid_argument("positive parameter started at <= 0");
        q[i] = log_scale[i] ? std::log(p0[i]) : p0[i];
    }

    LmResult best;
    best.params = detail::decode(q, log_scale);
    best.sse = detail::sse_of(model, xs, ys, best.params);
    if (!std::isfinite(best.sse)) {
        throw std::invalid_argument("non-finite SSE at the starting point (non-finite samples?)");
    }

    Eigen::MatrixXd jac(n_pts, n_par);
    Eigen::VectorXd resid(n_pts);
    double lambda = opts.lambda_init;

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        best.iterations = iter + 1;
        const std::vector<double> p = detail::decode(q, log_scale);
        for (std::size_t i = 0; i < n_pts; ++i) resid(static_cast<Eigen::Index>(i)) = model(xs[i], p) - ys[i];

        for (std::size_t j = 0; j < n_par; ++j) {
            const double h = 1e-6 * std::max(1.0, std::abs(q[j]));
            std::vector<double> qp = q, qm = q;
            qp[j] += h;
            qm[j] -= h;
            const std::vector<double> pp = detail::decode(qp, log_scale);
            const std::vector<double> pm = detail::decode(qm, log_scale);
            for (std::size_t i = 0; i < n_pts; ++i) {
                jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    (model(xs[i], pp) - model(xs[i], pm)) / (2.0 * h);
            }
        }

        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * resid;

        bool stepped = false;
        for (int attempt = 0; attempt < 60; ++attempt) {
            Eigen::MatrixXd damped = jtj;
            for (std::size_t j = 0; j < n_par; ++j) {
                const auto jj = static_cast<Eigen::Index>(j);
                damped(jj, jj) += lambda * std::max(jtj(jj, jj), 1e-12);
            }
            const Eigen::VectorXd delta = damped.ldlt().solve(-jtr);
            if (!delta.allFinite()) {
                lambda *= 7.0;
                continue;
            }
            std::vector<double> q_try = q;
            for (std::size_t j = 0; j < n_par; ++j) q_try[j] += delta(static_cast<Eigen::Index>(j));
            const double sse_try = detail::sse_of(model, xs, ys, detail::decode(q_try, log_scale));
            if (std::isfinite(sse_try) && sse_try <= best.sse) {
                const double improvement = best.sse - sse_try;
                q = q_try;
                best.sse = sse_try;
                best.params = detail::decode(q, log_scale);
                lambda = std::max(lambda / 3.0, 1e-12);
                stepped = true;
                if (improvement <= opts.ftol * (best.sse + 1e-300) ||
                    delta.cwiseAbs().maxCoeff() <= opts.step_tol) {
                    best.converged = true;
                    return best;
                }
                break;
            }
            lambda *= 7.0;
            if (lambda > 1e14) break;
        }
        if (!stepped) {
            best.converged = true;  // damping exhausted: stationary to working precision
            return best;
        }
    }
    return best;
}

// Best-of over several initial guesses; returns the lowest-SSE converged fit,
// falling back to the lowest-SSE attempt if none formally converged.
inline LmResult multistart(const ScalarModel& model, const std::vector<double>& xs,
                           const std::vector<double>& ys,
                           const std::vector<std::vector<double>>& starts,
                           const std::vector<bool>& log_scale, const LmOptions& opts = {}) {
    if (starts.empty()) throw std::invalid_argument("no starting points provided");
    LmResult best;
    bool have = false;
    for (const auto& p0 : starts) {
        LmResult r;
        try {
            r = levenberg_marquardt(model, xs, ys, p0, log_scale, opts);
        } catch (const std::exception&) {
            continue;  // infeasible start or a model-domain failure mid-search;
                       // the remaining starts cover it
        }
        if (!have || r.sse < best.sse || (r.converged && !best.converged && r.sse <= best.sse * (1 + 1e-12))) {
            best = r;
            have = true;
        }
    }
    if (!have) throw std::runtime_error("all fit starting points were infeasible");
    return best;
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

inline LineFit linear_regression(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("need >= 2 (x, y) pairs");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("degenerate abscissae in linear regression");
    LineFit out;
    out.slope = (n * sxy - sx * sy) / denom;
    out.intercept = (sy - out.slope * sx) / n;
    const double sst = syy - sy * sy / n;
    double ssr = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (out.slope * xs[i] + out.intercept);
        ssr += r * r;
    }
    out.r_squared = sst > 0.0 ? 1.0 - ssr / sst : 1.0;
    return out;
}

// r² of data against an arbitrary already-fitted prediction.
inline double r_squared(const std::vector<double>& ys, const std::vector<double>& yhat) {
    if (ys.size() != yhat.size() || ys.empty()) throw std::invalid_argument("size mismatch");
    double mean = 0.0;
    for (const double y : ys) mean += y;
    mean /= static_cast<double>(ys.size());
    double sst = 0.0, ssr = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        sst += (ys[i] - mean) * (ys[i] - mean);
        ssr += (ys[i] - yhat[i]) * (ys[i] - yhat[i]);
    }
    return sst > 0.0 ? 1.0 - ssr / sst : 1.0;
}

}  // namespace decolab::fit
