// convolution.hpp — Exponential–Gaussian convolution decay: closed form,
// quadrature reference, model fitting, decoherence time, scaling regression
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "decolab/fit.hpp"
#include "decolab/quadrature.hpp"
#include "decolab/special.hpp"

namespace decolab::conv {

struct ConvolutionParams {
    double gamma = 0.0;      // exponential rate Γ (energy units)
    double sigma = 0.0;      // Gaussian bandwidth σ (energy units)
    double e_r = 0.0;        // residual oscillation frequency (prediction only)
    double amplitude = 1.0;  // scale at t = 0
};

enum class ModelKind { exponential, gaussian, convolution };

inline std::string model_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::exponential: return "exponential";
        case ModelKind::gaussian: return "gaussian";
        case ModelKind::convolution: return "convolution";
    }
    throw std::logic_error("unreachable model kind");
}

struct FitResult {
    ModelKind kind = ModelKind::exponential;
    ConvolutionParams params;  // unused fields stay zeroed
    double rms_residual = 0.0;
    double r_squared = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
};

class FitError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Normalized decay envelope r(t) of the time-domain convolution
//   ∫ dτ e^{−Γ|τ|/2} e^{−σ²(t−τ)²/2},
// scaled so r(0) = 1. Evaluated through erfcx so the growing e^{+Γt/2} factor
// never materializes:
//   r(t) = e^{−σ²t²/2} [erfcx(b₀+s) + erfcx(b₀−s)] / (2 erfcx(b₀)),
// with b₀ = Γ/(2√2σ), s = σ|t|/√2. When b₀ − s < 0 the second erfcx is
// rewritten via erfcx(−x) = 2e^{x²} − erfcx(x); the recombined exponent
// collapses to q₀ − Γ|t|/2 with q₀ = Γ²/(8σ²), which is ≤ −q₀ on that branch,
// so every exponential stays bounded. Even in t.
inline double convolution_value(double gamma, double sigma, double t) {
    if (!(sigma > 0.0)) throw std::domain_error("convolution_value: sigma must be > 0");
    if (gamma < 0.0) throw std::domain_error("convolution_value: gamma must be >= 0");
    const double at = std::abs(t);
    const double b0 = gamma / (2.0 * std::numbers::sqrt2 * sigma);
    const double s = sigma * at / std::numbers::sqrt2;
    const double bp = b0 + s;
    const double bm = b0 - s;
    const double denom = 2.0 * erfcx(b0);
    const double gauss_env = std::exp(-0.5 * sigma * sigma * at * at);
    if (bm >= 0.0) {
        return gauss_env * (erfcx(bp) + erfcx(bm)) / denom;
    }
    const double q0 = b0 * b0;
    return (gauss_env * (erfcx(bp) - erfcx(-bm)) + 2.0 * std::exp(q0 - 0.5 * gamma * at)) /
           denom;
}

// Direct adaptive quadrature of the defining integral, normalized at t = 0.
// Independent of the closed form above; serves as its oracle. The finite range
// [−T, T], T = |t| + max(20/Γ, 10/σ), truncates only where the Gaussian factor
// is below e^{−50} of its peak, far under the integration tolerance.
inline double convolution_numeric(double gamma, double sigma, double t,
                                  const QuadratureOptions& opts = {}) {
    if (!(sigma > 0.0)) throw std::domain_error("convolution_numeric: sigma must be > 0");
    if (gamma < 0.0) throw std::domain_error("convolution_numeric: gamma must be >= 0");
    const double at = std::abs(t);

    const auto integral_at = [&](double tt) {
        const double reach = std::max(gamma > 0.0 ? 20.0 / gamma : 0.0, 10.0 / sigma);
        const double hi = tt + reach;
        const double lo = -reach - tt;
        const auto integrand = [&](double tau) {
            const double d = tt - tau;
            return std::exp(-0.5 * gamma * std::abs(tau) - 0.5 * sigma * sigma * d * d);
        };
        std::vector<double> cuts{lo, 0.0, tt, hi};
        const double peak = tt - gamma / (2.0 * sigma * sigma);  // stationary point, τ > 0 wing
        if (peak > 0.0 && peak < hi) cuts.push_back(peak);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        return integrate_segments(integrand, cuts, opts);
    };
    return integral_at(at) / integral_at(0.0);
}

// Single-model envelopes used by the fitter.
inline double exponential_decay(double t, double amplitude, double gamma) {
    return amplitude * std::exp(-0.5 * gamma * std::abs(t));
}
inline double gaussian_decay(double t, double amplitude, double sigma) {
    return amplitude * std::exp(-0.5 * sigma * sigma * t * t);
}

struct FitWindowOptions {
    double floor = 1e-3;        // keep samples until |r| first drops below this
    bool fit_amplitude = false; // forced on automatically when data starts after t = 0
};

namespace detail {

// Window = prefix of the trace down to the amplitude floor. No short-time
// samples are discarded: the quadratic onset carries the Gaussian content.
inline std::size_t window_end(const std::vector<double>& values, double floor) {
    std::size_t end = values.size();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] < floor) {
            end = i;
            break;
        }
    }
    return std::max<std::size_t>(end, 2);
}

inline double crossing_time(const std::vector<double>& ts, const std::vector<double>& vs,
                            double level) {
    for (std::size_t i = 1; i < ts.size(); ++i) {
        if (vs[i - 1] >= level && vs[i] < level) {
            const double f = (vs[i - 1] - level) / (vs[i - 1] - vs[i]);
            return ts[i - 1] + f * (ts[i] - ts[i - 1]);
        }
    }
    return ts.empty() ? 0.0 : ts.back();  // window-scale fallback for initial guesses
}

}  // namespace detail

// Least-squares fit of |r(t)| samples to one of the three decay models.
// Uniform weights on the linear values; amplitude fixed to 1 unless the
// window starts after t = 0 (then it is fitted for the single-model kinds).
inline FitResult fit_model(const std::vector<double>& times, const std::vector<double>& values,
                           ModelKind kind, const FitWindowOptions& wopts = {}) {
    if (times.size() != values.size()) throw std::invalid_argument("times/values size mismatch");
    const std::size_t end = detail::window_end(values, wopts.floor);
    if (end < 20) throw FitError("fit window has fewer than 20 samples");
    const std::vector<double> ts(times.begin(), times.begin() + static_cast<long>(end));
    const std::vector<double> vs(values.begin(), values.begin() + static_cast<long>(end));
    const bool free_amp = wopts.fit_amplitude || ts.front() > 0.0;

    // Moment-based scales: the 1/e crossing sets both candidate rates.
    const double tau = std::max(detail::crossing_time(ts, vs, std::exp(-1.0)), 1e-12);
    const double gamma_hat = 2.0 / tau;
    const double sigma_hat = std::numbers::sqrt2 / tau;
    const std::vector<double> scalings{0.25, 1.0, 4.0};

    fit::ScalarModel model;
    std::vector<std::vector<double>> starts;
    std::vector<bool> log_scale;
    switch (kind) {
        case ModelKind::exponential:
            if (free_amp) {
                model = [](double t, const std::vector<double>& p) {
                    return exponential_decay(t, p[0], p[1]);
                };
                log_scale = {true, true};
                for (const double c : scalings) starts.push_back({1.0, gamma_hat * c});
            } else {
                model = [](double t, const std::vector<double>& p) {
                    return exponential_decay(t, 1.0, p[0]);
                };
                log_scale = {true};
                for (const double c : scalings) starts.push_back({gamma_hat * c});
            }
            break;
        case ModelKind::gaussian:
            if (free_amp) {
                model = [](double t, const std::vector<double>& p) {
                    return gaussian_decay(t, p[0], p[1]);
                };
                log_scale = {true, true};
                for (const double c : scalings) starts.push_back({1.0, sigma_hat * c});
            } else {
                model = [](double t, const std::vector<double>& p) {
                    return gaussian_decay(t, 1.0, p[0]);
                };
                log_scale = {true};
                for (const double c : scalings) starts.push_back({sigma_hat * c});
            }
            break;
        case ModelKind::convolution: {
            // Seed from the single-model optima so the convolution fit can
            // never do worse than either limit it contains. In this
            // parameterization σ ≫ Γ collapses to the pure exponential and
            // Γ ≫ σ to the pure Gaussian (σ → 0 or Γ → 0 alone give no decay
            // at all, so naive small-parameter corners are useless seeds).
            double gamma_seed = gamma_hat;
            double sigma_seed = sigma_hat;
            double amp_seed = 1.0;
            try {
                const FitResult ef = fit_model(times, values, ModelKind::exponential, wopts);
                gamma_seed = ef.params.gamma;
                amp_seed = ef.params.amplitude;
            } catch (const std::exception&) {
            }
            try {
                const FitResult gf = fit_model(times, values, ModelKind::gaussian, wopts);
                sigma_seed = gf.params.sigma;
            } catch (const std::exception&) {
            }
            if (free_amp) {
                model = [](double t, const std::vector<double>& p) {
                    return p[2] * convolution_value(p[0], p[1], t);
                };
                log_scale = {true, true, true};
                for (const double c : scalings) {
                    starts.push_back({gamma_hat * c, sigma_hat * c, 1.0});
                }
                starts.push_back({gamma_seed, 20.0 * gamma_seed, amp_seed});   // exponential limit
                starts.push_back({20.0 * sigma_seed, sigma_seed, amp_seed});   // Gaussian limit
                starts.push_back({gamma_seed, sigma_seed, amp_seed});
                starts.push_back({0.5 * gamma_seed, 0.5 * sigma_seed, amp_seed});
            } else {
                model = [](double t, const std::vector<double>& p) {
                    return convolution_value(p[0], p[1], t);
                };
                log_scale = {true, true};
                for (const double c : scalings) starts.push_back({gamma_hat * c, sigma_hat * c});
                starts.push_back({gamma_seed, 20.0 * gamma_seed});   // exponential limit
                starts.push_back({20.0 * sigma_seed, sigma_seed});   // Gaussian limit
                starts.push_back({gamma_seed, sigma_seed});
                starts.push_back({0.5 * gamma_seed, 0.5 * sigma_seed});
            }
            break;
        }
    }

    const fit::LmResult lm = fit::multistart(model, ts, vs, starts, log_scale);

    FitResult out;
    out.kind = kind;
    out.window_lo = ts.front();
    out.window_hi = ts.back();
    switch (kind) {
        case ModelKind::exponential:
            out.params.amplitude = free_amp ? lm.params[0] : 1.0;
            out.params.gamma = free_amp ? lm.params[1] : lm.params[0];
            break;
        case ModelKind::gaussian:
            out.params.amplitude = free_amp ? lm.params[0] : 1.0;
            out.params.sigma = free_amp ? lm.params[1] : lm.params[0];
            break;
        case ModelKind::convolution:
            out.params.gamma = lm.params[0];
            out.params.sigma = lm.params[1];
            out.params.amplitude = free_amp ? lm.params[2] : 1.0;
            break;
    }
    out.rms_residual = std::sqrt(lm.sse / static_cast<double>(ts.size()));
    std::vector<double> yhat(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) yhat[i] = model(ts[i], lm.params);
    out.r_squared = fit::r_squared(vs, yhat);
    return out;
}

class NotCrossedError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// First time |r| falls through `threshold`, by linear interpolation between the
// bracketing samples. Throws NotCrossedError when the trace never gets there.
inline double decoherence_time(const std::vector<double>& times, const std::vector<double>& values,
                               double threshold = std::exp(-1.0)) {
    if (times.size() != values.size() || times.size() < 2) {
        throw std::invalid_argument("decoherence_time: need >= 2 samples");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (values[i - 1] >= threshold && values[i] < threshold) {
            const double f = (values[i - 1] - threshold) / (values[i - 1] - values[i]);
            return times[i - 1] + f * (times[i] - times[i - 1]);
        }
    }
    throw NotCrossedError("trace does not cross threshold; extend t_max");
}

// Log-log regression of decoherence time against coupling strength.
inline fit::LineFit scaling_exponent(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 4) throw std::invalid_argument("scaling_exponent: need >= 4 points");
    std::vector<double> lx, ly;
    lx.reserve(points.size());
    ly.reserve(points.size());
    for (const auto& [coupling, tau] : points) {
        if (!(coupling > 0.0) || !(tau > 0.0)) {
            throw std::invalid_argument("scaling_exponent: inputs must be positive");
        }
        lx.push_back(std::log(coupling));
        ly.push_back(std::log(tau));
    }
    return fit::linear_regression(lx, ly);
}

}  // namespace decolab::conv
