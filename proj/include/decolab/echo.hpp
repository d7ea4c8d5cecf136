// echo.hpp — Exact decoherence factor r(t) of the central spin from the two
// perturbed propagators, thermal averaging, and the effective-generator check
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "decolab/convolution.hpp"
#include "decolab/linalg.hpp"
#include "decolab/spectral.hpp"
#include "decolab/spin_model.hpp"

namespace decolab::echo {

struct InitialEnvironmentState {
    enum class Kind { eigenstate, thermal };
    Kind kind = Kind::eigenstate;
    Eigen::Index index = 0;   // eigenstate only
    double energy = 0.0;      // cached E_n (eigenstate only)
    double beta = 0.0;        // thermal only; β ≥ 0

    static InitialEnvironmentState eigenstate(Eigen::Index n, double e_n) {
        return {Kind::eigenstate, n, e_n, 0.0};
    }
    static InitialEnvironmentState thermal(double beta) {
        if (beta < 0.0) throw std::invalid_argument("thermal state needs beta >= 0");
        return {Kind::thermal, 0, 0.0, beta};
    }
    std::string describe() const {
        return kind == Kind::eigenstate ? "eigenstate n=" + std::to_string(index)
                                        : "thermal beta=" + std::to_string(beta);
    }
};

struct TraceMetadata {
    double lambda = 0.0;
    int n_spins = 0;
    std::uint64_t seed = 0;
    std::string initial;
    double skipped_mass = 0.0;  // thermal: Boltzmann weight below the cutoff
};

struct DecoherenceTrace {
    std::vector<double> times;
    ComplexVector values;
    TraceMetadata metadata;
};

// Either exploit the spin-flip symmetry (one perturbed eigensolve) or solve
// both propagators independently; the two must agree and are cross-checked in
// the property tests.
enum class EchoRoute { parity, generic };

namespace detail {

// Global spin flip P = ⊗σ^x maps |k⟩ to its bit complement. It commutes with
// the pair couplings and anticommutes with the diagonal coupling, so
// H_− = P H_+ P and one eigensolve serves both propagators.
inline std::size_t flipped_index(std::size_t k, std::size_t dim) { return (dim - 1) ^ k; }

inline Vector apply_spin_flip(const Vector& v) {
    const auto dim = static_cast<std::size_t>(v.size());
    Vector out(v.size());
    for (std::size_t k = 0; k < dim; ++k) {
        out(static_cast<Eigen::Index>(k)) =
            v(static_cast<Eigen::Index>(flipped_index(k, dim)));
    }
    return out;
}

inline Matrix flip_rows(const Matrix& m) {
    const auto dim = static_cast<std::size_t>(m.rows());
    Matrix out(m.rows(), m.cols());
    for (std::size_t k = 0; k < dim; ++k) {
        out.row(static_cast<Eigen::Index>(k)) =
            m.row(static_cast<Eigen::Index>(flipped_index(k, dim)));
    }
    return out;
}

// Phase planes cos(E_a t_i) and sin(E_a t_i) scaled by per-row coefficients:
// the building block for batching e^{−iHt}|ψ⟩ over many times as two real
// matrix products.
inline void phase_planes(const Vector& energies, const Vector& coeffs,
                         const std::vector<double>& times, Matrix& cos_plane,
                         Matrix& sin_plane) {
    const auto dim = energies.size();
    const auto n_t = static_cast<Eigen::Index>(times.size());
    cos_plane.resize(dim, n_t);
    sin_plane.resize(dim, n_t);
    for (Eigen::Index i = 0; i < n_t; ++i) {
        const double t = times[static_cast<std::size_t>(i)];
        for (Eigen::Index a = 0; a < dim; ++a) {
            const double phase = energies(a) * t;
            cos_plane(a, i) = std::cos(phase) * coeffs(a);
            sin_plane(a, i) = -std::sin(phase) * coeffs(a);
        }
    }
}

// Columns of e^{−iHt}|ψ⟩ for every t, as separate real and imaginary planes.
inline void propagate_columns(const spectral::SpectralDecomposition& dec, const Vector& psi,
                              const std::vector<double>& times, Matrix& real_part,
                              Matrix& imag_part) {
    const Vector coeffs = dec.eigenvectors.transpose() * psi;
    Matrix cos_plane, sin_plane;
    phase_planes(dec.eigenvalues, coeffs, times, cos_plane, sin_plane);
    gemm(dec.eigenvectors, false, cos_plane, false, real_part);
    gemm(dec.eigenvectors, false, sin_plane, false, imag_part);
}

inline void validate_times(const std::vector<double>& times) {
    if (times.empty()) throw std::invalid_argument("times must be non-empty");
    if (times.front() != 0.0) throw std::invalid_argument("times must start at 0");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (times[i] <= times[i - 1]) throw std::invalid_argument("times must be ascending");
    }
}

}  // namespace detail

// r(t) = ⟨n| e^{i(H_E+λH_I)t} e^{−i(H_E−λH_I)t} |n⟩ for an eigenstate |n⟩ of
// H_E, evaluated exactly from the eigendecompositions of H_± = H_E ± λH_I.
// `env` must be the decomposition of model.h_env (shared across couplings for
// a fixed seed).
inline DecoherenceTrace decoherence_factor(const spin::SpinBathModel& model,
                                           const spectral::SpectralDecomposition& env,
                                           Eigen::Index n, const std::vector<double>& times,
                                           EchoRoute route = EchoRoute::parity) {
    detail::validate_times(times);
    const Eigen::Index dim = env.eigenvalues.size();
    if (model.h_env.rows() != dim) throw std::invalid_argument("env decomposition mismatch");
    if (n < 0 || n >= dim) throw std::invalid_argument("eigenstate index out of range");

    const Vector u_n = env.eigenvectors.col(n);
    const auto plus = spectral::diagonalize(spin::build_perturbed(model, +1));

    Matrix x_re, x_im, y_re, y_im;
    detail::propagate_columns(plus, u_n, times, x_re, x_im);
    if (route == EchoRoute::parity) {
        // e^{−iH_−t}|n⟩ = P e^{−iH_+t} P |n⟩
        Matrix yp_re, yp_im;
        detail::propagate_columns(plus, detail::apply_spin_flip(u_n), times, yp_re, yp_im);
        y_re = detail::flip_rows(yp_re);
        y_im = detail::flip_rows(yp_im);
    } else {
        const auto minus = spectral::diagonalize(spin::build_perturbed(model, -1));
        detail::propagate_columns(minus, u_n, times, y_re, y_im);
    }

    DecoherenceTrace trace;
    trace.times = times;
    trace.values.resize(static_cast<Eigen::Index>(times.size()));
    for (Eigen::Index i = 0; i < trace.values.size(); ++i) {
        if (times[static_cast<std::size_t>(i)] == 0.0) {
            trace.values(i) = 1.0;  // unitarity: the echo closes exactly
            continue;
        }
        // r = x†y with x = xr + i·xi, y = yr + i·yi
        const double re = x_re.col(i).dot(y_re.col(i)) + x_im.col(i).dot(y_im.col(i));
        const double im = x_re.col(i).dot(y_im.col(i)) - x_im.col(i).dot(y_re.col(i));
        trace.values(i) = {re, im};
    }
    trace.metadata = {model.config.lambda, model.config.n_spins, model.config.seed,
                      InitialEnvironmentState::eigenstate(n, env.eigenvalues(n)).describe(),
                      0.0};
    return trace;
}

inline DecoherenceTrace decoherence_factor(const spin::SpinBathModel& model, Eigen::Index n,
                                           const std::vector<double>& times,
                                           EchoRoute route = EchoRoute::parity) {
    return decoherence_factor(model, spectral::diagonalize(model.h_env), n, times, route);
}

// Boltzmann average Σ_n p_n r_n(t) over the H_E eigenbasis. Uses the spin-flip
// identity to express everything in the H_+ eigenbasis:
//   r(t) = Σ_{ab} Z_ab e^{i(E_a−E_b)t},  Z = G ∘ (Gρ')ᵀ,
// with G the flip operator and ρ' the initial density matrix, both rotated
// into that basis. Cost is independent of how many eigenstates carry weight.
inline DecoherenceTrace thermal_decoherence_factor(const spin::SpinBathModel& model, double beta,
                                                   const std::vector<double>& times) {
    detail::validate_times(times);
    if (beta < 0.0) throw std::invalid_argument("beta must be >= 0");
    const auto env = spectral::diagonalize(model.h_env);
    const Eigen::Index dim = env.eigenvalues.size();

    // Overflow-guarded Boltzmann weights: subtract the max exponent.
    Vector p(dim);
    const double e_min = env.eigenvalues.minCoeff();
    for (Eigen::Index k = 0; k < dim; ++k) p(k) = std::exp(-beta * (env.eigenvalues(k) - e_min));
    p /= p.sum();

    constexpr double weight_floor = 1e-12;
    double kept_mass = 0.0;
    std::vector<Eigen::Index> kept;
    for (Eigen::Index k = 0; k < dim; ++k) {
        if (p(k) >= weight_floor) {
            kept.push_back(k);
            kept_mass += p(k);
        }
    }

    const auto plus = spectral::diagonalize(spin::build_perturbed(model, +1));

    // ρ' = Σ_{kept} p_n (U₊ᵀu_n)(U₊ᵀu_n)ᵀ, assembled as A·Aᵀ with √p-scaled columns.
    Matrix basis(dim, static_cast<Eigen::Index>(kept.size()));
    for (std::size_t c = 0; c < kept.size(); ++c) {
        basis.col(static_cast<Eigen::Index>(c)) =
            env.eigenvectors.col(kept[c]) * std::sqrt(p(kept[c]));
    }
    Matrix a;
    gemm(plus.eigenvectors, true, basis, false, a);
    Matrix rho;
    gemm(a, false, a, true, rho);

    Matrix g;
    {
        const Matrix flipped = detail::flip_rows(plus.eigenvectors);
        gemm(plus.eigenvectors, true, flipped, false, g);
    }
    Matrix k_mat;
    gemm(g, false, rho, false, k_mat);
    const Matrix z = g.cwiseProduct(k_mat.transpose());

    // Batched bilinear forms: y(t) = Z·conj(c(t)), r(t) = c(t)ᵀ y(t) with
    // c(t)_a = e^{iE_a t}.
    const Vector ones = Vector::Ones(dim);
    Matrix cos_plane, sin_plane;
    detail::phase_planes(plus.eigenvalues, ones, times, cos_plane, sin_plane);
    sin_plane = -sin_plane;  // sin(E_a t) with the physical sign
    Matrix z_cos, z_sin;
    gemm(z, false, cos_plane, false, z_cos);
    gemm(z, false, sin_plane, false, z_sin);

    DecoherenceTrace trace;
    trace.times = times;
    trace.values.resize(static_cast<Eigen::Index>(times.size()));
    for (Eigen::Index i = 0; i < trace.values.size(); ++i) {
        const double re =
            cos_plane.col(i).dot(z_cos.col(i)) + sin_plane.col(i).dot(z_sin.col(i));
        const double im =
            sin_plane.col(i).dot(z_cos.col(i)) - cos_plane.col(i).dot(z_sin.col(i));
        trace.values(i) = {re, im};
    }
    trace.metadata = {model.config.lambda, model.config.n_spins, model.config.seed,
                      InitialEnvironmentState::thermal(beta).describe(), 1.0 - kept_mass};
    return trace;
}

// Relative deviation of the echo generator from its first-order form:
// ‖log M(t) − 2iλt·H_I‖_F / ‖2iλt·H_I‖_F with M(t) = e^{iH_+t} e^{−iH_−t}.
// The principal logarithm comes from a Schur form (M is unitary, hence
// normal); eigenphases at the branch cut raise a range error.
inline double echo_generator_residual(const spin::SpinBathModel& model, double lambda, double t) {
    const Eigen::Index dim = model.h_env.rows();
    if (dim > 1024) {
        throw std::invalid_argument("echo_generator_residual: dense logarithm limited to dim <= 1024");
    }
    const double scale = 2.0 * lambda * t * model.h_int_diag.norm();
    if (scale == 0.0) {
        throw std::invalid_argument("echo_generator_residual: lambda and t must be nonzero");
    }

    Matrix h = model.h_env;
    h.diagonal() += lambda * model.h_int_diag;
    const auto plus = spectral::diagonalize(h);
    h.diagonal() -= 2.0 * lambda * model.h_int_diag;
    const auto minus = spectral::diagonalize(h);

    // Principal-branch identification of log M needs every eigenphase inside
    // (−π, π); beyond this spectral bound the logarithm is ambiguous.
    const double phase_bound =
        std::abs(t) * (plus.eigenvalues.cwiseAbs().maxCoeff() +
                       minus.eigenvalues.cwiseAbs().maxCoeff());
    if (phase_bound >= std::numbers::pi) {
        throw std::range_error("echo_generator_residual: time too large for the principal branch");
    }

    const auto propagator = [dim](const spectral::SpectralDecomposition& dec, double angle_sign,
                                  double time) {
        ComplexVector phases(dim);
        for (Eigen::Index k = 0; k < dim; ++k) {
            phases(k) = std::polar(1.0, angle_sign * dec.eigenvalues(k) * time);
        }
        const ComplexMatrix u = dec.eigenvectors.cast<std::complex<double>>();
        return ComplexMatrix(u * phases.asDiagonal() * u.transpose());
    };
    ComplexMatrix m = propagator(plus, +1.0, t) * propagator(minus, -1.0, t);

    ComplexMatrix q;
    schur_inplace(m, q);  // m ← triangular factor T
    ComplexVector log_eigs(dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        const double arg = std::arg(m(k, k));
        if (std::abs(arg) > std::numbers::pi * (1.0 - 1e-9)) {
            throw std::range_error("echo_generator_residual: eigenphase at the branch cut");
        }
        log_eigs(k) = std::log(m(k, k));
    }
    ComplexMatrix log_m = q * log_eigs.asDiagonal() * q.adjoint();
    log_m.diagonal() -=
        model.h_int_diag.cast<std::complex<double>>() * std::complex<double>(0.0, 2.0 * lambda * t);
    return log_m.norm() / scale;
}

// Default sampling grid: `n_points` uniform times over [0, t_max] with t_max
// where the predicted exponential–Gaussian envelope falls to `floor`.
inline std::vector<double> default_time_grid(double gamma_predicted, double sigma,
                                             std::size_t n_points = 400, double floor = 0.01) {
    if (!(sigma > 0.0) || gamma_predicted < 0.0) {
        throw std::invalid_argument("default_time_grid: need sigma > 0 and gamma >= 0");
    }
    if (n_points < 2) throw std::invalid_argument("default_time_grid: need >= 2 points");
    double hi = 1.0 / sigma;
    while (conv::convolution_value(gamma_predicted, sigma, hi) > floor) {
        hi *= 2.0;
        if (!std::isfinite(hi)) {
            // Happens only when the envelope cannot reach the floor, e.g. a
            // zero decay rate where the convolution is identically 1.
            throw std::domain_error("default_time_grid: envelope never falls below the floor");
        }
    }
    double lo = 0.0;
    for (int iter = 0; iter < 80; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (conv::convolution_value(gamma_predicted, sigma, mid) > floor ? lo : hi) = mid;
    }
    std::vector<double> times(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        times[i] = hi * static_cast<double>(i) / static_cast<double>(n_points - 1);
    }
    times[0] = 0.0;
    return times;
}

}  // namespace decolab::echo
