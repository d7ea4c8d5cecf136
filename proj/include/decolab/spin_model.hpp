// spin_model.hpp — Random two-body spin-bath Hamiltonians: a diagonal
// system-bath coupling H_I and a dense all-to-all environment H_E
#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "decolab/linalg.hpp"
#include "decolab/rng.hpp"

namespace decolab::spin {

// Basis convention: computational basis index k, site i ↔ bit i (LSB = site 0);
// spin sign s_i(k) = +1 when bit i of k is 0, −1 when it is 1.
inline double spin_sign(std::uint64_t k, int site) {
    return (k >> site) & 1u ? -1.0 : 1.0;
}

struct SpinBathConfig {
    int n_spins = 12;          // environment size N; Hilbert dimension 2^N
    double lambda = 1.0;       // dimensionless system-environment coupling λ
    std::uint64_t seed = 1;    // identical (n_spins, seed) → bit-identical draws
    bool axis_x = true;        // include σ^x σ^x environment couplings
    bool axis_y = true;
    bool axis_z = true;
};

inline void validate(const SpinBathConfig& config) {
    if (config.n_spins < 1) throw std::invalid_argument("n_spins must be >= 1");
    if (config.n_spins > 24) {
        throw std::length_error("n_spins too large for a dense 2^N-dimensional operator");
    }
    if (config.lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
}

inline std::size_t dimension(const SpinBathConfig& config) {
    return std::size_t{1} << config.n_spins;
}

namespace detail {

// Fixed draw order: a_1..a_N, then b^x pairs row-major (i<j), then b^y, b^z.
// All three axis blocks are always drawn so that excluding an axis does not
// shift the remaining couplings; excluded blocks are then zeroed.
struct Couplings {
    std::vector<double> a;
    std::array<std::vector<double>, 3> b;  // [0]=x, [1]=y, [2]=z
};

inline Couplings draw_couplings(const SpinBathConfig& config) {
    const int n = config.n_spins;
    const std::size_t n_pairs = static_cast<std::size_t>(n) * (n - 1) / 2;
    NormalSampler normal(config.seed);
    Couplings c;
    c.a.resize(static_cast<std::size_t>(n));
    for (auto& v : c.a) v = normal();
    const std::array<bool, 3> keep{config.axis_x, config.axis_y, config.axis_z};
    for (int axis = 0; axis < 3; ++axis) {
        c.b[axis].resize(n_pairs);
        for (auto& v : c.b[axis]) v = normal();
        if (!keep[axis]) c.b[axis].assign(n_pairs, 0.0);
    }
    return c;
}

inline std::size_t pair_index(int i, int j, int n) {
    // Row-major over ordered pairs i<j.
    return static_cast<std::size_t>(i) * n - static_cast<std::size_t>(i) * (i + 1) / 2 +
           static_cast<std::size_t>(j - i - 1);
}

}  // namespace detail

// Diagonal of H_I = Σ_i a_i σ^z_i: entry k is the signed coupling sum Σ a_i s_i(k).
inline Vector interaction_diagonal(const std::vector<double>& a, int n_spins) {
    const std::size_t dim = std::size_t{1} << n_spins;
    Vector d(static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < dim; ++k) {
        double sum = 0.0;
        for (int i = 0; i < n_spins; ++i) sum += a[static_cast<std::size_t>(i)] * spin_sign(k, i);
        d(static_cast<Eigen::Index>(k)) = sum;
    }
    return d;
}

enum class PairConvention {
    ordered,          // Σ_{i<j}, one coefficient per pair (the model's convention)
    symmetric_double  // Σ_{i≠j} with b_ji = b_ij; rescales the spectrum by exactly 2
};

// Dense H_E = Σ_α Σ b^α_ij σ^α_i σ^α_j. Same-axis two-site Pauli strings are
// real in this basis (σ^y_i σ^y_j |k⟩ = −s_i s_j |k ⊕ e_i ⊕ e_j⟩), so H_E is
// real symmetric.
inline Matrix environment_matrix(const std::array<std::vector<double>, 3>& b, int n_spins,
                                 PairConvention convention = PairConvention::ordered) {
    const std::size_t dim = std::size_t{1} << n_spins;
    Matrix h = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    const double factor = convention == PairConvention::symmetric_double ? 2.0 : 1.0;
    for (int i = 0; i < n_spins; ++i) {
        for (int j = i + 1; j < n_spins; ++j) {
            const std::size_t p = detail::pair_index(i, j, n_spins);
            const double bx = factor * b[0][p];
            const double by = factor * b[1][p];
            const double bz = factor * b[2][p];
            const std::uint64_t mask = (std::uint64_t{1} << i) | (std::uint64_t{1} << j);
            for (std::size_t k = 0; k < dim; ++k) {
                const double ss = spin_sign(k, i) * spin_sign(k, j);
                h(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) += bz * ss;
                const std::size_t m = k ^ mask;
                if (m > k) {
                    const double off = bx - by * ss;  // σ^x σ^x + σ^y σ^y contributions
                    h(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) += off;
                    h(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m)) += off;
                }
            }
        }
    }
    return h;
}

struct SpinBathModel {
    SpinBathConfig config;
    std::vector<double> a;                  // single-site couplings a_i
    std::array<std::vector<double>, 3> b;   // pair couplings b^α_ij, ordered i<j
    Vector h_int_diag;                      // diagonal of H_I (length 2^N)
    Matrix h_env;                           // dense H_E (2^N × 2^N, real symmetric)
};

inline SpinBathModel build_model(const SpinBathConfig& config) {
    validate(config);
    SpinBathModel model;
    model.config = config;
    auto couplings = detail::draw_couplings(config);
    model.a = std::move(couplings.a);
    model.b = std::move(couplings.b);
    model.h_int_diag = interaction_diagonal(model.a, config.n_spins);
    if (config.n_spins >= 2) {
        model.h_env = environment_matrix(model.b, config.n_spins);
    } else {
        model.h_env = Matrix::Zero(2, 2);  // N=1 has no pairs: H_E ≡ 0
    }
    return model;
}

// H_I diagonal straight from a config (a-draws come first in the stream, so
// this matches build_model on the same seed).
inline Vector build_interaction(const SpinBathConfig& config) {
    validate(config);
    const auto couplings = detail::draw_couplings(config);
    return interaction_diagonal(couplings.a, config.n_spins);
}

inline Matrix build_environment(const SpinBathConfig& config,
                                PairConvention convention = PairConvention::ordered) {
    validate(config);
    if (config.n_spins < 2) return Matrix::Zero(2, 2);
    const auto couplings = detail::draw_couplings(config);
    return environment_matrix(couplings.b, config.n_spins, convention);
}

// H_± = H_E ± λ H_I.
inline Matrix build_perturbed(const SpinBathModel& model, int sign) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
    Matrix h = model.h_env;
    const double scale = sign * model.config.lambda;
    for (Eigen::Index k = 0; k < model.h_int_diag.size(); ++k) {
        h(k, k) += scale * model.h_int_diag(k);
    }
    return h;
}

// Exact-replay export: {"n_spins", "seed", "a":[...], "b":{"x":[[i,j,v],...],...}}.
inline nlohmann::json couplings_to_json(const SpinBathModel& model) {
    nlohmann::json j;
    j["n_spins"] = model.config.n_spins;
    j["seed"] = model.config.seed;
    j["a"] = model.a;
    const char* axis_names[3] = {"x", "y", "z"};
    for (int axis = 0; axis < 3; ++axis) {
        auto arr = nlohmann::json::array();
        for (int i = 0; i < model.config.n_spins; ++i) {
            for (int jj = i + 1; jj < model.config.n_spins; ++jj) {
                arr.push_back({i, jj, model.b[axis][detail::pair_index(i, jj, model.config.n_spins)]});
            }
        }
        j["b"][axis_names[axis]] = arr;
    }
    return j;
}

inline SpinBathModel model_from_json(const nlohmann::json& j, double lambda = 1.0) {
    SpinBathModel model;
    model.config.n_spins = j.at("n_spins").get<int>();
    model.config.lambda = lambda;
    model.config.seed = j.at("seed").get<std::uint64_t>();
    validate(model.config);
    model.a = j.at("a").get<std::vector<double>>();
    if (model.a.size() != static_cast<std::size_t>(model.config.n_spins)) {
        throw std::invalid_argument("coupling vector a has wrong length");
    }
    const std::size_t n_pairs =
        static_cast<std::size_t>(model.config.n_spins) * (model.config.n_spins - 1) / 2;
    const char* axis_names[3] = {"x", "y", "z"};
    for (int axis = 0; axis < 3; ++axis) {
        model.b[axis].assign(n_pairs, 0.0);
        for (const auto& entry : j.at("b").at(axis_names[axis])) {
            const int i = entry.at(0).get<int>();
            const int jj = entry.at(1).get<int>();
            if (i < 0 || jj <= i || jj >= model.config.n_spins) {
                throw std::invalid_argument("pair index out of range in couplings JSON");
            }
            model.b[axis][detail::pair_index(i, jj, model.config.n_spins)] =
                entry.at(2).get<double>();
        }
    }
    model.h_int_diag = interaction_diagonal(model.a, model.config.n_spins);
    model.h_env = model.config.n_spins >= 2
                      ? environment_matrix(model.b, model.config.n_spins)
                      : Matrix::Zero(2, 2);
    return model;
}

}  // namespace decolab::spin
