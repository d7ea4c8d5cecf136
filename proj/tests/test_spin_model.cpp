#include <catch2/catch.hpp>

#include <complex>

#include "decolab/spectral.hpp"
#include "decolab/spin_model.hpp"

using namespace decolab;
using spin::SpinBathConfig;

namespace {

// Dense two-site Pauli-string oracle: site 0 is the least significant bit, so
// the composite matrix for (op1 on site 1, op0 on site 0) is op1 ⊗ op0.
using C2 = Eigen::Matrix2cd;
using C4 = Eigen::Matrix4cd;

C4 kron2(const C2& hi, const C2& lo) {
    C4 out;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) out.block<2, 2>(2 * r, 2 * c) = hi(r, c) * lo;
    return out;
}

const std::complex<double> I{0.0, 1.0};

C2 pauli(int axis) {
    C2 m;
    switch (axis) {
        case 0: m << 0, 1, 1, 0; break;
        case 1: m << 0, -I, I, 0; break;
        default: m << 1, 0, 0, -1; break;
    }
    return m;
}

}  // namespace

TEST_CASE("single-site interaction diagonal is (c, -c)", "[spin]") {
    const Vector d = spin::interaction_diagonal({0.37}, 1);
    REQUIRE(d.size() == 2);
    CHECK(d(0) == 0.37);
    CHECK(d(1) == -0.37);
}

TEST_CASE("two-site interaction diagonal with unit couplings", "[spin]") {
    const Vector d = spin::interaction_diagonal({1.0, 1.0}, 2);
    REQUIRE(d.size() == 4);
    CHECK(d(0) == 2.0);
    CHECK(d(1) == 0.0);
    CHECK(d(2) == 0.0);
    CHECK(d(3) == -2.0);
}

TEST_CASE("two-site environment axis blocks match hand results", "[spin]") {
    SECTION("z-z coupling is diagonal (1,-1,-1,1)") {
        const Matrix h = spin::environment_matrix({{{0.0}, {0.0}, {1.0}}}, 2);
        Matrix expect = Matrix::Zero(4, 4);
        expect.diagonal() << 1.0, -1.0, -1.0, 1.0;
        CHECK((h - expect).cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("x-x coupling is the anti-diagonal of ones") {
        const Matrix h = spin::environment_matrix({{{1.0}, {0.0}, {0.0}}}, 2);
        Matrix expect = Matrix::Zero(4, 4);
        expect(3, 0) = expect(0, 3) = expect(2, 1) = expect(1, 2) = 1.0;
        CHECK((h - expect).cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("y-y coupling is real with signs from the flipped spins") {
        const Matrix h = spin::environment_matrix({{{0.0}, {1.0}, {0.0}}}, 2);
        Matrix expect = Matrix::Zero(4, 4);
        expect(3, 0) = expect(0, 3) = -1.0;
        expect(2, 1) = expect(1, 2) = 1.0;
        CHECK((h - expect).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("two-site Hamiltonians match an explicit Pauli tensor oracle", "[spin]") {
    spin::SpinBathModel model;
    model.config = SpinBathConfig{.n_spins = 2, .lambda = 0.9, .seed = 0};
    model.a = {0.3, -1.2};
    model.b = {{{0.7}, {-0.4}, {1.1}}};
    model.h_int_diag = spin::interaction_diagonal(model.a, 2);
    model.h_env = spin::environment_matrix(model.b, 2);

    const C2 id = C2::Identity();
    C4 h_env_oracle = C4::Zero();
    const double b_axis[3] = {0.7, -0.4, 1.1};
    for (int axis = 0; axis < 3; ++axis) {
        h_env_oracle += b_axis[axis] * kron2(pauli(axis), pauli(axis));
    }
    C4 h_int_oracle = 0.3 * kron2(id, pauli(2)) + (-1.2) * kron2(pauli(2), id);

    CHECK(h_env_oracle.imag().cwiseAbs().maxCoeff() == 0.0);
    CHECK((model.h_env - h_env_oracle.real()).cwiseAbs().maxCoeff() < 1e-15);

    for (const int sign : {+1, -1}) {
        const Matrix h = spin::build_perturbed(model, sign);
        const C4 oracle = h_env_oracle + (sign * 0.9) * h_int_oracle;
        CHECK((h - oracle.real()).cwiseAbs().maxCoeff() < 1e-15);
    }
}

TEST_CASE("perturbed pair differs by twice the scaled interaction", "[spin]") {
    const auto model = spin::build_model({.n_spins = 5, .lambda = 0.35, .seed = 11});
    const Matrix h_plus = spin::build_perturbed(model, +1);
    const Matrix h_minus = spin::build_perturbed(model, -1);
    const Matrix diff = h_plus - h_minus;
    Matrix expect = Matrix::Zero(diff.rows(), diff.cols());
    expect.diagonal() = 2.0 * 0.35 * model.h_int_diag;
    CHECK((diff - expect).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((h_plus + h_minus - 2.0 * model.h_env).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("zero coupling collapses both perturbed operators onto the environment", "[spin]") {
    const auto model = spin::build_model({.n_spins = 4, .lambda = 0.0, .seed = 5});
    CHECK((spin::build_perturbed(model, +1) - model.h_env).cwiseAbs().maxCoeff() == 0.0);
    CHECK((spin::build_perturbed(model, -1) - model.h_env).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(spin::build_perturbed(model, 2), std::invalid_argument);
}

TEST_CASE("interaction and environment are traceless and symmetric", "[spin]") {
    const auto model = spin::build_model({.n_spins = 6, .lambda = 1.0, .seed = 7});
    const double scale = model.h_env.cwiseAbs().maxCoeff();
    CHECK(std::abs(model.h_int_diag.sum()) < 1e-10 * scale);
    CHECK(std::abs(model.h_env.trace()) < 1e-10 * scale);
    CHECK((model.h_env - model.h_env.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("symmetric-double pair convention doubles the spectrum exactly", "[spin]") {
    const SpinBathConfig config{.n_spins = 4, .lambda = 1.0, .seed = 9};
    const Matrix ordered = spin::build_environment(config, spin::PairConvention::ordered);
    const Matrix doubled = spin::build_environment(config, spin::PairConvention::symmetric_double);
    CHECK((doubled - 2.0 * ordered).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("identical configuration reproduces couplings bit for bit", "[spin]") {
    const auto m1 = spin::build_model({.n_spins = 6, .lambda = 0.1, .seed = 42});
    const auto m2 = spin::build_model({.n_spins = 6, .lambda = 0.1, .seed = 42});
    CHECK(m1.a == m2.a);
    CHECK(m1.b == m2.b);
    CHECK((m1.h_env - m2.h_env).cwiseAbs().maxCoeff() == 0.0);

    const auto m3 = spin::build_model({.n_spins = 6, .lambda = 0.1, .seed = 43});
    CHECK(m1.a != m3.a);
}

TEST_CASE("excluding an axis zeroes its block without shifting the others", "[spin]") {
    const auto full = spin::build_model({.n_spins = 5, .lambda = 1.0, .seed = 3});
    const auto no_y =
        spin::build_model({.n_spins = 5, .lambda = 1.0, .seed = 3, .axis_y = false});
    CHECK(no_y.a == full.a);
    CHECK(no_y.b[0] == full.b[0]);
    CHECK(no_y.b[2] == full.b[2]);
    for (const double v : no_y.b[1]) CHECK(v == 0.0);
}

TEST_CASE("interaction-first draw order makes the diagonal seed-stable", "[spin]") {
    const SpinBathConfig config{.n_spins = 5, .lambda = 1.0, .seed = 21};
    const auto model = spin::build_model(config);
    const Vector direct = spin::build_interaction(config);
    CHECK((model.h_int_diag - direct).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("couplings survive a JSON round trip", "[spin]") {
    const auto model = spin::build_model({.n_spins = 4, .lambda = 0.8, .seed = 17});
    const auto j = spin::couplings_to_json(model);
    const auto copy = spin::model_from_json(j, 0.8);
    CHECK(copy.a == model.a);
    CHECK(copy.b == model.b);
    CHECK((copy.h_env - model.h_env).cwiseAbs().maxCoeff() == 0.0);
    CHECK((copy.h_int_diag - model.h_int_diag).cwiseAbs().maxCoeff() == 0.0);
    CHECK(copy.config.seed == model.config.seed);

    auto bad = j;
    bad["b"]["x"][0][1] = 9;  // pair index outside n_spins
    CHECK_THROWS_AS(spin::model_from_json(bad, 0.8), std::invalid_argument);
}

TEST_CASE("configuration validation rejects unusable sizes", "[spin]") {
    CHECK_THROWS_AS(spin::validate({.n_spins = 0}), std::invalid_argument);
    CHECK_THROWS_AS(spin::validate({.n_spins = 25}), std::length_error);
    CHECK_THROWS_AS(spin::validate({.n_spins = 4, .lambda = -0.1}), std::invalid_argument);
    CHECK(spin::dimension({.n_spins = 12}) == 4096);
}

TEST_CASE("single-spin model has an empty environment", "[spin]") {
    const auto model = spin::build_model({.n_spins = 1, .lambda = 1.0, .seed = 2});
    CHECK(model.h_env.cwiseAbs().maxCoeff() == 0.0);
    CHECK(model.h_int_diag(0) == -model.h_int_diag(1));
}
