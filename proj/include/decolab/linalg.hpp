// linalg.hpp — Dense symmetric/Hermitian eigensolvers and BLAS product helpers
#pragma once

#include <cblas.h>
#include <lapacke.h>

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

#include "decolab/io.hpp"

namespace decolab {

using Matrix = Eigen::MatrixXd;        // column-major, matches LAPACK layout
using ComplexMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

// Fingerprint of a matrix's raw bytes, attached to solver error messages so a
// failing operator can be identified in logs without dumping it.
inline std::string matrix_fingerprint(const double* data, std::size_t count) {
    return to_hex(fnv1a64(std::string_view(reinterpret_cast<const char*>(data),
                                           count * sizeof(double))));
}

// Eigendecomposition of a real symmetric matrix (divide and conquer).
// On return `a` holds the eigenvectors (column k ↔ eigenvalue k, ascending).
inline void syevd_inplace(Matrix& a, Vector& eigenvalues) {
    const auto n = static_cast<lapack_int>(a.rows());
    eigenvalues.resize(n);
    const std::string print = matrix_fingerprint(a.data(), static_cast<std::size_t>(n) * n);
    const lapack_int info =
        LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, eigenvalues.data());
    if (info != 0) {
        throw std::runtime_error("dsyevd failed (info=" + std::to_string(info) +
                                 ", operator " + print + ")");
    }
}

// Eigendecomposition of a complex Hermitian matrix.
inline void heevd_inplace(ComplexMatrix& a, Vector& eigenvalues) {
    const auto n = static_cast<lapack_int>(a.rows());
    eigenvalues.resize(n);
    const std::string print =
        matrix_fingerprint(reinterpret_cast<const double*>(a.data()),
                           2 * static_cast<std::size_t>(n) * n);
    const lapack_int info = LAPACKE_zheevd(
        LAPACK_COL_MAJOR, 'V', 'L', n,
        reinterpret_cast<lapack_complex_double*>(a.data()), n, eigenvalues.data());
    if (info != 0) {
        throw std::runtime_error("zheevd failed (info=" + std::to_string(info) +
                                 ", operator " + print + ")");
    }
}

// Complex Schur factorization M = Q T Q†; for (near-)normal M the triangular
// factor is (near-)diagonal, giving a stable route to functions of unitaries.
inline void schur_inplace(ComplexMatrix& m, ComplexMatrix& q) {
    const auto n = static_cast<lapack_int>(m.rows());
    q.resize(n, n);
    std::vector<std::complex<double>> w(static_cast<std::size_t>(n));
    lapack_int sdim = 0;  // written by zgees even when no ordering is requested
    const lapack_int info = LAPACKE_zgees(
        LAPACK_COL_MAJOR, 'V', 'N', nullptr, n,
        reinterpret_cast<lapack_complex_double*>(m.data()), n, &sdim,
        reinterpret_cast<lapack_complex_double*>(w.data()),
        reinterpret_cast<lapack_complex_double*>(q.data()), n);
    if (info != 0) {
        throw std::runtime_error("zgees failed (info=" + std::to_string(info) + ")");
    }
}

// C = op(A)·op(B) through BLAS; Eigen's expression products are fine for small
// operands but the N=12 pipeline needs the tuned kernels.
inline void gemm(const Matrix& a, bool trans_a, const Matrix& b, bool trans_b, Matrix& c) {
    const auto m = trans_a ? a.cols() : a.rows();
    const auto k = trans_a ? a.rows() : a.cols();
    const auto kb = trans_b ? b.cols() : b.rows();
    const auto n = trans_b ? b.rows() : b.cols();
    if (k != kb) throw std::invalid_argument("gemm: inner dimensions do not match");
    c.resize(m, n);
    cblas_dgemm(CblasColMajor, trans_a ? CblasTrans : CblasNoTrans,
                trans_b ? CblasTrans : CblasNoTrans, static_cast<int>(m),
                static_cast<int>(n), static_cast<int>(k), 1.0, a.data(),
                static_cast<int>(a.rows()), b.data(), static_cast<int>(b.rows()), 0.0,
                c.data(), static_cast<int>(m));
}

}  // namespace decolab
