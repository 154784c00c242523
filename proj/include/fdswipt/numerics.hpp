// SPDX-License-Identifier: Apache-2.0
//
// fdswipt: full-duplex MIMO energy harvesting / information transfer toolkit
// ------------------------------------------------------------------------

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fdswipt {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Input violated a documented precondition (shape, range, structure).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Mathematically invalid value encountered (e.g. indefinite matrix where PD is required).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Iterative routine produced a non-finite value.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kEigenFloor = 1e-9;
inline constexpr double kHermitianTol = 1e-10;

bool is_hermitian(const CMatrix& a, double tol = kHermitianTol);

/// (A + A†)/2, used to scrub roundoff from products that are Hermitian in exact arithmetic.
CMatrix hermitian_part(const CMatrix& a);

/// Real trace of a Hermitian matrix.
double real_trace(const CMatrix& a);

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const CMatrix& a);

/// Base-2 log-determinant of a Hermitian positive-definite matrix, via Cholesky.
/// Throws DomainError naming the smallest eigenvalue when A is not PD.
double hermitian_logdet(const CMatrix& a);

/// Euclidean projection of v onto {x >= 0, sum(x) <= cap}.
RVector project_capped_simplex(const RVector& v, double cap);

/// Hermitian matrix whose eigenvalues are all >= -kEigenFloor.
class PsdMatrix {
public:
    PsdMatrix() = default;

    /// Validates A (Hermitian, eigen-floor) and stores its Hermitian part.
    static PsdMatrix from(const CMatrix& a);
    static PsdMatrix zero(Eigen::Index dim);
    static PsdMatrix scaled_identity(Eigen::Index dim, double scale);

    const CMatrix& matrix() const noexcept { return value_; }
    Eigen::Index dim() const noexcept { return value_.rows(); }
    double trace() const { return real_trace(value_); }

private:
    explicit PsdMatrix(CMatrix a) : value_(std::move(a)) {}
    CMatrix value_;

    friend PsdMatrix psd_project(const CMatrix& a, double trace_cap);
};

/// Column factor F (n×r) with F·F† = A, keeping only eigenvalues above
/// `rel_floor`·λ_max. The default keeps every positive eigenvalue: near the
/// noise floor a component of 1e-13·λ_max can still dominate σ².
CMatrix psd_factor(const CMatrix& a, double rel_floor = 0.0);

/// log2|σ²·I_dim + C·C†| through the singular values of C. Stays accurate
/// when σ² is many orders of magnitude below ‖C‖² and C·C† is rank deficient.
double logdet_noise_plus_gram(double sigma2, Eigen::Index dim, const CMatrix& c);

/// (σ²·I + C·C†)^-1 applied as U·diag(1/(σ²+s²))·U†, same conditioning as above.
CMatrix inverse_noise_plus_gram(double sigma2, Eigen::Index dim, const CMatrix& c);

/// L = diag(1/√(σ²+s²))·U†, so L†L = (σ²·I + C·C†)^-1. Quadratic forms
/// X†(σ²·I + C·C†)^-1·X are best formed as (L·X)†(L·X): the explicit inverse
/// carries 1/σ² entries that cancel.
CMatrix noise_plus_gram_whitener(double sigma2, Eigen::Index dim, const CMatrix& c);

/// Frobenius-nearest matrix in {X ⪰ 0, Tr(X) <= trace_cap}.
PsdMatrix psd_project(const CMatrix& a, double trace_cap);

/// Lower-triangular B with B·B† = A for PSD A. Semidefinite input is handled by
/// a pivot-free LDLᵀ-style recurrence that zeroes columns below the eigen-floor.
CMatrix cholesky_lower(const CMatrix& a);

}  // namespace fdswipt
