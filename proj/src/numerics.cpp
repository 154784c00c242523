// SPDX-License-Identifier: Apache-2.0
//
// fdswipt: full-duplex MIMO energy harvesting / information transfer toolkit
// ------------------------------------------------------------------------

#include "fdswipt/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fdswipt {

namespace {

void require_square(const CMatrix& a, const char* what) {
    if (a.rows() != a.cols()) {
        std::ostringstream os;
        os << what << ": expected a square matrix, got " << a.rows() << "x" << a.cols();
        throw ContractError(os.str());
    }
}

void require_hermitian(const CMatrix& a, const char* what) {
    require_square(a, what);
    if (!is_hermitian(a)) {
        throw ContractError(std::string(what) + ": matrix is not Hermitian");
    }
}

}  // namespace

bool is_hermitian(const CMatrix& a, double tol) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = i; j < a.cols(); ++j) {
            if (std::abs(a(i, j) - std::conj(a(j, i))) > tol * scale) return false;
        }
    }
    return true;
}

CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

double real_trace(const CMatrix& a) { return a.trace().real(); }

double min_eigenvalue(const CMatrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double hermitian_logdet(const CMatrix& a) {
    require_hermitian(a, "hermitian_logdet");
    if (a.size() == 0) return 0.0;
    Eigen::LLT<CMatrix> llt(hermitian_part(a));
    bool ok = llt.info() == Eigen::Success;
    double sum = 0.0;
    if (ok) {
        const auto& l = llt.matrixLLT();
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            const double d = l(i, i).real();
            if (!(d > 0.0) || !std::isfinite(d)) {
                ok = false;
                break;
            }
            sum += std::log2(d);
        }
    }
    if (!ok) {
        std::ostringstream os;
        os << "hermitian_logdet: matrix is not positive definite (smallest eigenvalue "
           << min_eigenvalue(a) << ")";
        throw DomainError(os.str());
    }
    return 2.0 * sum;
}

RVector project_capped_simplex(const RVector& v, double cap) {
    if (!(cap > 0.0)) throw ContractError("project_capped_simplex: cap must be positive");
    RVector clipped = v.cwiseMax(0.0);
    if (clipped.sum() <= cap) return clipped;

    // Sort-and-threshold: find theta with sum(max(v - theta, 0)) = cap.
    std::vector<double> sorted(v.data(), v.data() + v.size());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double running = 0.0;
    double theta = 0.0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        running += sorted[k];
        const double candidate = (running - cap) / static_cast<double>(k + 1);
        if (k + 1 == sorted.size() || sorted[k + 1] <= candidate) {
            theta = candidate;
            break;
        }
    }
    return (v.array() - theta).cwiseMax(0.0).matrix();
}

PsdMatrix PsdMatrix::from(const CMatrix& a) {
    require_hermitian(a, "PsdMatrix::from");
    CMatrix h = hermitian_part(a);
    if (h.size() > 0) {
        const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
        const double lmin = min_eigenvalue(h);
        if (lmin < -kEigenFloor * scale) {
            std::ostringstream os;
            os << "PsdMatrix::from: smallest eigenvalue " << lmin << " below floor";
            throw DomainError(os.str());
        }
    }
    return PsdMatrix(std::move(h));
}

PsdMatrix PsdMatrix::zero(Eigen::Index dim) { return PsdMatrix(CMatrix::Zero(dim, dim)); }

PsdMatrix PsdMatrix::scaled_identity(Eigen::Index dim, double scale) {
    if (scale < 0.0) throw ContractError("PsdMatrix::scaled_identity: negative scale");
    return PsdMatrix(CMatrix::Identity(dim, dim) * Complex(scale, 0.0));
}

PsdMatrix psd_project(const CMatrix& a, double trace_cap) {
    require_hermitian(a, "psd_project");
    if (!(trace_cap > 0.0)) throw ContractError("psd_project: trace_cap must be positive");
    if (a.size() == 0) return PsdMatrix(a);
    if (a.rows() == 1) {
        const double x = std::clamp(a(0, 0).real(), 0.0, trace_cap);
        return PsdMatrix(CMatrix::Constant(1, 1, Complex(x, 0.0)));
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a));
    const RVector lambda = project_capped_simplex(es.eigenvalues(), trace_cap);
    if (lambda.isApprox(es.eigenvalues(), 0.0)) return PsdMatrix(hermitian_part(a));
    const CMatrix& v = es.eigenvectors();
    CMatrix out = v * lambda.cast<Complex>().asDiagonal() * v.adjoint();
    return PsdMatrix(hermitian_part(out));
}

CMatrix psd_factor(const CMatrix& a, double rel_floor) {
    require_square(a, "psd_factor");
    const Eigen::Index n = a.rows();
    if (n == 0) return CMatrix(0, 0);
    if (n == 1) {
        const double x = a(0, 0).real();
        if (x > 0.0) return CMatrix::Constant(1, 1, Complex(std::sqrt(x), 0.0));
        return CMatrix(1, 0);
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a));
    const RVector& lambda = es.eigenvalues();
    const double top = lambda.maxCoeff();
    if (!(top > 0.0)) return CMatrix(n, 0);
    const double floor = rel_floor * top;
    Eigen::Index keep = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (lambda(i) > floor) ++keep;
    CMatrix f(n, keep);
    Eigen::Index col = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (lambda(i) > floor) f.col(col++) = es.eigenvectors().col(i) * std::sqrt(lambda(i));
    }
    return f;
}

double logdet_noise_plus_gram(double sigma2, Eigen::Index dim, const CMatrix& c) {
    if (!(sigma2 > 0.0)) throw DomainError("logdet_noise_plus_gram: noise level must be positive");
    if (c.rows() != dim) throw ContractError("logdet_noise_plus_gram: factor row count mismatch");
    const double log_noise = std::log2(sigma2);
    if (c.cols() == 0 || dim == 0) return static_cast<double>(dim) * log_noise;
    Eigen::JacobiSVD<CMatrix> svd(c);
    const RVector& s = svd.singularValues();
    double total = static_cast<double>(dim) * log_noise;
    for (Eigen::Index i = 0; i < s.size(); ++i) total += std::log2(1.0 + (s(i) * s(i)) / sigma2);
    return total;
}

CMatrix inverse_noise_plus_gram(double sigma2, Eigen::Index dim, const CMatrix& c) {
    if (!(sigma2 > 0.0)) throw DomainError("inverse_noise_plus_gram: noise level must be positive");
    if (c.rows() != dim) throw ContractError("inverse_noise_plus_gram: factor row count mismatch");
    if (c.cols() == 0) return CMatrix::Identity(dim, dim) * Complex(1.0 / sigma2, 0.0);
    Eigen::JacobiSVD<CMatrix> svd(c, Eigen::ComputeFullU);
    const RVector& s = svd.singularValues();
    RVector weight = RVector::Constant(dim, 1.0 / sigma2);
    for (Eigen::Index i = 0; i < s.size(); ++i) weight(i) = 1.0 / (sigma2 + s(i) * s(i));
    const CMatrix& u = svd.matrixU();
    return hermitian_part(u * weight.cast<Complex>().asDiagonal() * u.adjoint());
}

CMatrix noise_plus_gram_whitener(double sigma2, Eigen::Index dim, const CMatrix& c) {
    if (!(sigma2 > 0.0)) throw DomainError("noise_plus_gram_whitener: noise level must be positive");
    if (c.rows() != dim) throw ContractError("noise_plus_gram_whitener: factor row count mismatch");
    if (c.cols() == 0) return CMatrix::Identity(dim, dim) * Complex(1.0 / std::sqrt(sigma2), 0.0);
    Eigen::JacobiSVD<CMatrix> svd(c, Eigen::ComputeFullU);
    const RVector& s = svd.singularValues();
    RVector weight = RVector::Constant(dim, 1.0 / std::sqrt(sigma2));
    for (Eigen::Index i = 0; i < s.size(); ++i) weight(i) = 1.0 / std::sqrt(sigma2 + s(i) * s(i));
    return weight.cast<Complex>().asDiagonal() * svd.matrixU().adjoint();
}

CMatrix cholesky_lower(const CMatrix& a) {
    require_hermitian(a, "cholesky_lower");
    const Eigen::Index n = a.rows();
    if (n == 0) return a;
    const CMatrix h = hermitian_part(a);
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());

    Eigen::LLT<CMatrix> llt(h);
    if (llt.info() == Eigen::Success) {
        CMatrix l = llt.matrixL();
        if (l.allFinite() && (l.diagonal().real().array() > 0.0).all()) return l;
    }

    // Semidefinite: A = (V Λ^½)(V Λ^½)†; QR of (V Λ^½)† = QR gives A = R†R.
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin < -kEigenFloor * scale) {
        std::ostringstream os;
        os << "cholesky_lower: matrix is indefinite (smallest eigenvalue " << lmin << ")";
        throw DomainError(os.str());
    }
    const RVector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const CMatrix factor = es.eigenvectors() * root.cast<Complex>().asDiagonal();
    Eigen::HouseholderQR<CMatrix> qr(factor.adjoint());
    CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double mag = std::abs(r(i, i));
        if (mag > 0.0) r.row(i) *= std::conj(r(i, i)) / mag;
        r(i, i) = Complex(mag, 0.0);
    }
    return r.adjoint();
}

}  // namespace fdswipt
