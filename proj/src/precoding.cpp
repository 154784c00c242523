// SPDX-License-Identifier: Apache-2.0
//
// fdswipt: full-duplex MIMO energy harvesting / information transfer toolkit
// ------------------------------------------------------------------------

#include "fdswipt/precoding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

namespace fdswipt {

namespace {

constexpr double kInvLn2 = 1.0 / std::numbers::ln2;

double energy_weight(const PowerBudget& budget) {
    return (1.0 - budget.alpha) * (budget.mixing == EnergyMixing::Normalized ? 1.0 / budget.ps : 1.0);
}

double q2_cap(const PowerBudget& budget) { return std::min(budget.pq, budget.ph); }

/// Anchor-dependent pieces of the surrogate, computed once per outer iteration.
class Surrogate {
public:
    Surrogate(const SubsystemChannels& sub, const PsdMatrix& anchor, const PowerBudget& budget)
        : sub_(sub), alpha_(budget.alpha), energy_weight_(energy_weight(budget)), noise_(noise_level(sub.sigma1)) {
        if (anchor.dim() != sub.m_eh()) throw ContractError("surrogate: anchor does not match M_h");
        const CMatrix f0 = psd_factor(anchor.matrix());
        const CMatrix interference = sub.si1 * f0;
        anchor_logdet_ = logdet_noise_plus_gram(noise_, sub.m_it(), interference);
        // Linear terms use the same factors as the log-dets, in whitened form.
        whiten_ = noise_plus_gram_whitener(noise_, sub.m_it(), interference);
        const CMatrix ws = whiten_ * sub.si1;
        tangent_ = hermitian_part(ws.adjoint() * ws);  // SI1† A°^-1 SI1
        tangent_at_anchor_ = (whiten_ * interference).squaredNorm();
        eh_gram_ = hermitian_part(sub.h_eh.adjoint() * sub.h_eh);
        si2_gram_ = hermitian_part(sub.si2.adjoint() * sub.si2);
        noise2_ = real_trace(sub.sigma2);
    }

    double linearized_rate(const CMatrix& q1, const CMatrix& q2) const {
        const CMatrix f1 = psd_factor(q1);
        const double lin = (tangent_at_anchor_ - (whiten_ * (sub_.si1 * f1)).squaredNorm()) * kInvLn2;
        return logdet_noise_plus_gram(noise_, sub_.m_it(), total_factor(f1, q2)) + lin - anchor_logdet_;
    }

    double energy(const CMatrix& q1, const CMatrix& q2) const {
        return (eh_gram_ * q1).trace().real() + (si2_gram_ * q2).trace().real() + noise2_;
    }

    double value(const CMatrix& q1, const CMatrix& q2) const {
        return alpha_ * linearized_rate(q1, q2) + energy_weight_ * energy(q1, q2);
    }

    CovarianceGradient gradient(const CMatrix& q1, const CMatrix& q2) const {
        const CMatrix whiten = noise_plus_gram_whitener(noise_, sub_.m_it(), total_factor(psd_factor(q1), q2));
        const CMatrix ws = whiten * sub_.si1;
        const CMatrix wh = whiten * sub_.h_it;
        CovarianceGradient g;
        g.q1 = hermitian_part(alpha_ * kInvLn2 * (ws.adjoint() * ws - tangent_) + energy_weight_ * eh_gram_);
        g.q2 = hermitian_part(alpha_ * kInvLn2 * (wh.adjoint() * wh) + energy_weight_ * si2_gram_);
        return g;
    }

private:
    // [SI1·Q1^1/2, H_I·Q2^1/2], so the total covariance is Σ1 + C·C†.
    CMatrix total_factor(const CMatrix& f1, const CMatrix& q2) const {
        const CMatrix a = sub_.si1 * f1;
        const CMatrix b = sub_.h_it * psd_factor(q2);
        CMatrix c(sub_.m_it(), a.cols() + b.cols());
        c << a, b;
        return c;
    }

    const SubsystemChannels& sub_;
    double alpha_;
    double energy_weight_;
    double noise_;
    double anchor_logdet_ = 0.0;
    CMatrix tangent_;
    CMatrix whiten_;
    double tangent_at_anchor_ = 0.0;
    CMatrix eh_gram_;
    CMatrix si2_gram_;
    double noise2_ = 0.0;
};

double inner_product(const CMatrix& a, const CMatrix& b) { return (a.adjoint() * b).trace().real(); }

void check_pair(const SubsystemChannels& sub, const CovariancePair& qp) {
    if (qp.q1.dim() != sub.m_eh() || qp.q2.dim() != sub.n_it()) {
        throw ContractError("precoding: covariance shapes do not match the subsystem");
    }
}

}  // namespace

void ScaSettings::validate() const {
    if (!(outer_tol > 0.0) || !(inner_step > 0.0) || !(inner_tol > 0.0) || max_outer < 1 || max_inner < 1) {
        throw ContractError("ScaSettings: tolerances and steps must be positive, iteration caps >= 1");
    }
}

void ScaTrace::write_csv(std::ostream& os) const {
    os << "iteration,objective,surrogate,trace_q1,trace_q2,inner_iterations\n";
    char buf[256];
    std::snprintf(buf, sizeof buf, "0,%.12g,,,,0\n", initial_objective);
    os << buf;
    for (std::size_t k = 0; k < iterations.size(); ++k) {
        const auto& it = iterations[k];
        std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g,%.12g,%.12g,%d\n", k + 1, it.objective, it.surrogate,
                      it.trace_q1, it.trace_q2, it.inner_iterations);
        os << buf;
    }
}

double linearized_rate(const SubsystemChannels& sub, const CovariancePair& qp, const PsdMatrix& q1_anchor) {
    check_pair(sub, qp);
    PowerBudget dummy;
    return Surrogate(sub, q1_anchor, dummy).linearized_rate(qp.q1.matrix(), qp.q2.matrix());
}

double surrogate_objective(const SubsystemChannels& sub, const CovariancePair& qp, const PsdMatrix& q1_anchor,
                           const PowerBudget& budget) {
    budget.validate();
    check_pair(sub, qp);
    return Surrogate(sub, q1_anchor, budget).value(qp.q1.matrix(), qp.q2.matrix());
}

CovarianceGradient surrogate_gradient(const SubsystemChannels& sub, const CovariancePair& qp,
                                      const PsdMatrix& q1_anchor, const PowerBudget& budget) {
    budget.validate();
    check_pair(sub, qp);
    return Surrogate(sub, q1_anchor, budget).gradient(qp.q1.matrix(), qp.q2.matrix());
}

InnerSolution solve_inner_from(const SubsystemChannels& sub, const PsdMatrix& q1_anchor, const CovariancePair& start,
                               const PowerBudget& budget, const ScaSettings& settings) {
    budget.validate();
    settings.validate();
    check_pair(sub, start);
    const Surrogate surrogate(sub, q1_anchor, budget);

    // Iterate on Q/P_S so steps and tolerances are scale-free.
    const double scale = budget.ps;
    const double cap1 = 1.0;
    const double cap2 = std::max(q2_cap(budget) / scale, 0.0);

    CMatrix x1 = psd_project(start.q1.matrix() / scale, cap1).matrix();
    CMatrix x2 = cap2 > 0.0 ? psd_project(start.q2.matrix() / scale, cap2).matrix()
                            : CMatrix::Zero(start.q2.dim(), start.q2.dim());
    auto value_at = [&](const CMatrix& a, const CMatrix& b) { return surrogate.value(a * scale, b * scale); };

    double current = value_at(x1, x2);
    if (!std::isfinite(current)) throw NumericalFailure("solve_inner: non-finite surrogate at the starting point");

    double step = settings.inner_step;
    int iter = 0;
    for (; iter < settings.max_inner; ++iter) {
        CovarianceGradient g = surrogate.gradient(x1 * scale, x2 * scale);
        g.q1 *= scale;
        g.q2 *= scale;
        if (!g.q1.allFinite() || !g.q2.allFinite()) {
            std::ostringstream os;
            os << "solve_inner: non-finite gradient at inner iteration " << iter << " (surrogate " << current << ")";
            throw NumericalFailure(os.str());
        }

        bool accepted = false;
        double mapping_norm = 0.0;
        for (int backtrack = 0; backtrack < 60; ++backtrack) {
            const CMatrix y1 = psd_project(hermitian_part(x1 + step * g.q1), cap1).matrix();
            const CMatrix y2 = cap2 > 0.0 ? psd_project(hermitian_part(x2 + step * g.q2), cap2).matrix() : x2;
            const CMatrix d1 = y1 - x1;
            const CMatrix d2 = y2 - x2;
            const double dist2 = d1.squaredNorm() + d2.squaredNorm();
            mapping_norm = std::sqrt(dist2) / step;
            if (mapping_norm < settings.inner_tol) break;
            const double candidate = value_at(y1, y2);
            if (!std::isfinite(candidate)) {
                step *= 0.5;
                continue;
            }
            const double predicted = inner_product(g.q1, d1) + inner_product(g.q2, d2) - dist2 / (2.0 * step);
            if (candidate >= current + predicted - 1e-15 * std::abs(current)) {
                x1 = y1;
                x2 = y2;
                const double gain = candidate - current;
                current = candidate;
                accepted = true;
                if (gain <= 1e-13 * std::max(1.0, std::abs(current))) mapping_norm = 0.0;
                break;
            }
            step *= 0.5;
        }
        if (!accepted || mapping_norm < settings.inner_tol) {
            ++iter;
            break;
        }
        step = std::min(step * 2.0, 1e6);
    }
    if (!std::isfinite(current)) throw NumericalFailure("solve_inner: surrogate became non-finite");

    InnerSolution out;
    out.covariances.q1 = PsdMatrix::from(x1 * scale);
    out.covariances.q2 = PsdMatrix::from(x2 * scale);
    out.surrogate = current;
    out.iterations = iter;
    return out;
}

CovariancePair solve_inner(const SubsystemChannels& sub, const PsdMatrix& q1_anchor, const PowerBudget& budget,
                           const ScaSettings& settings) {
    budget.validate();
    CovariancePair start{q1_anchor, PsdMatrix::scaled_identity(sub.n_it(), q2_cap(budget) / sub.n_it())};
    return solve_inner_from(sub, q1_anchor, start, budget, settings).covariances;
}

CovariancePair equal_power(const SubsystemChannels& sub, const PowerBudget& budget) {
    budget.validate();
    return {PsdMatrix::scaled_identity(sub.m_eh(), budget.ps / sub.m_eh()),
            PsdMatrix::scaled_identity(sub.n_it(), budget.ph / sub.n_it())};
}

ScaResult sca_precoding(const SubsystemChannels& sub, const PowerBudget& budget, const ScaSettings& settings) {
    budget.validate();
    settings.validate();
    auto true_objective = [&](const CovariancePair& qp) {
        return weighted_objective(info_rate(sub, qp), harvested_power(sub, qp), budget);
    };

    CovariancePair current{PsdMatrix::scaled_identity(sub.m_eh(), budget.ps / sub.m_eh()),
                           PsdMatrix::scaled_identity(sub.n_it(), q2_cap(budget) / sub.n_it())};
    ScaResult result;
    double objective = true_objective(current);
    result.trace.initial_objective = objective;

    for (int outer = 0; outer < settings.max_outer; ++outer) {
        const PsdMatrix anchor = current.q1;
        InnerSolution inner = solve_inner_from(sub, anchor, current, budget, settings);
        const double next = true_objective(inner.covariances);
        if (!std::isfinite(next)) throw NumericalFailure("sca_precoding: non-finite objective");
        // Near the noise floor the rate resolves roundoff in the SI directions of
        // Q1, so the bound can fail by a few 1e-3; never step downhill.
        if (next < objective) break;

        ScaIteration it;
        it.objective = next;
        it.surrogate = inner.surrogate;
        it.trace_q1 = inner.covariances.q1.trace();
        it.trace_q2 = inner.covariances.q2.trace();
        it.inner_iterations = inner.iterations;
        result.trace.iterations.push_back(it);

        const double improvement = next - objective;
        current = std::move(inner.covariances);
        objective = next;
        if (improvement < settings.outer_tol) break;
    }

    result.covariances = current;
    result.w1 = cholesky_lower(current.q1.matrix());
    result.w2 = cholesky_lower(current.q2.matrix());
    result.rate = info_rate(sub, current);
    result.harvested_watts = harvested_power(sub, current);
    result.objective = objective;
    return result;
}

}  // namespace fdswipt
