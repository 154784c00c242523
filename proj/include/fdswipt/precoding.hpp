// SPDX-License-Identifier: Apache-2.0
//
// fdswipt: full-duplex MIMO energy harvesting / information transfer toolkit
// ------------------------------------------------------------------------

#pragma once

#include <iosfwd>
#include <vector>

#include "fdswipt/metrics.hpp"

namespace fdswipt {

/// Stopping rules for the successive convex approximation (SCA) precoder.
///
/// The inner solver works on covariances normalized by P_S, so `inner_step`
/// and `inner_tol` are dimensionless. The step adapts: it doubles after an
/// accepted step and halves on an Armijo failure.
struct ScaSettings {
    double outer_tol = 1e-4;  ///< stop when the true objective improves by less than this
    int max_outer = 50;
    double inner_step = 1.0;  ///< initial step of projected gradient ascent
    int max_inner = 400;
    double inner_tol = 1e-7;  ///< projected-gradient norm threshold

    void validate() const;
};

struct ScaIteration {
    double objective = 0.0;   ///< true weighted objective at the new anchor
    double surrogate = 0.0;   ///< linearized objective reached by the inner solve
    double trace_q1 = 0.0;
    double trace_q2 = 0.0;
    int inner_iterations = 0;
};

struct ScaTrace {
    double initial_objective = 0.0;  ///< true objective at the equal-power starting point
    std::vector<ScaIteration> iterations;

    /// iteration,objective,surrogate,trace_q1,trace_q2,inner_iterations (row 0 = starting point).
    void write_csv(std::ostream& os) const;
};

struct ScaResult {
    CovariancePair covariances;
    CMatrix w1;  ///< lower-triangular, W1·W1† = Q1
    CMatrix w2;  ///< lower-triangular, W2·W2† = Q2
    ScaTrace trace;
    double rate = 0.0;
    double harvested_watts = 0.0;
    double objective = 0.0;
};

/// Two-log-det rate with the interference log-det replaced by its tangent at `q1_anchor`:
/// log2|Σ1 + SI1 Q1 SI1† + H_I Q2 H_I†| + Tr[(Σ1 + SI1 Q1° SI1†)^-1 SI1 (Q1° - Q1) SI1†]/ln2
/// - log2|Σ1 + SI1 Q1° SI1†|. Never exceeds info_rate.
double linearized_rate(const SubsystemChannels& sub, const CovariancePair& qp, const PsdMatrix& q1_anchor);

/// α·linearized_rate + (1-α)·energy term, the objective of the convex subproblem.
double surrogate_objective(const SubsystemChannels& sub, const CovariancePair& qp, const PsdMatrix& q1_anchor,
                           const PowerBudget& budget);

/// Gradient of surrogate_objective with respect to (Q1, Q2) under the real
/// inner product Re Tr(A†B). Both blocks are Hermitian.
struct CovarianceGradient {
    CMatrix q1;
    CMatrix q2;
};

CovarianceGradient surrogate_gradient(const SubsystemChannels& sub, const CovariancePair& qp,
                                      const PsdMatrix& q1_anchor, const PowerBudget& budget);

struct InnerSolution {
    CovariancePair covariances;
    double surrogate = 0.0;
    int iterations = 0;
};

/// Projected gradient ascent on the convex subproblem starting from `start`.
/// Every iterate satisfies Q ⪰ 0, Tr(Q1) <= P_S, Tr(Q2) <= min(P_Q, P_h).
InnerSolution solve_inner_from(const SubsystemChannels& sub, const PsdMatrix& q1_anchor, const CovariancePair& start,
                               const PowerBudget& budget, const ScaSettings& settings);

/// Same, starting from (anchor, equal-power Q2).
CovariancePair solve_inner(const SubsystemChannels& sub, const PsdMatrix& q1_anchor, const PowerBudget& budget,
                           const ScaSettings& settings);

/// Outer SCA loop: anchor at equal power, re-anchor on each inner solution
/// until the true objective stalls, then recover W_i by Cholesky.
ScaResult sca_precoding(const SubsystemChannels& sub, const PowerBudget& budget, const ScaSettings& settings = {});

/// Q1 = (P_S/M_h)·I, Q2 = (P_h/N_I)·I.
CovariancePair equal_power(const SubsystemChannels& sub, const PowerBudget& budget);

}  // namespace fdswipt
