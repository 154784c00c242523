// SPDX-License-Identifier: Apache-2.0
//
// fdswipt: full-duplex MIMO energy harvesting / information transfer toolkit
// ------------------------------------------------------------------------

#include "fdswipt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fdswipt {

void PowerBudget::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        std::ostringstream os;
        os << "PowerBudget: alpha must lie strictly inside (0,1), got " << alpha;
        throw ContractError(os.str());
    }
    if (!(ps > 0.0) || !std::isfinite(ps)) throw ContractError("PowerBudget: P_S must be positive");
    if (!(ph >= 0.0 && ph <= ps * (1.0 + 1e-12))) {
        std::ostringstream os;
        os << "PowerBudget: P_h=" << ph << " outside [0, P_S=" << ps << "]";
        throw ContractError(os.str());
    }
    if (!(pq >= 0.0) || !std::isfinite(pq)) throw ContractError("PowerBudget: P_Q must be >= 0");
}

PowerBudget PowerBudget::at_source_power(double ps_watts, double alpha, EnergyMixing mixing) {
    PowerBudget b{ps_watts, ps_watts, ps_watts, alpha, mixing};
    b.validate();
    return b;
}

namespace {

void check_shapes(const SubsystemChannels& sub, const CovariancePair& qp) {
    if (qp.q1.dim() != sub.m_eh() || qp.q2.dim() != sub.n_it()) {
        std::ostringstream os;
        os << "covariance shapes " << qp.q1.dim() << "/" << qp.q2.dim() << " do not match subsystem M_h="
           << sub.m_eh() << " N_I=" << sub.n_it();
        throw ContractError(os.str());
    }
}

}  // namespace

double noise_level(const CMatrix& sigma) {
    const Eigen::Index n = sigma.rows();
    if (n == 0) return 1.0;
    const double level = sigma(0, 0).real();
    const CMatrix scalar = CMatrix::Identity(n, n) * Complex(level, 0.0);
    if (!(level > 0.0) || (sigma - scalar).cwiseAbs().maxCoeff() > 1e-12 * level)
        throw ContractError("noise covariance must be a positive multiple of the identity");
    return level;
}

double info_rate(const SubsystemChannels& sub, const CovariancePair& qp) {
    check_shapes(sub, qp);
    const double s2 = noise_level(sub.sigma1);
    const Eigen::Index dim = sub.m_it();
    // Interference-plus-noise Σ1 + SI1·Q1·SI1† = U·diag(σ²+s²)·U† from the SVD of SI1·F1.
    const CMatrix interference = sub.si1 * psd_factor(qp.q1.matrix());
    RVector level = RVector::Constant(dim, s2);
    CMatrix u = CMatrix::Identity(dim, dim);
    if (interference.cols() > 0) {
        Eigen::JacobiSVD<CMatrix> svd(interference, Eigen::ComputeFullU);
        const RVector& sv = svd.singularValues();
        for (Eigen::Index i = 0; i < sv.size(); ++i) level(i) += sv(i) * sv(i);
        u = svd.matrixU();
    }
    // Whitened signal (Σ1 + SI1 Q1 SI1†)^-1/2 · H_I · F2.
    const CMatrix whitened =
        level.cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal() * (u.adjoint() * (sub.h_it * psd_factor(qp.q2.matrix())));
    if (whitened.cols() == 0) return 0.0;
    Eigen::JacobiSVD<CMatrix> svd(whitened);
    double rate = 0.0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        const double t = svd.singularValues()(i);
        rate += std::log2(1.0 + t * t);
    }
    return rate;
}

double info_rate_two_logdet(const SubsystemChannels& sub, const CovariancePair& qp) {
    check_shapes(sub, qp);
    const double s2 = noise_level(sub.sigma1);
    const Eigen::Index dim = sub.m_it();
    const CMatrix interference = sub.si1 * psd_factor(qp.q1.matrix());
    const CMatrix signal = sub.h_it * psd_factor(qp.q2.matrix());
    CMatrix total(dim, interference.cols() + signal.cols());
    total << interference, signal;
    return std::max(0.0, logdet_noise_plus_gram(s2, dim, total) - logdet_noise_plus_gram(s2, dim, interference));
}

double harvested_power(const SubsystemChannels& sub, const CovariancePair& qp) {
    check_shapes(sub, qp);
    const double direct = real_trace(sub.h_eh * qp.q1.matrix() * sub.h_eh.adjoint());
    const double self = real_trace(sub.si2 * qp.q2.matrix() * sub.si2.adjoint());
    return direct + self + real_trace(sub.sigma2);
}

double weighted_objective(double rate, double energy_watts, const PowerBudget& budget) {
    budget.validate();
    const double energy = budget.mixing == EnergyMixing::Normalized ? energy_watts / budget.ps : energy_watts;
    return budget.alpha * rate + (1.0 - budget.alpha) * energy;
}

double effective_sinr(double rate) {
    if (rate < 0.0) throw ContractError("effective_sinr: rate must be >= 0");
    return std::exp2(rate) - 1.0;
}

TimeSwitchingOutcome time_switching(const ChannelRealization& chan, const PowerBudget& budget,
                                    double ts_tau, double noise_power) {
    if (!(ts_tau > 0.0 && ts_tau < 1.0)) throw ContractError("time_switching: ts_tau must lie in (0,1)");
    if (!(noise_power > 0.0)) throw ContractError("time_switching: noise power must be positive");
    budget.validate();
    const int m = chan.m();
    const int n = chan.n();

    // Harvest phase: P1 radiates P_S equally over all M antennas.
    const double per_antenna = budget.ps / m;
    const double received = per_antenna * chan.h.squaredNorm() + n * noise_power;
    TimeSwitchingOutcome out;
    out.harvested_watts = std::min(ts_tau * received, budget.ps);

    // Transmit phase: P2 -> P1 over the transposed link, no self-interference.
    const CMatrix reverse = chan.h.transpose();  // M×N
    const double q2 = out.harvested_watts / n;
    const CMatrix signal = reverse * Complex(std::sqrt(q2), 0.0);
    const double gain = logdet_noise_plus_gram(noise_power, m, signal) - m * std::log2(noise_power);
    out.rate = (1.0 - ts_tau) * std::max(0.0, gain);
    return out;
}

double time_switching_rate(const ChannelRealization& chan, const PowerBudget& budget, double ts_tau,
                           double noise_power) {
    return time_switching(chan, budget, ts_tau, noise_power).rate;
}

}  // namespace fdswipt
