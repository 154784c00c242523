// SPDX-License-Identifier: Apache-2.0
//
// fdswipt: full-duplex MIMO energy harvesting / information transfer toolkit
// ------------------------------------------------------------------------

#pragma once

#include "fdswipt/channel.hpp"
#include "fdswipt/numerics.hpp"

namespace fdswipt {

/// How harvested watts are mixed with bps/Hz in the weighted objective.
enum class EnergyMixing {
    Normalized,  ///< energy divided by P_S before mixing (default)
    Raw,         ///< watts added to bps/Hz as written in the original problem
};

struct PowerBudget {
    double ps = 1.0;     ///< max transmit power at P1 [W]
    double ph = 1.0;     ///< power available at P2 [W]
    double pq = 1.0;     ///< QoS harvesting target, also the Q2 cap of the convex subproblem [W]
    double alpha = 0.5;  ///< rate weight, strictly inside (0, 1)
    EnergyMixing mixing = EnergyMixing::Normalized;

    /// Throws ContractError on alpha outside (0,1), ps <= 0, ph outside [0, ps] or pq < 0.
    void validate() const;

    /// Budget with P_h = P_Q = P_S (initial full charge, QoS target equal to the source budget).
    static PowerBudget at_source_power(double ps_watts, double alpha = 0.5,
                                       EnergyMixing mixing = EnergyMixing::Normalized);
};

/// Transmit covariances. q1 is M_h×M_h at P1, q2 is N_I×N_I at P2.
struct CovariancePair {
    PsdMatrix q1;
    PsdMatrix q2;
};

/// Scalar σ² of a noise covariance σ²·I. Throws ContractError otherwise.
double noise_level(const CMatrix& sigma);

/// log2|I + (Σ1 + SI1·Q1·SI1†)^-1 · H_I·Q2·H_I†|, evaluated in whitened form:
/// singular values of (Σ1 + SI1 Q1 SI1†)^-1/2 · H_I · Q2^1/2.
///
/// Covariances are used through `psd_factor`. At the default noise floor and tens of dBm
/// the SNR exceeds 1e13, and assembling Σ1 + SI1 Q1 SI1† densely would lose
/// the noise term to roundoff.
double info_rate(const SubsystemChannels& sub, const CovariancePair& qp);

/// Same quantity as the difference of two log-dets,
/// log2|Σ1 + SI1 Q1 SI1† + H_I Q2 H_I†| - log2|Σ1 + SI1 Q1 SI1†|.
double info_rate_two_logdet(const SubsystemChannels& sub, const CovariancePair& qp);

/// Tr(H_h Q1 H_h† + SI2 Q2 SI2† + Σ2) in watts.
double harvested_power(const SubsystemChannels& sub, const CovariancePair& qp);

double weighted_objective(double rate, double energy_watts, const PowerBudget& budget);

/// γ = 2^rate - 1.
double effective_sinr(double rate);

/// Harvest-then-transmit reference: equal-power harvesting over the full
/// array for a fraction `ts_tau` of the slot, then half-duplex equal-power
/// transmission over all N antennas for the rest.
struct TimeSwitchingOutcome {
    double rate = 0.0;
    double harvested_watts = 0.0;  ///< P_h available for the transmit phase (clamped at P_S)
};

TimeSwitchingOutcome time_switching(const ChannelRealization& chan, const PowerBudget& budget,
                                    double ts_tau, double noise_power);

double time_switching_rate(const ChannelRealization& chan, const PowerBudget& budget,
                           double ts_tau, double noise_power);

}  // namespace fdswipt
