// SPDX-License-Identifier: Apache-2.0
//
// fdswipt: full-duplex MIMO energy harvesting / information transfer toolkit
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fdswipt/numerics.hpp"

namespace fdswipt {

struct SubsystemConfig;

/// dBm -> W and back. All power conversions in the project go through these.
double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

struct ChannelParams {
    int m = 4;  ///< antennas at the energy source / information sink (P1)
    int n = 4;  ///< antennas at the harvesting node (P2)
    double rician_k_db = 10.0;
    double si_attenuation_db = 0.0;
    double noise_psd_dbm_hz = -169.0;
    double bandwidth_hz = 1e6;

    /// Throws ContractError unless m, n >= 2 and bandwidth > 0.
    void validate() const;
    /// Per-antenna noise power σ² in watts.
    double noise_power() const;
};

/// Full CSI for one coherence interval.
///
/// `h` is the N×M direct link (P1 -> P2); the reverse link is its transpose.
/// `si1` (M×M) couples P1's transmit antennas (columns) into its receive
/// antennas (rows); `si2` (N×N) is the same at P2.
struct ChannelRealization {
    CMatrix h;
    CMatrix si1;
    CMatrix si2;
    std::uint64_t seed = 0;

    int m() const noexcept { return static_cast<int>(h.cols()); }
    int n() const noexcept { return static_cast<int>(h.rows()); }
};

/// Channel blocks seen by one antenna partition.
struct SubsystemChannels {
    CMatrix h_it;       ///< M_I×N_I, P2 -> P1 information link
    CMatrix h_eh;       ///< N_h×M_h, P1 -> P2 energy link
    CMatrix si1;        ///< M_I×M_h, self-interference at P1
    CMatrix si2;        ///< N_h×N_I, self-interference at P2 (harvested)
    CMatrix sigma1;     ///< M_I×M_I noise covariance at P1
    CMatrix sigma2;     ///< N_h×N_h noise covariance at P2

    Eigen::Index m_it() const noexcept { return h_it.rows(); }
    Eigen::Index n_it() const noexcept { return h_it.cols(); }
    Eigen::Index m_eh() const noexcept { return h_eh.cols(); }
    Eigen::Index n_eh() const noexcept { return h_eh.rows(); }
};

/// Deterministic near-field line-of-sight component of an SI matrix. Unit modulus entries.
CMatrix si_line_of_sight(int antennas);

/// Draws H (Rayleigh, unit mean power) then SI1, SI2 (Rician) from one stream seeded by `rng_seed`.
ChannelRealization sample_channel(const ChannelParams& params, std::uint64_t rng_seed);

/// σ² · I_dim with σ² = 10^((psd_dbm_hz - 30)/10) · bandwidth.
CMatrix noise_covariance(double psd_dbm_hz, double bandwidth_hz, int dim);

/// Slices a realization into the blocks for `config`.
SubsystemChannels partition(const ChannelRealization& chan, const SubsystemConfig& config,
                            double noise_power);

/// Plain-text realization format, see README "Channel file format".
void write_channel(std::ostream& os, const ChannelRealization& chan);
ChannelRealization read_channel(std::istream& is);

std::string format_complex(Complex z);
Complex parse_complex(const std::string& token);

}  // namespace fdswipt
