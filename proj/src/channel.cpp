// SPDX-License-Identifier: Apache-2.0
//
// fdswipt: full-duplex MIMO energy harvesting / information transfer toolkit
// ------------------------------------------------------------------------

#include "fdswipt/channel.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "fdswipt/allocation.hpp"

namespace fdswipt {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

void ChannelParams::validate() const {
    if (m < 2 || n < 2) {
        std::ostringstream os;
        os << "ChannelParams: need at least two antennas per device, got M=" << m << " N=" << n;
        throw ContractError(os.str());
    }
    if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz)) {
        throw ContractError("ChannelParams: bandwidth_hz must be positive");
    }
    if (std::isnan(rician_k_db) || std::isnan(si_attenuation_db) || !std::isfinite(noise_psd_dbm_hz)) {
        throw ContractError("ChannelParams: non-finite model parameter");
    }
}

double ChannelParams::noise_power() const {
    return std::pow(10.0, (noise_psd_dbm_hz - 30.0) / 10.0) * bandwidth_hz;
}

CMatrix si_line_of_sight(int antennas) {
    // Half-wavelength ULA; transmit and receive chains offset by a quarter wavelength.
    CMatrix los(antennas, antennas);
    for (int r = 0; r < antennas; ++r) {
        for (int t = 0; t < antennas; ++t) {
            const double sep = 0.5 * std::abs(r - t);
            const double dist = std::sqrt(sep * sep + 0.0625);
            los(r, t) = std::polar(1.0, -2.0 * std::numbers::pi * dist);
        }
    }
    return los;
}

namespace {

class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

    /// CN(0, 1): independent real and imaginary parts with variance 1/2.
    Complex circular() {
        const double re = normal_(engine_);
        const double im = normal_(engine_);
        return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
    }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

CMatrix rayleigh_block(GaussianSource& src, int rows, int cols) {
    CMatrix out(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) out(r, c) = src.circular();
    return out;
}

CMatrix rician_block(GaussianSource& src, int antennas, double k_db, double attenuation_db) {
    const double gain = std::sqrt(std::pow(10.0, -attenuation_db / 10.0));
    double los_amp = 1.0;
    double nlos_amp = 0.0;
    if (!std::isinf(k_db) || k_db < 0.0) {
        const double k = std::pow(10.0, k_db / 10.0);
        los_amp = std::sqrt(k / (k + 1.0));
        nlos_amp = std::sqrt(1.0 / (k + 1.0));
    }
    const CMatrix los = si_line_of_sight(antennas);
    CMatrix out(antennas, antennas);
    for (int r = 0; r < antennas; ++r) {
        for (int c = 0; c < antennas; ++c) {
            // Always consume the draw so the stream layout does not depend on K.
            const Complex scatter = src.circular();
            out(r, c) = gain * (los_amp * los(r, c) + nlos_amp * scatter);
        }
    }
    return out;
}

}  // namespace

ChannelRealization sample_channel(const ChannelParams& params, std::uint64_t rng_seed) {
    params.validate();
    GaussianSource src(rng_seed);
    ChannelRealization chan;
    chan.seed = rng_seed;
    chan.h = rayleigh_block(src, params.n, params.m);
    chan.si1 = rician_block(src, params.m, params.rician_k_db, params.si_attenuation_db);
    chan.si2 = rician_block(src, params.n, params.rician_k_db, params.si_attenuation_db);
    return chan;
}

CMatrix noise_covariance(double psd_dbm_hz, double bandwidth_hz, int dim) {
    if (dim < 1) throw ContractError("noise_covariance: dim must be >= 1");
    if (!(bandwidth_hz > 0.0)) throw ContractError("noise_covariance: bandwidth must be positive");
    const double sigma2 = std::pow(10.0, (psd_dbm_hz - 30.0) / 10.0) * bandwidth_hz;
    return CMatrix::Identity(dim, dim) * Complex(sigma2, 0.0);
}

namespace {

CMatrix slice(const CMatrix& a, const std::vector<int>& rows, const std::vector<int>& cols) {
    CMatrix out(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = a(rows[r], cols[c]);
    return out;
}

}  // namespace

SubsystemChannels partition(const ChannelRealization& chan, const SubsystemConfig& config,
                            double noise_power) {
    config.validate(chan.m(), chan.n());
    if (!(noise_power > 0.0)) throw ContractError("partition: noise power must be positive");
    SubsystemChannels sub;
    // Reverse link is the transpose of H: rows are P1 receive antennas.
    sub.h_it = slice(chan.h, config.p2_it, config.p1_it).transpose();
    sub.h_eh = slice(chan.h, config.p2_eh, config.p1_eh);
    sub.si1 = slice(chan.si1, config.p1_it, config.p1_eh);
    sub.si2 = slice(chan.si2, config.p2_eh, config.p2_it);
    const auto m_it = static_cast<Eigen::Index>(config.p1_it.size());
    const auto n_eh = static_cast<Eigen::Index>(config.p2_eh.size());
    sub.sigma1 = CMatrix::Identity(m_it, m_it) * Complex(noise_power, 0.0);
    sub.sigma2 = CMatrix::Identity(n_eh, n_eh) * Complex(noise_power, 0.0);
    return sub;
}

std::string format_complex(Complex z) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
    return buf;
}

Complex parse_complex(const std::string& token) {
    if (token.empty() || token.back() != 'i') {
        throw ContractError("parse_complex: expected a+bi, got '" + token + "'");
    }
    // The imaginary part starts at the last sign that is not part of an exponent.
    std::size_t split = std::string::npos;
    for (std::size_t k = token.size() - 1; k > 0; --k) {
        if ((token[k] == '+' || token[k] == '-') && token[k - 1] != 'e' && token[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    if (split == std::string::npos) throw ContractError("parse_complex: missing imaginary part in '" + token + "'");
    try {
        std::size_t used = 0;
        const std::string re_text = token.substr(0, split);
        const std::string im_text = token.substr(split, token.size() - split - 1);
        const double re = std::stod(re_text, &used);
        if (used != re_text.size()) throw std::invalid_argument("trailing");
        const double im = std::stod(im_text, &used);
        if (used != im_text.size()) throw std::invalid_argument("trailing");
        return {re, im};
    } catch (const std::logic_error&) {
        throw ContractError("parse_complex: malformed token '" + token + "'");
    }
}

namespace {

void write_block(std::ostream& os, const char* name, const CMatrix& a) {
    os << name << ' ' << a.rows() << ' ' << a.cols() << '\n';
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            if (c) os << ' ';
            os << format_complex(a(r, c));
        }
        os << '\n';
    }
}

CMatrix read_block(std::istream& is, const char* name, Eigen::Index rows, Eigen::Index cols) {
    std::string tag;
    Eigen::Index r = 0;
    Eigen::Index c = 0;
    if (!(is >> tag >> r >> c) || tag != name) {
        throw ContractError(std::string("read_channel: expected block '") + name + "'");
    }
    if (r != rows || c != cols) {
        std::ostringstream os;
        os << "read_channel: block " << name << " is " << r << "x" << c << ", expected " << rows
           << "x" << cols;
        throw ContractError(os.str());
    }
    CMatrix out(rows, cols);
    std::string token;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
            if (!(is >> token)) throw ContractError(std::string("read_channel: truncated block ") + name);
            out(i, j) = parse_complex(token);
        }
    return out;
}

}  // namespace

void write_channel(std::ostream& os, const ChannelRealization& chan) {
    os << "fdswipt-channel 1\n";
    os << "dims " << chan.m() << ' ' << chan.n() << '\n';
    os << "seed " << chan.seed << '\n';
    write_block(os, "H", chan.h);
    write_block(os, "SI1", chan.si1);
    write_block(os, "SI2", chan.si2);
}

ChannelRealization read_channel(std::istream& is) {
    std::string magic;
    int version = 0;
    if (!(is >> magic >> version) || magic != "fdswipt-channel" || version != 1) {
        throw ContractError("read_channel: missing 'fdswipt-channel 1' header");
    }
    std::string tag;
    int m = 0;
    int n = 0;
    if (!(is >> tag >> m >> n) || tag != "dims" || m < 1 || n < 1) {
        throw ContractError("read_channel: malformed dims line");
    }
    ChannelRealization chan;
    if (!(is >> tag >> chan.seed) || tag != "seed") throw ContractError("read_channel: malformed seed line");
    chan.h = read_block(is, "H", n, m);
    chan.si1 = read_block(is, "SI1", m, m);
    chan.si2 = read_block(is, "SI2", n, n);
    return chan;
}

}  // namespace fdswipt
