// SPDX-License-Identifier: Apache-2.0
//
// Random fixtures shared by the unit tests and the acceptance binary.

#pragma once

#include <cmath>
#include <random>

#include "fdswipt/channel.hpp"
#include "fdswipt/metrics.hpp"

namespace fdswipt::testing {

inline CMatrix random_complex(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, std::sqrt(0.5) * scale);
    CMatrix a(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = Complex(g(rng), g(rng));
    return a;
}

/// G·G† with G of the given rank, scaled to trace `trace`.
inline CMatrix random_psd(Eigen::Index dim, std::mt19937_64& rng, double trace, Eigen::Index rank = -1) {
    if (rank < 0) rank = dim;
    const CMatrix g = random_complex(dim, rank, rng);
    CMatrix q = g * g.adjoint();
    q = 0.5 * (q + q.adjoint()).eval();
    const double t = q.trace().real();
    return t > 0 ? CMatrix(q * (trace / t)) : q;
}

inline CMatrix random_hermitian(Eigen::Index dim, std::mt19937_64& rng) {
    const CMatrix a = random_complex(dim, dim, rng);
    return 0.5 * (a + a.adjoint());
}

/// Subsystem blocks with unit-variance entries and σ²·I noise.
inline SubsystemChannels random_subsystem(int m_h, int m_i, int n_h, int n_i, std::mt19937_64& rng,
                                          double noise, double si_scale = 1.0) {
    SubsystemChannels s;
    s.h_it = random_complex(m_i, n_i, rng);
    s.h_eh = random_complex(n_h, m_h, rng);
    s.si1 = random_complex(m_i, m_h, rng, si_scale);
    s.si2 = random_complex(n_h, n_i, rng, si_scale);
    s.sigma1 = noise * CMatrix::Identity(m_i, m_i);
    s.sigma2 = noise * CMatrix::Identity(n_h, n_h);
    return s;
}

inline CovariancePair random_pair(const SubsystemChannels& s, std::mt19937_64& rng, double t1, double t2) {
    return {PsdMatrix::from(random_psd(s.m_eh(), rng, t1)), PsdMatrix::from(random_psd(s.n_it(), rng, t2))};
}

/// Uniform integer in [lo, hi].
inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace fdswipt::testing
