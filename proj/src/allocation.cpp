// SPDX-License-Identifier: Apache-2.0
//
// fdswipt: full-duplex MIMO energy harvesting / information transfer toolkit
// ------------------------------------------------------------------------

#include "fdswipt/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fdswipt {

namespace {

std::uint32_t mask_of(const std::vector<int>& set) {
    std::uint32_t mask = 0;
    for (int i : set) mask |= (1u << i);
    return mask;
}

void split_mask(std::uint32_t mask, int count, std::vector<int>& in, std::vector<int>& out) {
    in.clear();
    out.clear();
    for (int i = 0; i < count; ++i) ((mask >> i) & 1u ? in : out).push_back(i);
}

std::int64_t delta_of(int n, std::uint32_t p1_mask, std::uint32_t p2_mask) {
    const std::int64_t per_p1 = (std::int64_t{1} << n) - 2;
    return static_cast<std::int64_t>(p1_mask - 1) * per_p1 + static_cast<std::int64_t>(p2_mask - 1);
}

void check_dims(int m, int n, const char* what) {
    if (m < 2 || n < 2) {
        std::ostringstream os;
        os << what << ": need M, N >= 2, got M=" << m << " N=" << n;
        throw ContractError(os.str());
    }
    if (m > 30 || n > 30) throw ContractError(std::string(what) + ": antenna count exceeds 30");
}

}  // namespace

std::uint32_t SubsystemConfig::p1_eh_mask() const { return mask_of(p1_eh); }
std::uint32_t SubsystemConfig::p2_eh_mask() const { return mask_of(p2_eh); }

void SubsystemConfig::validate(int m, int n) const {
    auto fail = [&](const std::string& why) {
        throw ContractError("SubsystemConfig " + to_string(*this) + ": " + why);
    };
    if (p1_eh.empty() || p1_it.empty() || p2_eh.empty() || p2_it.empty()) fail("every antenna set must be nonempty");
    auto covers = [](const std::vector<int>& a, const std::vector<int>& b, int count) {
        std::vector<int> seen(count, 0);
        for (int i : a) {
            if (i < 0 || i >= count) return false;
            ++seen[i];
        }
        for (int i : b) {
            if (i < 0 || i >= count) return false;
            ++seen[i];
        }
        return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
    };
    if (!covers(p1_eh, p1_it, m)) fail("P1 sets are not a disjoint cover of the array");
    if (!covers(p2_eh, p2_it, n)) fail("P2 sets are not a disjoint cover of the array");
}

std::int64_t config_count(int m, int n) {
    check_dims(m, n, "config_count");
    return ((std::int64_t{1} << m) - 2) * ((std::int64_t{1} << n) - 2);
}

SubsystemConfig config_from_masks(int m, int n, std::uint32_t p1_eh_mask, std::uint32_t p2_eh_mask) {
    check_dims(m, n, "config_from_masks");
    const std::uint32_t full1 = (1u << m) - 1;
    const std::uint32_t full2 = (1u << n) - 1;
    if (p1_eh_mask == 0 || p1_eh_mask >= full1 || p2_eh_mask == 0 || p2_eh_mask >= full2) {
        throw ContractError("config_from_masks: masks must leave both sets nonempty on each side");
    }
    SubsystemConfig c;
    split_mask(p1_eh_mask, m, c.p1_eh, c.p1_it);
    split_mask(p2_eh_mask, n, c.p2_eh, c.p2_it);
    c.delta = static_cast<int>(delta_of(n, p1_eh_mask, p2_eh_mask));
    return c;
}

std::vector<SubsystemConfig> enumerate_configs(int m, int n) {
    const std::int64_t total = config_count(m, n);
    if (total > 50'000'000) throw ContractError("enumerate_configs: configuration space too large");
    std::vector<SubsystemConfig> out;
    out.reserve(static_cast<std::size_t>(total));
    const std::uint32_t full1 = (1u << m) - 1;
    const std::uint32_t full2 = (1u << n) - 1;
    for (std::uint32_t a = 1; a < full1; ++a)
        for (std::uint32_t b = 1; b < full2; ++b) out.push_back(config_from_masks(m, n, a, b));
    return out;
}

std::string to_string(const SubsystemConfig& config) {
    std::ostringstream os;
    auto list = [&](const std::vector<int>& v) {
        for (std::size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << v[k] + 1;
    };
    os << "delta=" << config.delta << ";p1_eh=";
    list(config.p1_eh);
    os << ";p2_eh=";
    list(config.p2_eh);
    return os.str();
}

SubsystemConfig parse_config(const std::string& text, int m, int n) {
    check_dims(m, n, "parse_config");
    std::uint32_t p1 = 0;
    std::uint32_t p2 = 0;
    bool have_p1 = false;
    bool have_p2 = false;
    std::istringstream fields(text);
    std::string field;
    while (std::getline(fields, field, ';')) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) throw ContractError("parse_config: field without '=' in '" + text + "'");
        const std::string key = field.substr(0, eq);
        const std::string value = field.substr(eq + 1);
        if (key == "delta") continue;  // recomputed from the masks
        if (key != "p1_eh" && key != "p2_eh") throw ContractError("parse_config: unknown key '" + key + "'");
        const int limit = key == "p1_eh" ? m : n;
        std::uint32_t mask = 0;
        std::istringstream items(value);
        std::string item;
        while (std::getline(items, item, ',')) {
            int label = 0;
            try {
                label = std::stoi(item);
            } catch (const std::logic_error&) {
                throw ContractError("parse_config: bad antenna label '" + item + "'");
            }
            if (label < 1 || label > limit) throw ContractError("parse_config: antenna label out of range: " + item);
            mask |= 1u << (label - 1);
        }
        (key == "p1_eh" ? p1 : p2) = mask;
        (key == "p1_eh" ? have_p1 : have_p2) = true;
    }
    if (!have_p1 || !have_p2) throw ContractError("parse_config: need both p1_eh and p2_eh in '" + text + "'");
    return config_from_masks(m, n, p1, p2);
}

AllocationResult allocate_antennas_traced(const ChannelRealization& chan, double ps_watts, double pq_watts,
                                          SeedPairRule rule) {
    const int m = chan.m();
    const int n = chan.n();
    check_dims(m, n, "allocate_antennas");
    const Eigen::MatrixXd gain = chan.h.cwiseAbs2();  // N×M, gain(n, m) = |h_{n,m}|^2

    // Seed pair: first minimum (or maximum) in column-major scan order.
    int seed_m = 0;
    int seed_n = 0;
    for (int mm = 0; mm < m; ++mm)
        for (int nn = 0; nn < n; ++nn) {
            const bool better = rule == SeedPairRule::MinGain ? gain(nn, mm) < gain(seed_n, seed_m)
                                                               : gain(nn, mm) > gain(seed_n, seed_m);
            if (better) {
                seed_m = mm;
                seed_n = nn;
            }
        }

    std::vector<bool> p1_eh(m, false);
    std::vector<bool> p2_eh(n, false);
    p1_eh[seed_m] = true;
    p2_eh[seed_n] = true;
    int m_it = m - 1;
    int n_it = n - 1;
    int m_h = 1;

    AllocationResult result;
    result.seed_p1 = seed_m;
    result.seed_p2 = seed_n;

    const Eigen::VectorXd col_norm = chan.h.colwise().norm().transpose();  // per P1 antenna
    const Eigen::VectorXd row_norm = chan.h.rowwise().norm();              // per P2 antenna

    auto eh_estimate = [&] {
        double total = 0.0;
        for (int nn = 0; nn < n; ++nn)
            for (int mm = 0; mm < m; ++mm)
                if (p2_eh[nn] && p1_eh[mm]) total += ps_watts * gain(nn, mm) / m_h;
        return total;
    };

    for (double estimate = eh_estimate(); estimate < pq_watts && m_it > 1 && n_it > 1; estimate = eh_estimate()) {
        int best_m = -1;
        int best_n = -1;
        for (int mm = 0; mm < m; ++mm)
            if (!p1_eh[mm] && (best_m < 0 || col_norm(mm) < col_norm(best_m))) best_m = mm;
        for (int nn = 0; nn < n; ++nn)
            if (!p2_eh[nn] && (best_n < 0 || row_norm(nn) < row_norm(best_n))) best_n = nn;

        AllocationStep step;
        step.eh_power_estimate = estimate;
        if (col_norm(best_m) <= row_norm(best_n)) {
            p1_eh[best_m] = true;
            --m_it;
            ++m_h;
            step.moved_p1 = best_m;
        } else {
            p2_eh[best_n] = true;
            --n_it;
            step.moved_p2 = best_n;
        }
        result.steps.push_back(step);
    }

    std::uint32_t mask1 = 0;
    std::uint32_t mask2 = 0;
    for (int mm = 0; mm < m; ++mm)
        if (p1_eh[mm]) mask1 |= 1u << mm;
    for (int nn = 0; nn < n; ++nn)
        if (p2_eh[nn]) mask2 |= 1u << nn;
    result.config = config_from_masks(m, n, mask1, mask2);
    return result;
}

SubsystemConfig allocate_antennas(const ChannelRealization& chan, double ps_watts, double pq_watts,
                                  SeedPairRule rule) {
    return allocate_antennas_traced(chan, ps_watts, pq_watts, rule).config;
}

namespace {

/// Diagonal power vectors with entries k*cap/(levels-1) whose sum stays within cap,
/// in lexicographic order of the level indices.
std::vector<std::vector<double>> grid_points(int dim, int levels, double cap) {
    std::vector<std::vector<double>> out;
    std::vector<int> idx(dim, 0);
    const double unit = cap / (levels - 1);
    while (true) {
        int total = 0;
        for (int v : idx) total += v;
        if (total <= levels - 1) {
            std::vector<double> p(dim);
            for (int k = 0; k < dim; ++k) p[k] = idx[k] * unit;
            out.push_back(std::move(p));
        }
        int k = dim - 1;
        while (k >= 0 && idx[k] == levels - 1) idx[k--] = 0;
        if (k < 0) break;
        ++idx[k];
    }
    return out;
}

PsdMatrix diagonal_psd(const std::vector<double>& p) {
    CMatrix d = CMatrix::Zero(p.size(), p.size());
    for (std::size_t k = 0; k < p.size(); ++k) d(k, k) = p[k];
    return PsdMatrix::from(d);
}

}  // namespace

ExhaustiveResult exhaustive_search(const ChannelRealization& chan, const PowerBudget& budget, int power_grid,
                                   double noise_power, const std::optional<SubsystemConfig>& only_config) {
    budget.validate();
    const int m = chan.m();
    const int n = chan.n();
    if (m > kExhaustiveMaxAntennas || n > kExhaustiveMaxAntennas) {
        std::ostringstream os;
        os << "exhaustive_search: refusing M=" << m << " N=" << n << " (guard M, N <= "
           << kExhaustiveMaxAntennas << ")";
        throw ContractError(os.str());
    }
    if (power_grid < 2) throw ContractError("exhaustive_search: power_grid must be >= 2");

    std::vector<SubsystemConfig> configs;
    if (only_config) {
        only_config->validate(m, n);
        configs.push_back(*only_config);
    } else {
        configs = enumerate_configs(m, n);
    }

    const double q2_cap = std::min(budget.pq, budget.ph);
    ExhaustiveResult best;
    best.objective = -std::numeric_limits<double>::infinity();
    for (const SubsystemConfig& config : configs) {
        const SubsystemChannels sub = partition(chan, config, noise_power);
        const auto q1_grid = grid_points(static_cast<int>(config.p1_eh.size()), power_grid, budget.ps);
        const auto q2_grid = grid_points(static_cast<int>(config.p2_it.size()), power_grid, q2_cap);
        for (const auto& p1 : q1_grid) {
            const PsdMatrix q1 = diagonal_psd(p1);
            for (const auto& p2 : q2_grid) {
                CovariancePair qp{q1, diagonal_psd(p2)};
                const double value =
                    weighted_objective(info_rate(sub, qp), harvested_power(sub, qp), budget);
                ++best.evaluated_points;
                if (value > best.objective) {
                    best.objective = value;
                    best.config = config;
                    best.covariances = std::move(qp);
                }
            }
        }
    }
    return best;
}

}  // namespace fdswipt
