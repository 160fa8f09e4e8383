// QQ data: exact step series of a G-transform against the standard
// Gaussian, and Monte-Carlo samples of the G^2 / chi^2 statistics paired
// with chi-square reference quantiles.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "siglik/dist.hpp"
#include "siglik/signed_loglik.hpp"
#include "siglik/special.hpp"
#include "siglik/table.hpp"
#include "siglik/verify.hpp"

namespace siglik {

// ---------------------------------------------------------------------------
// Exact step series

struct StepPoint {
    std::int64_t x;
    double g;
    double lower;  // Phi^-1 P(X < x), -inf at the support minimum
    double upper;  // Phi^-1 P(X <= x), +inf at the support maximum
};

struct StepSeries {
    std::vector<StepPoint> points;
};

namespace detail {

inline double quantile_or_inf(double u) {
    if (u <= 0.0) return -inf;
    if (u >= 1.0) return inf;
    return gaussian_quantile(u);
}

}  // namespace detail

// Full step series of the quantile transform between g(X) and a standard
// Gaussian. Discrete distributions only; the Poisson support is cut off
// once the upper tail drops below 1e-12.
inline StepSeries qq_exact_steps(const DistSpec& dist) {
    std::int64_t lo, hi;
    bool truncated = false;
    if (const auto* h = std::get_if<Hypergeometric>(&dist)) {
        lo = h->support_min();
        hi = h->support_max();
    } else if (const auto* b = std::get_if<Binomial>(&dist)) {
        lo = 0;
        hi = b->trials;
    } else if (const auto* p = std::get_if<Poisson>(&dist)) {
        lo = 0;
        hi = static_cast<std::int64_t>(std::ceil(p->lambda + 12.0 * std::sqrt(p->lambda))) + 8;
        truncated = true;
    } else {
        throw std::domain_error("qq_exact_steps: needs a discrete distribution with finite support");
    }
    StepSeries series;
    double below = 0.0;
    for (std::int64_t x = lo; x <= hi; ++x) {
        double at = pmf(dist, static_cast<double>(x));
        double cum = cdf(dist, static_cast<double>(x));
        StepPoint pt;
        pt.x = x;
        pt.g = signed_ll(dist, static_cast<double>(x)).g;
        pt.lower = x == lo ? -inf : detail::quantile_or_inf(below);
        pt.upper = (!truncated && x == hi) ? inf : detail::quantile_or_inf(cum);
        series.points.push_back(pt);
        below = cum;
        if (truncated && 1.0 - cum < 1e-12 && at < 1e-12) break;
    }
    return series;
}

inline nlohmann::json to_json(const StepSeries& s) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : s.points) {
        nlohmann::json j;
        j["x"] = p.x;
        j["g"] = p.g;
        j["lower"] = std::isinf(p.lower) ? nlohmann::json() : nlohmann::json(p.lower);
        j["upper"] = std::isinf(p.upper) ? nlohmann::json() : nlohmann::json(p.upper);
        pts.push_back(j);
    }
    return nlohmann::json{{"points", pts}};
}

// ---------------------------------------------------------------------------
// RNG: xoshiro256** seeded through splitmix64. Sample streams are keyed
// by (seed, block index), so results are reproducible and independent of
// the worker count.

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Xoshiro256 {
  public:
    Xoshiro256(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t sm = seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next() {
        std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
    std::uint64_t state_[4];
};

inline constexpr std::int64_t kSampleBlock = 8192;

}  // namespace detail

enum class TableStatistic { G2, Chi2 };

namespace detail {

// Statistics tolerant of empty margins in a sampled table: cells whose
// expected count vanishes necessarily hold zero observations and
// contribute nothing.
inline double g2_of_counts(const std::vector<std::int64_t>& cells, std::size_t k, std::size_t l) {
    std::vector<std::int64_t> rs(k, 0), cs(l, 0);
    std::int64_t total = 0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < l; ++j) {
            rs[i] += cells[i * l + j];
            cs[j] += cells[i * l + j];
            total += cells[i * l + j];
        }
    }
    auto f = [](std::int64_t v) { return xlnx(static_cast<double>(v)); };
    double ni = f(total);
    for (std::size_t i = 0; i < k; ++i) ni -= f(rs[i]);
    for (std::size_t j = 0; j < l; ++j) ni -= f(cs[j]);
    for (std::int64_t c : cells) ni += f(c);
    return ni > 0.0 ? 2.0 * ni : 0.0;
}

inline double chi2_of_counts(const std::vector<std::int64_t>& cells, std::size_t k, std::size_t l) {
    std::vector<std::int64_t> rs(k, 0), cs(l, 0);
    std::int64_t total = 0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < l; ++j) {
            rs[i] += cells[i * l + j];
            cs[j] += cells[i * l + j];
            total += cells[i * l + j];
        }
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < l; ++j) {
            double expected = static_cast<double>(rs[i]) * static_cast<double>(cs[j]) /
                              static_cast<double>(total);
            if (expected == 0.0) continue;
            double diff = static_cast<double>(cells[i * l + j]) - expected;
            acc += diff * diff / expected;
        }
    }
    return acc;
}

}  // namespace detail

// Draw `count` tables from the multinomial null fitted to the expected
// table (cell probabilities R_i S_j / N^2, total N per draw) and return
// the chosen statistic of each. Reproducible from the seed and
// independent of worker_count.
inline std::vector<double> sample_statistics(const ContingencyTable& expected,
                                             TableStatistic statistic, std::int64_t count,
                                             std::uint64_t seed, int worker_count = 0) {
    if (count < 1) throw std::domain_error("sample_statistics: count must be >= 1");
    if (expected.has_zero_margin()) {
        throw std::domain_error("sample_statistics: expected table has a zero margin");
    }
    const std::size_t k = expected.rows(), l = expected.cols();
    const std::int64_t total = expected.total();
    std::vector<double> cum;
    cum.reserve(k * l);
    double acc = 0.0;
    double nn = static_cast<double>(total);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < l; ++j) {
            acc += static_cast<double>(expected.row_sum(i)) *
                   static_cast<double>(expected.col_sum(j)) / (nn * nn);
            cum.push_back(acc);
        }
    }
    cum.back() = 1.0;

    std::int64_t blocks = (count + detail::kSampleBlock - 1) / detail::kSampleBlock;
    std::vector<double> out(static_cast<std::size_t>(count));
    auto chunks = detail::run_indexed<int>(blocks, worker_count, [&](std::int64_t b) {
        detail::Xoshiro256 rng(seed, static_cast<std::uint64_t>(b));
        std::int64_t begin = b * detail::kSampleBlock;
        std::int64_t end = std::min(count, begin + detail::kSampleBlock);
        std::vector<std::int64_t> cells(k * l);
        for (std::int64_t s = begin; s < end; ++s) {
            std::fill(cells.begin(), cells.end(), 0);
            for (std::int64_t draw = 0; draw < total; ++draw) {
                double u = rng.uniform();
                std::size_t cell = 0;
                while (cell + 1 < cum.size() && u >= cum[cell]) ++cell;
                ++cells[cell];
            }
            out[static_cast<std::size_t>(s)] = statistic == TableStatistic::G2
                                                   ? detail::g2_of_counts(cells, k, l)
                                                   : detail::chi2_of_counts(cells, k, l);
        }
        return 0;
    });
    (void)chunks;
    return out;
}

// Fixed-margins variant for 2x2 tables: the free cell is drawn from its
// exact hypergeometric law and the statistic evaluated on the induced
// table.
inline std::vector<double> sample_statistics_fixed_margins(const TwoByTwoMargins& m,
                                                           TableStatistic statistic,
                                                           std::int64_t count, std::uint64_t seed,
                                                           int worker_count = 0) {
    if (count < 1) throw std::domain_error("sample_statistics_fixed_margins: count must be >= 1");
    Hypergeometric h = m.distribution();
    std::int64_t lo = h.support_min(), hi = h.support_max();
    std::vector<double> cum;
    double acc = 0.0;
    for (std::int64_t x = lo; x <= hi; ++x) {
        acc += pmf(h, x);
        cum.push_back(acc);
    }
    cum.back() = 1.0;
    std::vector<double> stat_of_x;
    for (std::int64_t x = lo; x <= hi; ++x) {
        if (statistic == TableStatistic::G2) {
            stat_of_x.push_back(2.0 * two_by_two_mutual_nats(m.total, m.first_col, m.first_row, x));
        } else {
            double chi = two_by_two_chi(m, x);
            stat_of_x.push_back(chi * chi);
        }
    }

    std::int64_t blocks = (count + detail::kSampleBlock - 1) / detail::kSampleBlock;
    std::vector<double> out(static_cast<std::size_t>(count));
    detail::run_indexed<int>(blocks, worker_count, [&](std::int64_t b) {
        detail::Xoshiro256 rng(seed, static_cast<std::uint64_t>(b));
        std::int64_t begin = b * detail::kSampleBlock;
        std::int64_t end = std::min(count, begin + detail::kSampleBlock);
        for (std::int64_t s = begin; s < end; ++s) {
            double u = rng.uniform();
            std::size_t idx = 0;
            while (idx + 1 < cum.size() && u >= cum[idx]) ++idx;
            out[static_cast<std::size_t>(s)] = stat_of_x[idx];
        }
        return 0;
    });
    return out;
}

// ---------------------------------------------------------------------------
// QQ pairing against a chi-square reference

struct QQSeries {
    std::vector<double> sample_quantiles;
    std::vector<double> reference_quantiles;
    std::int64_t df = 0;
    std::uint64_t sample_count = 0;
    std::uint64_t seed = 0;
};

// Pairs the i-th order statistic with the chi-square quantile at
// plotting position (i - 0.5) / count.
inline QQSeries qq_against_chi2(const std::vector<double>& samples, std::int64_t df) {
    if (samples.empty()) throw std::domain_error("qq_against_chi2: empty sample list");
    QQSeries q;
    q.df = df;
    q.sample_count = samples.size();
    q.sample_quantiles = samples;
    std::sort(q.sample_quantiles.begin(), q.sample_quantiles.end());
    q.reference_quantiles.reserve(samples.size());
    double n = static_cast<double>(samples.size());
    for (std::size_t i = 1; i <= samples.size(); ++i) {
        q.reference_quantiles.push_back(chi2_quantile(df, (static_cast<double>(i) - 0.5) / n));
    }
    return q;
}

inline nlohmann::json to_json(const QQSeries& q) {
    return nlohmann::json{{"df", q.df},
                          {"sample_count", q.sample_count},
                          {"seed", q.seed},
                          {"sample_quantiles", q.sample_quantiles},
                          {"reference_quantiles", q.reference_quantiles}};
}

// ---------------------------------------------------------------------------
// Named expected tables for the simulation presets.

inline ContingencyTable preset_table(const std::string& name) {
    if (name == "2x2-20-80") {
        return ContingencyTable({{4, 16}, {16, 64}});
    }
    if (name == "2x3-18") {
        return ContingencyTable({{18, 18, 18}, {18, 18, 18}});
    }
    if (name == "3x3-4") {
        return ContingencyTable({{4, 4, 4}, {4, 4, 4}, {4, 4, 4}});
    }
    throw std::domain_error("preset_table: unknown preset '" + name +
                            "' (expected 2x2-20-80, 2x3-18 or 3x3-4)");
}

inline std::int64_t preset_df(const ContingencyTable& t) {
    return static_cast<std::int64_t>((t.rows() - 1) * (t.cols() - 1));
}

}  // namespace siglik
