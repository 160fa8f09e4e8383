// Exhaustive and pruned sweeps of the intersection property for
// hypergeometric step functions, plus grid sweeps of the proved family
// inequalities. Strict comparisons are decided in double precision with
// a relative tie guard; anything marginal is re-verified on an
// independent extended-precision path before it may be reported as a
// violation.
#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "siglik/dist.hpp"
#include "siglik/signed_loglik.hpp"
#include "siglik/special.hpp"
#include "siglik/table.hpp"

namespace siglik {

struct VerificationConfig {
    double tie_epsilon = 1e-12;  // relative gap under which a strict check is a near-tie
    int worker_count = 0;        // 0 = hardware concurrency
    std::int64_t tot_max = 2270; // pruned sweep bound on the sample size
};

// One checked point. Hypergeometric sweeps fill N/n/r; family sweeps
// fill family/param1/param2 instead.
struct SweepCase {
    std::int64_t N = 0, n = 0, r = 0;
    double x = 0.0;
    std::string family;
    double param1 = 0.0, param2 = 0.0;
    double lower = 0.0, estimate = 0.0, upper = 0.0;
    double margin = 0.0;  // smallest relative gap, (b-a)/b

    friend bool operator==(const SweepCase&, const SweepCase&) = default;
};

struct VerificationReport {
    std::string mode;
    std::uint64_t cases_checked = 0;
    std::vector<SweepCase> violations;
    std::vector<SweepCase> near_ties;
    double elapsed_seconds = 0.0;

    bool passed() const { return violations.empty(); }
};

// Report identity ignores wall-clock time.
inline bool equivalent(const VerificationReport& a, const VerificationReport& b) {
    return a.mode == b.mode && a.cases_checked == b.cases_checked &&
           a.violations == b.violations && a.near_ties == b.near_ties;
}

inline nlohmann::json to_json(const SweepCase& c) {
    nlohmann::json j;
    if (c.family.empty()) {
        j["N"] = c.N;
        j["n"] = c.n;
        j["r"] = c.r;
    } else {
        j["family"] = c.family;
        j["params"] = {c.param1, c.param2};
    }
    j["x"] = c.x;
    j["lower"] = c.lower;
    j["estimate"] = c.estimate;
    j["upper"] = c.upper;
    j["margin"] = c.margin;
    return j;
}

inline nlohmann::json to_json(const VerificationReport& r) {
    nlohmann::json j;
    j["mode"] = r.mode;
    j["cases_checked"] = r.cases_checked;
    j["violations"] = nlohmann::json::array();
    for (const auto& c : r.violations) j["violations"].push_back(to_json(c));
    j["near_ties"] = nlohmann::json::array();
    for (const auto& c : r.near_ties) j["near_ties"].push_back(to_json(c));
    j["elapsed_seconds"] = r.elapsed_seconds;
    j["passed"] = r.passed();
    return j;
}

enum class CheckResult { Pass, NearTie, Violation };

struct CheckOutcome {
    CheckResult result;
    double lower = 0.0, estimate = 0.0, upper = 0.0;
    double margin = 0.0;
};

namespace detail {

// Relative gap of the strict inequality a < b, normalized by the larger
// side: (b - a) / b. Positive means the inequality holds.
inline double relative_gap(double a, double b) {
    if (b <= 0.0) return a < b ? 1.0 : (a == b ? 0.0 : -1.0);
    return (b - a) / b;
}

// Same measure from natural logs: 1 - exp(la - lb).
inline double relative_gap_log(double la, double lb) {
    if (la == -inf) return lb == -inf ? 0.0 : 1.0;
    if (lb == -inf) return -1.0;
    return -std::expm1(la - lb);
}

// Extended-precision re-evaluation of one hypergeometric intersection
// point. Every pmf term is computed fresh from lgammal, independent of
// the double-precision recurrence path it double-checks.
struct ExtendedPoint {
    long double lower, estimate, upper;
};

inline ExtendedPoint recheck_hypergeometric(std::int64_t N, std::int64_t n, std::int64_t r,
                                            std::int64_t x) {
    auto lc = [](std::int64_t a, std::int64_t b) -> long double {
        return lgammal(static_cast<long double>(a) + 1.0L) -
               lgammal(static_cast<long double>(b) + 1.0L) -
               lgammal(static_cast<long double>(a - b) + 1.0L);
    };
    std::int64_t lo = std::max<std::int64_t>(0, n + r - N);
    long double log_denom = lc(N, n);
    long double below = 0.0L;
    for (std::int64_t y = lo; y < x; ++y) {
        below += expl(lc(r, y) + lc(N - r, n - y) - log_denom);
    }
    long double at = expl(lc(r, x) + lc(N - r, n - x) - log_denom);
    auto xl = [](long double v) { return v > 0.0L ? v * logl(v) : 0.0L; };
    long double ni = xl(static_cast<long double>(x)) + xl(static_cast<long double>(r - x)) +
                     xl(static_cast<long double>(n - x)) +
                     xl(static_cast<long double>(N - n - r + x)) -
                     xl(static_cast<long double>(n)) - xl(static_cast<long double>(N - n)) -
                     xl(static_cast<long double>(r)) - xl(static_cast<long double>(N - r)) +
                     xl(static_cast<long double>(N));
    if (ni < 0.0L) ni = 0.0L;
    long double est = 0.5L * erfcl(sqrtl(ni));
    return {below, est, below + at};
}

// Classify a strict sandwich lower < estimate < upper given linear
// values, escalating marginal cases to the extended-precision path.
inline CheckOutcome classify_hypergeometric(std::int64_t N, std::int64_t n, std::int64_t r,
                                            std::int64_t x, double lower, double estimate,
                                            double upper, double eps) {
    double m1 = relative_gap(lower, estimate);
    double m2 = relative_gap(estimate, upper);
    double margin = std::min(m1, m2);
    CheckOutcome out{CheckResult::Pass, lower, estimate, upper, margin};
    if (margin > eps) return out;
    ExtendedPoint hp = recheck_hypergeometric(N, n, r, x);
    long double h1 = hp.estimate > 0.0L ? (hp.estimate - hp.lower) / hp.estimate : -1.0L;
    long double h2 = hp.upper > 0.0L ? (hp.upper - hp.estimate) / hp.upper : -1.0L;
    long double hm = std::min(h1, h2);
    out.lower = static_cast<double>(hp.lower);
    out.estimate = static_cast<double>(hp.estimate);
    out.upper = static_cast<double>(hp.upper);
    out.margin = static_cast<double>(hm);
    if (hm <= 0.0L) {
        out.result = CheckResult::Violation;
    } else if (hm <= static_cast<long double>(eps)) {
        out.result = CheckResult::NearTie;
    } else {
        out.result = CheckResult::Pass;
    }
    return out;
}

// Deterministic worker pool: evaluates f(i) for i in [0, count) and
// returns the results indexed by i, whatever order threads ran in.
template <typename Bucket, typename F>
std::vector<Bucket> run_indexed(std::int64_t count, int workers, F&& f) {
    if (workers <= 0) {
        workers = static_cast<int>(std::thread::hardware_concurrency());
        if (workers <= 0) workers = 1;
    }
    workers = static_cast<int>(std::min<std::int64_t>(workers, std::max<std::int64_t>(count, 1)));
    std::vector<Bucket> buckets(static_cast<std::size_t>(count));
    if (workers == 1) {
        for (std::int64_t i = 0; i < count; ++i) buckets[static_cast<std::size_t>(i)] = f(i);
        return buckets;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= count) return;
                buckets[static_cast<std::size_t>(i)] = f(i);
            }
        });
    }
    for (auto& t : pool) t.join();
    return buckets;
}

struct SweepBucket {
    std::uint64_t cases = 0;
    std::vector<SweepCase> violations;
    std::vector<SweepCase> near_ties;
};

inline void merge_buckets(VerificationReport& report, std::vector<SweepBucket>&& buckets) {
    for (auto& b : buckets) {
        report.cases_checked += b.cases;
        for (auto& v : b.violations) report.violations.push_back(std::move(v));
        for (auto& v : b.near_ties) report.near_ties.push_back(std::move(v));
    }
}

// Shared immutable lookup tables for the margin sweeps.
struct SweepTables {
    std::vector<double> lfact;  // ln i!
    std::vector<double> xlni;   // i * ln i

    explicit SweepTables(std::int64_t max_n) {
        std::size_t size = static_cast<std::size_t>(max_n) + 1;
        lfact.resize(size);
        xlni.resize(size);
        lfact[0] = 0.0;
        xlni[0] = 0.0;
        for (std::size_t i = 1; i < size; ++i) {
            lfact[i] = static_cast<double>(lgammal(static_cast<long double>(i) + 1.0L));
            xlni[i] = static_cast<double>(i) * std::log(static_cast<double>(i));
        }
    }
};

// Walk the free cell upward for one margin triple (n, k, r): row sums
// (n, k), column sums (r, n+k-r). The cell pmf advances by its
// recurrence ratio and P(X < x) accumulates from the bottom tail, so
// each point costs O(1). Points with an empty cell (x at the support
// minimum) and points at or above the mean are excluded; both ends are
// covered by proved results and dedicated tests.
template <bool Pruned>
inline void sweep_margin(const SweepTables& tables, std::int64_t n, std::int64_t k, std::int64_t r,
                         double eps, SweepBucket& bucket) {
    const std::int64_t tot = n + k;
    const std::int64_t xmin = std::max<std::int64_t>(0, r - k);
    std::int64_t x = xmin + 1;  // max(1, r-k+1)
    if (x * tot >= n * r) return;

    const double* lf = tables.lfact.data();
    const double* xl = tables.xlni.data();
    const double nd = static_cast<double>(n);
    const double rd = static_cast<double>(r);
    const double base = xl[n] + xl[k] + xl[r] + xl[tot - r] - xl[tot];

    // pmf at the support minimum, then advance by the ratio.
    double p = std::exp(lf[n] - lf[xmin] - lf[n - xmin] + lf[k] - lf[r - xmin] -
                        lf[k - r + xmin] - (lf[tot] - lf[r] - lf[tot - r]));
    double below = 0.0;
    for (std::int64_t y = xmin; y < x; ++y) {
        below += p;
        double yd = static_cast<double>(y);
        p *= (nd - yd) * (rd - yd) /
             ((yd + 1.0) * (static_cast<double>(k - r + y) + 1.0));
    }

    for (;;) {
        if constexpr (Pruned) {
            if (x >= 10) return;
        }
        if (x * tot >= n * r) return;
        double ni = xl[x] + xl[n - x] + xl[r - x] + xl[k - r + x] - base;
        if (ni < 0.0) ni = 0.0;
        double est = 0.5 * std::erfc(std::sqrt(ni));
        double upper = below + p;
        ++bucket.cases;
        double m1 = relative_gap(below, est);
        double m2 = relative_gap(est, upper);
        if (std::min(m1, m2) <= eps) {
            CheckOutcome out = classify_hypergeometric(tot, r, n, x, below, est, upper, eps);
            if (out.result != CheckResult::Pass) {
                SweepCase c;
                c.N = tot;
                c.n = n;
                c.r = r;
                c.x = static_cast<double>(x);
                c.lower = out.lower;
                c.estimate = out.estimate;
                c.upper = out.upper;
                c.margin = out.margin;
                (out.result == CheckResult::Violation ? bucket.violations : bucket.near_ties)
                    .push_back(std::move(c));
            }
        }
        below = upper;
        double xd = static_cast<double>(x);
        p *= (nd - xd) * (rd - xd) / ((xd + 1.0) * (static_cast<double>(k - r + x) + 1.0));
        ++x;
    }
}

}  // namespace detail

// Check one intersection point Pr(X < x) < Phi(g(x)) < Pr(X <= x) for a
// 2x2 margin triple. Only points strictly below the mean are accepted;
// the upper side follows by symmetry.
inline CheckOutcome check_intersection_point(const TwoByTwoMargins& m, std::int64_t x,
                                             double eps = 1e-12) {
    if (x < m.support_min() || x > m.support_max()) {
        throw std::domain_error("check_intersection_point: cell outside support");
    }
    if (static_cast<double>(x) * static_cast<double>(m.total) >=
        static_cast<double>(m.first_col) * static_cast<double>(m.first_row)) {
        throw std::domain_error("check_intersection_point: requires x < nr/N; use the symmetric reduction");
    }
    Hypergeometric h = m.distribution();
    double lower = cdf(h, x - 1);
    double upper = cdf(h, x);
    double ni = two_by_two_mutual_nats(m.total, m.first_col, m.first_row, x);
    double est = 0.5 * std::erfc(std::sqrt(ni));
    return detail::classify_hypergeometric(m.total, m.first_col, m.first_row, x, lower, est,
                                           upper, eps);
}

// Sweep every margin triple with sample size 4..n_max: for each total,
// n and r range over 2..total-2 and the free cell walks from just above
// the support minimum to just below the mean.
inline VerificationReport verify_hypergeometric_exhaustive(std::int64_t n_max,
                                                           const VerificationConfig& cfg = {}) {
    if (n_max < 4) throw std::domain_error("verify_hypergeometric_exhaustive: n_max must be >= 4");
    auto start = std::chrono::steady_clock::now();
    detail::SweepTables tables(n_max);
    const double eps = cfg.tie_epsilon;

    std::int64_t count = n_max - 3;  // tot = 4..n_max
    auto buckets = detail::run_indexed<detail::SweepBucket>(
        count, cfg.worker_count, [&](std::int64_t idx) {
            detail::SweepBucket bucket;
            std::int64_t tot = idx + 4;
            for (std::int64_t n = 2; n <= tot - 2; ++n) {
                std::int64_t k = tot - n;
                for (std::int64_t r = 2; r <= tot - 2; ++r) {
                    detail::sweep_margin<false>(tables, n, k, r, eps, bucket);
                }
            }
            return bucket;
        });

    VerificationReport report;
    report.mode = "exhaustive";
    detail::merge_buckets(report, std::move(buckets));
    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

// The pruned sweep: totals up to cfg.tot_max (2270 by default), margins
// capped at 227, the row sum additionally capped by 22.7*(1+k/n) so the
// cell mean stays at most 22.7, and the cell capped below 10. Outside
// these bounds a cruder bound already settles any test of independence.
inline VerificationReport verify_hypergeometric_pruned(const VerificationConfig& cfg = {}) {
    if (cfg.tot_max < 4) throw std::domain_error("verify_hypergeometric_pruned: tot_max must be >= 4");
    auto start = std::chrono::steady_clock::now();
    detail::SweepTables tables(cfg.tot_max);
    const double eps = cfg.tie_epsilon;

    std::int64_t count = cfg.tot_max - 3;
    auto buckets = detail::run_indexed<detail::SweepBucket>(
        count, cfg.worker_count, [&](std::int64_t idx) {
            detail::SweepBucket bucket;
            std::int64_t tot = idx + 4;
            std::int64_t n_hi = std::min<std::int64_t>(tot - 2, 227);
            for (std::int64_t n = 2; n <= n_hi; ++n) {
                std::int64_t k = tot - n;
                std::int64_t r_hi = std::min<std::int64_t>(n + k - 2, 227);
                double r_cap = 22.7 * (1.0 + static_cast<double>(k) / static_cast<double>(n));
                for (std::int64_t r = 2; r <= r_hi && static_cast<double>(r) <= r_cap; ++r) {
                    detail::sweep_margin<true>(tables, n, k, r, eps, bucket);
                }
            }
            return bucket;
        });

    VerificationReport report;
    report.mode = "pruned";
    detail::merge_buckets(report, std::move(buckets));
    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

// ---------------------------------------------------------------------------
// Family sweeps for the proved inequalities.

enum class SweepSide { SandwichTwoSided, UpperOneSided };

struct FamilyGridSpec {
    std::string family;          // binomial | poisson | negative-binomial | gamma | inverse-gaussian
    std::vector<double> param1;  // n / lambda / ell / alpha / mu
    std::vector<double> param2;  // p / (unused) / p / mean / lambda
};

inline SweepSide theorem_side(const std::string& family) {
    if (family == "binomial" || family == "poisson") return SweepSide::SandwichTwoSided;
    if (family == "negative-binomial" || family == "gamma" || family == "inverse-gaussian") {
        return SweepSide::UpperOneSided;
    }
    throw std::domain_error("theorem_side: unknown family '" + family + "'");
}

namespace detail {

inline double logaddexp(double a, double b) {
    if (a == -inf) return b;
    if (b == -inf) return a;
    double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

// Log pmf, prefix log cdf and suffix log survival of a discrete family
// over 0..K. `log_remainder` seeds the suffix with an upper bound on the
// truncated mass so the strict comparisons stay conservative.
struct DiscreteTails {
    std::vector<double> log_pmf;
    std::vector<double> log_le;  // log P(X <= k)
    std::vector<double> log_ge;  // log P(X >= k)
};

template <typename LogPmf>
DiscreteTails build_tails(std::int64_t K, double log_remainder, LogPmf&& lp) {
    DiscreteTails t;
    std::size_t size = static_cast<std::size_t>(K) + 1;
    t.log_pmf.resize(size);
    t.log_le.resize(size);
    t.log_ge.resize(size + 1);
    for (std::int64_t k = 0; k <= K; ++k) t.log_pmf[static_cast<std::size_t>(k)] = lp(k);
    double acc = -inf;
    for (std::int64_t k = 0; k <= K; ++k) {
        acc = logaddexp(acc, t.log_pmf[static_cast<std::size_t>(k)]);
        t.log_le[static_cast<std::size_t>(k)] = std::min(acc, 0.0);
    }
    t.log_ge[size] = log_remainder;
    for (std::int64_t k = K; k >= 0; --k) {
        t.log_ge[static_cast<std::size_t>(k)] = std::min(
            logaddexp(t.log_pmf[static_cast<std::size_t>(k)], t.log_ge[static_cast<std::size_t>(k) + 1]),
            0.0);
    }
    return t;
}

// Extended-precision recheck of one discrete point: direct summation of
// lgammal-based pmf terms from the lower tail.
template <typename LogPmfL>
ExtendedPoint recheck_discrete(std::int64_t k, std::int64_t K, long double ni, LogPmfL&& lp) {
    long double below = 0.0L;
    for (std::int64_t j = 0; j < k; ++j) below += expl(lp(j));
    long double at = expl(lp(k));
    long double est = ni >= 0.0L ? 0.5L * erfcl(sqrtl(ni)) : 0.5L;
    (void)K;
    return {below, est, below + at};
}

struct FamilyPointCheck {
    double log_lower_vs_est;  // margin of P(X<k) < Phi(g)
    double log_est_vs_upper;  // margin of Phi(g) < P(X<=k)
};

// Relative margins of both sandwich sides at support point k, evaluated
// on whichever side of the distribution keeps the numbers small.
inline FamilyPointCheck sandwich_margins(const DiscreteTails& t, std::int64_t k, double g) {
    std::size_t ik = static_cast<std::size_t>(k);
    double lphi = log_gaussian_cdf(g);
    double lphi_c = log_gaussian_cdf(-g);
    FamilyPointCheck out;
    if (g <= 0.0) {
        double l_below = k == 0 ? -inf : t.log_le[ik - 1];
        out.log_lower_vs_est = relative_gap_log(l_below, lphi);
        out.log_est_vs_upper = relative_gap_log(lphi, t.log_le[ik]);
    } else {
        // P(X<k) < Phi(g)  <=>  Phi(-g) < P(X>=k)
        out.log_lower_vs_est = relative_gap_log(lphi_c, t.log_ge[ik]);
        // Phi(g) < P(X<=k)  <=>  P(X>k) < Phi(-g)
        out.log_est_vs_upper = relative_gap_log(t.log_ge[ik + 1], lphi_c);
    }
    return out;
}

struct FamilyEngineResult {
    SweepBucket bucket;
};

// Runs the sandwich or one-sided check across one discrete margin.
template <typename LogPmf, typename LogPmfL, typename GFun>
void sweep_discrete_family(const std::string& family, double param1, double param2,
                           std::int64_t K, double log_remainder, SweepSide side, double eps,
                           LogPmf&& lp, LogPmfL&& lpl, GFun&& gfun, SweepBucket& bucket) {
    DiscreteTails tails = build_tails(K, log_remainder, lp);
    for (std::int64_t k = 0; k <= K; ++k) {
        double g = gfun(k);
        FamilyPointCheck m = sandwich_margins(tails, k, g);
        ++bucket.cases;
        bool strict = side == SweepSide::SandwichTwoSided;
        double margin = strict ? std::min(m.log_lower_vs_est, m.log_est_vs_upper)
                               : m.log_est_vs_upper;
        if (margin > eps) continue;
        // Marginal: re-derive both tails in extended precision.
        long double ni = 0.5L * static_cast<long double>(g) * static_cast<long double>(g);
        ExtendedPoint hp = recheck_discrete(k, K, ni, lpl);
        long double est = g < 0.0 ? hp.estimate : 1.0L - hp.estimate;
        // recheck_discrete returns Phi(-sqrt(2 ni)); flip for positive g.
        long double lo_hp = hp.lower;
        long double up_hp = hp.upper;
        long double m1 = est > 0.0L ? (est - lo_hp) / est : -1.0L;
        long double m2 = up_hp > 0.0L ? (up_hp - est) / up_hp : -1.0L;
        long double hm = strict ? std::min(m1, m2) : m2;
        CheckResult res = hm <= 0.0L ? CheckResult::Violation
                          : (hm <= static_cast<long double>(eps) ? CheckResult::NearTie
                                                                 : CheckResult::Pass);
        if (res == CheckResult::Pass) continue;
        SweepCase c;
        c.family = family;
        c.param1 = param1;
        c.param2 = param2;
        c.x = static_cast<double>(k);
        c.lower = static_cast<double>(lo_hp);
        c.estimate = static_cast<double>(est);
        c.upper = static_cast<double>(up_hp);
        c.margin = static_cast<double>(hm);
        (res == CheckResult::Violation ? bucket.violations : bucket.near_ties).push_back(std::move(c));
    }
}

// One-sided continuous check Phi(g(x)) <= cdf(x) at a grid point, in
// log space on whichever tail is small.
template <typename LogCdf, typename LogSf>
void check_continuous_point(const std::string& family, double param1, double param2, double x,
                            double g, double eps, LogCdf&& lcdf, LogSf&& lsf,
                            SweepBucket& bucket) {
    ++bucket.cases;
    double margin;
    if (g <= 0.0) {
        margin = relative_gap_log(log_gaussian_cdf(g), lcdf(x));
    } else {
        margin = relative_gap_log(lsf(x), log_gaussian_cdf(-g));
    }
    if (margin >= eps) return;
    SweepCase c;
    c.family = family;
    c.param1 = param1;
    c.param2 = param2;
    c.x = x;
    c.lower = 0.0;
    c.estimate = gaussian_cdf(g);
    c.upper = std::exp(lcdf(x));
    c.margin = margin;
    (margin < 0.0 ? bucket.violations : bucket.near_ties).push_back(std::move(c));
}

inline std::vector<double> log_spaced(double lo, double hi, int count) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < count; ++i) {
        out.push_back(std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                                         static_cast<double>(count - 1)));
    }
    return out;
}

}  // namespace detail

// Check the proved inequality for one family over a parameter grid:
// two-sided sandwich for binomial and Poisson, one-sided upper bound
// for negative binomial (ell >= 1), Gamma and inverse Gaussian.
// Unbounded supports are truncated at mean + 12 standard deviations
// with the remaining mass folded conservatively into the survival side.
inline VerificationReport verify_family_grid(const FamilyGridSpec& grid, SweepSide side,
                                             const VerificationConfig& cfg = {}) {
    if (theorem_side(grid.family) != side) {
        throw std::domain_error("verify_family_grid: side does not match the proved result for " +
                                grid.family);
    }
    if (grid.param1.empty()) throw std::domain_error("verify_family_grid: empty grid");
    if (grid.family == "negative-binomial") {
        for (double ell : grid.param1) {
            if (ell < 1.0) {
                throw std::domain_error("verify_family_grid: negative-binomial sweep needs ell >= 1");
            }
        }
    }
    auto start = std::chrono::steady_clock::now();
    const double eps = cfg.tie_epsilon;
    const std::string family = grid.family;

    std::int64_t count = static_cast<std::int64_t>(grid.param1.size());
    auto buckets = detail::run_indexed<detail::SweepBucket>(
        count, cfg.worker_count, [&](std::int64_t idx) {
            detail::SweepBucket bucket;
            double a = grid.param1[static_cast<std::size_t>(idx)];

            if (family == "binomial") {
                std::int64_t n = static_cast<std::int64_t>(a);
                for (double p : grid.param2) {
                    Binomial d(n, p);
                    double nd = static_cast<double>(n);
                    detail::sweep_discrete_family(
                        family, a, p, n, -inf, SweepSide::SandwichTwoSided, eps,
                        [&](std::int64_t k) { return log_pmf(d, k); },
                        [&](std::int64_t k) -> long double {
                            long double kk = static_cast<long double>(k);
                            return lgammal(nd + 1.0L) - lgammal(kk + 1.0L) -
                                   lgammal(nd - kk + 1.0L) +
                                   kk * logl(static_cast<long double>(p)) +
                                   (nd - kk) * log1pl(-static_cast<long double>(p));
                        },
                        [&](std::int64_t k) { return signed_ll(DistSpec(d), static_cast<double>(k)).g; },
                        bucket);
                }
            } else if (family == "poisson") {
                double lambda = a;
                Poisson d(lambda);
                std::int64_t K =
                    static_cast<std::int64_t>(std::ceil(lambda + 12.0 * std::sqrt(lambda))) + 2;
                double lrem = log_pmf(d, K + 1) - std::log1p(-lambda / static_cast<double>(K + 2));
                detail::sweep_discrete_family(
                    family, lambda, 0.0, K, lrem, SweepSide::SandwichTwoSided, eps,
                    [&](std::int64_t k) { return log_pmf(d, k); },
                    [&](std::int64_t k) -> long double {
                        long double kk = static_cast<long double>(k);
                        long double ll = static_cast<long double>(lambda);
                        return kk * logl(ll) - ll - lgammal(kk + 1.0L);
                    },
                    [&](std::int64_t k) { return signed_ll(DistSpec(d), static_cast<double>(k)).g; },
                    bucket);
            } else if (family == "negative-binomial") {
                double ell = a;
                for (double p : grid.param2) {
                    NegBinomial d(p, ell);
                    std::int64_t K = static_cast<std::int64_t>(
                                         std::ceil(d.mean() + 12.0 * std::sqrt(d.variance()))) +
                                     2;
                    double q = (1.0 - p) * (ell + static_cast<double>(K + 1)) /
                               static_cast<double>(K + 2);
                    while (q >= 1.0) {  // geometric tail bound needs a contracting ratio
                        K *= 2;
                        q = (1.0 - p) * (ell + static_cast<double>(K + 1)) /
                            static_cast<double>(K + 2);
                    }
                    double lrem = log_pmf(d, K + 1) - std::log1p(-q);
                    detail::sweep_discrete_family(
                        family, ell, p, K, lrem, SweepSide::UpperOneSided, eps,
                        [&](std::int64_t k) { return log_pmf(d, k); },
                        [&](std::int64_t k) -> long double {
                            long double kk = static_cast<long double>(k);
                            long double el = static_cast<long double>(ell);
                            return lgammal(el + kk) - lgammal(el) - lgammal(kk + 1.0L) +
                                   el * logl(static_cast<long double>(p)) +
                                   kk * log1pl(-static_cast<long double>(p));
                        },
                        [&](std::int64_t k) { return signed_ll(DistSpec(d), static_cast<double>(k)).g; },
                        bucket);
                }
            } else if (family == "gamma") {
                double alpha = a;
                for (double mv : grid.param2) {
                    GammaDist d(alpha, mv);
                    double sd = std::sqrt(d.variance());
                    for (double x : detail::log_spaced(mv * 1e-3, mv + 12.0 * sd, 50)) {
                        double g = signed_ll(DistSpec(d), x).g;
                        detail::check_continuous_point(
                            family, alpha, mv, x, g, eps,
                            [&](double xx) { return log_regularized_gamma_p(alpha, xx / d.scale()); },
                            [&](double xx) { return log_regularized_gamma_q(alpha, xx / d.scale()); },
                            bucket);
                    }
                }
            } else if (family == "inverse-gaussian") {
                double mu = a;
                for (double lambda : grid.param2) {
                    InverseGaussian d(mu, lambda);
                    double sd = std::sqrt(d.variance());
                    for (double x : detail::log_spaced(mu * 1e-3, mu + 12.0 * sd, 50)) {
                        double g = signed_ll(DistSpec(d), x).g;
                        detail::check_continuous_point(
                            family, mu, lambda, x, g, eps,
                            [&](double xx) { return log_cdf(d, xx); },
                            [&](double xx) {
                                double s = std::sqrt(lambda / xx);
                                double la = log_gaussian_cdf(-s * (xx / mu - 1.0));
                                double lb = 2.0 * lambda / mu + log_gaussian_cdf(-s * (xx / mu + 1.0));
                                return la + std::log1p(-std::exp(lb - la));
                            },
                            bucket);
                    }
                }
            } else {
                throw std::domain_error("verify_family_grid: unknown family '" + family + "'");
            }
            return bucket;
        });

    VerificationReport report;
    report.mode = "family:" + family;
    detail::merge_buckets(report, std::move(buckets));
    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

// The standard grids used by the verification suite.
inline FamilyGridSpec default_family_grid(const std::string& family) {
    FamilyGridSpec g;
    g.family = family;
    if (family == "binomial") {
        for (int n = 1; n <= 200; ++n) g.param1.push_back(static_cast<double>(n));
        for (int i = 1; i <= 99; ++i) g.param2.push_back(static_cast<double>(i) / 100.0);
    } else if (family == "poisson") {
        for (int i = 0; i < 60; ++i) {
            g.param1.push_back(0.1 + (50.0 - 0.1) * static_cast<double>(i) / 59.0);
        }
    } else if (family == "negative-binomial") {
        g.param1 = {1.0, 1.5, 2.0, 5.0, 20.0};
        for (int i = 1; i <= 19; ++i) g.param2.push_back(static_cast<double>(i) * 0.05);
    } else if (family == "gamma") {
        g.param1 = {0.5, 1.0, 2.0, 10.0};
        g.param2 = {0.5, 1.0, 2.0, 5.0};
    } else if (family == "inverse-gaussian") {
        g.param1 = detail::log_spaced(0.1, 10.0, 10);
        g.param2 = detail::log_spaced(0.1, 10.0, 10);
    } else {
        throw std::domain_error("default_family_grid: unknown family '" + family + "'");
    }
    return g;
}

}  // namespace siglik
