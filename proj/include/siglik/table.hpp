// Contingency tables: the model, the three statistics (I, G^2, chi^2),
// exact fixed-margin probabilities, and the tail bounds built on them.
#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "siglik/dist.hpp"
#include "siglik/signed_loglik.hpp"
#include "siglik/special.hpp"

namespace siglik {

class ContingencyTable {
  public:
    static constexpr std::size_t kMaxDim = 64;

    explicit ContingencyTable(const std::vector<std::vector<std::int64_t>>& counts) {
        rows_ = counts.size();
        if (rows_ < 2) throw std::domain_error("table: needs at least 2 rows");
        if (rows_ > kMaxDim) throw std::domain_error("table: more than 64 rows");
        cols_ = counts[0].size();
        if (cols_ < 2) throw std::domain_error("table: needs at least 2 columns");
        if (cols_ > kMaxDim) throw std::domain_error("table: more than 64 columns");
        cells_.resize(rows_ * cols_);
        row_sums_.assign(rows_, 0);
        col_sums_.assign(cols_, 0);
        total_ = 0;
        for (std::size_t i = 0; i < rows_; ++i) {
            if (counts[i].size() != cols_) {
                throw std::domain_error("table: row " + std::to_string(i + 1) + " has " +
                                        std::to_string(counts[i].size()) + " cells, expected " +
                                        std::to_string(cols_));
            }
            for (std::size_t j = 0; j < cols_; ++j) {
                std::int64_t v = counts[i][j];
                if (v < 0) {
                    throw std::domain_error("table: negative count at row " + std::to_string(i + 1) +
                                            ", column " + std::to_string(j + 1));
                }
                cells_[i * cols_ + j] = v;
                row_sums_[i] += v;
                col_sums_[j] += v;
                total_ += v;
            }
        }
        if (total_ < 1) throw std::domain_error("table: total count must be >= 1");
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::int64_t at(std::size_t i, std::size_t j) const { return cells_[i * cols_ + j]; }
    std::int64_t row_sum(std::size_t i) const { return row_sums_[i]; }
    std::int64_t col_sum(std::size_t j) const { return col_sums_[j]; }
    std::int64_t total() const { return total_; }

    bool has_empty_cell() const {
        for (std::int64_t v : cells_) {
            if (v == 0) return true;
        }
        return false;
    }

    bool has_zero_margin() const {
        for (std::int64_t v : row_sums_) {
            if (v == 0) return true;
        }
        for (std::int64_t v : col_sums_) {
            if (v == 0) return true;
        }
        return false;
    }

    // Rows of comma-separated nonnegative integers, one row per line.
    static ContingencyTable from_csv(std::istream& in) {
        std::vector<std::vector<std::int64_t>> counts;
        std::string line;
        std::size_t row = 0;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            ++row;
            std::vector<std::int64_t> cells;
            std::stringstream ss(line);
            std::string field;
            std::size_t col = 0;
            while (std::getline(ss, field, ',')) {
                ++col;
                try {
                    std::size_t used = 0;
                    long long v = std::stoll(field, &used);
                    while (used < field.size() &&
                           (field[used] == ' ' || field[used] == '\t' || field[used] == '\r')) {
                        ++used;
                    }
                    if (used != field.size()) throw std::invalid_argument("trailing characters");
                    cells.push_back(v);
                } catch (const std::exception&) {
                    throw std::domain_error("csv: row " + std::to_string(row) + ", column " +
                                            std::to_string(col) + ": not an integer: '" + field + "'");
                }
            }
            counts.push_back(std::move(cells));
        }
        return ContingencyTable(counts);
    }

    static ContingencyTable from_csv(const std::string& text) {
        std::istringstream ss(text);
        return from_csv(ss);
    }

    // {"counts": [[...], ...]}
    static ContingencyTable from_json(const std::string& text) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw std::domain_error(std::string("json: ") + e.what());
        }
        if (!j.is_object() || !j.contains("counts") || !j["counts"].is_array()) {
            throw std::domain_error("json: expected an object with a \"counts\" array");
        }
        std::vector<std::vector<std::int64_t>> counts;
        std::size_t row = 0;
        for (const auto& jr : j["counts"]) {
            ++row;
            if (!jr.is_array()) {
                throw std::domain_error("json: row " + std::to_string(row) + " is not an array");
            }
            std::vector<std::int64_t> cells;
            std::size_t col = 0;
            for (const auto& jc : jr) {
                ++col;
                if (!jc.is_number_integer()) {
                    throw std::domain_error("json: row " + std::to_string(row) + ", column " +
                                            std::to_string(col) + ": not an integer");
                }
                cells.push_back(jc.get<std::int64_t>());
            }
            counts.push_back(std::move(cells));
        }
        return ContingencyTable(counts);
    }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<std::int64_t> cells_;
    std::vector<std::int64_t> row_sums_, col_sums_;
    std::int64_t total_ = 0;
};

struct MutualInformation {
    double i;   // nats per observation
    double ni;  // N * i, nats
};

inline MutualInformation mutual_information(const ContingencyTable& t) {
    // Exact independence (x_ij * N == R_i * S_j everywhere) is decided in
    // integer arithmetic so it yields 0 exactly rather than a rounding
    // residue of the xlnx sums.
    bool independent = true;
    for (std::size_t i = 0; independent && i < t.rows(); ++i) {
        for (std::size_t j = 0; j < t.cols(); ++j) {
            if (static_cast<__int128>(t.at(i, j)) * t.total() !=
                static_cast<__int128>(t.row_sum(i)) * t.col_sum(j)) {
                independent = false;
                break;
            }
        }
    }
    if (independent) return {0.0, 0.0};
    auto f = [](std::int64_t v) { return xlnx(static_cast<double>(v)); };
    double ni = f(t.total());
    for (std::size_t i = 0; i < t.rows(); ++i) {
        ni -= f(t.row_sum(i));
        for (std::size_t j = 0; j < t.cols(); ++j) ni += f(t.at(i, j));
    }
    for (std::size_t j = 0; j < t.cols(); ++j) ni -= f(t.col_sum(j));
    if (ni < 0.0) ni = 0.0;
    return {ni / static_cast<double>(t.total()), ni};
}

inline double g2_statistic(const ContingencyTable& t) {
    return 2.0 * mutual_information(t).ni;
}

inline double chi2_statistic(const ContingencyTable& t) {
    if (t.has_zero_margin()) {
        throw std::domain_error("chi2_statistic: a zero margin makes expected counts vanish");
    }
    double total = static_cast<double>(t.total());
    double acc = 0.0;
    for (std::size_t i = 0; i < t.rows(); ++i) {
        for (std::size_t j = 0; j < t.cols(); ++j) {
            double expected =
                static_cast<double>(t.row_sum(i)) * static_cast<double>(t.col_sum(j)) / total;
            double diff = static_cast<double>(t.at(i, j)) - expected;
            acc += diff * diff / expected;
        }
    }
    return acc;
}

// Exact probability of the table under independence with all margins
// fixed: prod R_i! prod S_j! / (N! prod x_ij!).
inline double point_probability(const ContingencyTable& t) {
    double lp = -log_factorial(t.total());
    for (std::size_t i = 0; i < t.rows(); ++i) lp += log_factorial(t.row_sum(i));
    for (std::size_t j = 0; j < t.cols(); ++j) lp += log_factorial(t.col_sum(j));
    for (std::size_t i = 0; i < t.rows(); ++i) {
        for (std::size_t j = 0; j < t.cols(); ++j) lp -= log_factorial(t.at(i, j));
    }
    return std::exp(lp);
}

// Upper bound e^{-N*I} * sqrt(prod R_i prod S_j / (tau^{(k-1)(l-1)} N prod x_ij)),
// valid only when every cell is occupied.
inline double point_probability_bound(const ContingencyTable& t) {
    if (t.has_empty_cell()) {
        throw std::domain_error("point_probability_bound: requires every cell to be >= 1");
    }
    double ni = mutual_information(t).ni;
    double log_margin = -std::log(static_cast<double>(t.total()));
    for (std::size_t i = 0; i < t.rows(); ++i) log_margin += std::log(static_cast<double>(t.row_sum(i)));
    for (std::size_t j = 0; j < t.cols(); ++j) log_margin += std::log(static_cast<double>(t.col_sum(j)));
    for (std::size_t i = 0; i < t.rows(); ++i) {
        for (std::size_t j = 0; j < t.cols(); ++j) {
            log_margin -= std::log(static_cast<double>(t.at(i, j)));
        }
    }
    double exponent = static_cast<double>(t.rows() - 1) * static_cast<double>(t.cols() - 1);
    log_margin -= exponent * std::log(tau);
    return std::exp(-ni + 0.5 * log_margin);
}

// ---------------------------------------------------------------------------
// 2x2 tables through their margins. The free cell X sits at (1,1); the
// table is [[X, r-X], [n-X, N-n-r+X]] with first row sum r and first
// column sum n.

struct TwoByTwoMargins {
    std::int64_t total;    // N
    std::int64_t first_col;  // n
    std::int64_t first_row;  // r

    TwoByTwoMargins(std::int64_t N, std::int64_t n, std::int64_t r)
        : total(N), first_col(n), first_row(r) {
        if (N < 1 || n < 0 || n > N || r < 0 || r > N) {
            throw std::domain_error("TwoByTwoMargins: require 0 <= n <= N and 0 <= r <= N");
        }
    }
    std::int64_t support_min() const {
        return std::max<std::int64_t>(0, first_col + first_row - total);
    }
    std::int64_t support_max() const { return std::min(first_col, first_row); }
    Hypergeometric distribution() const { return Hypergeometric(total, first_col, first_row); }
    double cell_mean() const {
        return static_cast<double>(first_col) * static_cast<double>(first_row) /
               static_cast<double>(total);
    }
};

inline ContingencyTable two_by_two_table(const TwoByTwoMargins& m, std::int64_t x) {
    if (x < m.support_min() || x > m.support_max()) {
        throw std::domain_error("two_by_two_table: cell outside support");
    }
    return ContingencyTable({{x, m.first_row - x},
                             {m.first_col - x, m.total - m.first_col - m.first_row + x}});
}

// Signed square root of the Pearson statistic:
// chi = (x - nr/N) / sqrt(nr(N-r)(N-n)/N^3).
inline double two_by_two_chi(const TwoByTwoMargins& m, std::int64_t x) {
    double N = static_cast<double>(m.total);
    double n = static_cast<double>(m.first_col);
    double r = static_cast<double>(m.first_row);
    if (m.first_col == 0 || m.first_col == m.total || m.first_row == 0 || m.first_row == m.total) {
        throw std::domain_error("two_by_two_chi: degenerate margins");
    }
    if (x < m.support_min() || x > m.support_max()) {
        throw std::domain_error("two_by_two_chi: cell outside support");
    }
    double denom = std::sqrt(n * r * (N - r) * (N - n) / (N * N * N));
    return (static_cast<double>(x) - n * r / N) / denom;
}

// Gaussian sharpening of the classical exponential tail bound for the
// lower hypergeometric tail: Pr(X < x) < Phi(-sqrt(2n*KL(x/n || r/N))).
struct ChvatalBound {
    double bound;        // Phi(-sqrt(2n D))
    double exact_below;  // exact Pr(X < x)
};

inline ChvatalBound chvatal_improved_bound(const TwoByTwoMargins& m, std::int64_t x) {
    if (x < m.support_min() || x > m.support_max()) {
        throw std::domain_error("chvatal_improved_bound: cell outside support");
    }
    if (static_cast<double>(x) > m.cell_mean()) {
        throw std::domain_error("chvatal_improved_bound: requires x <= nr/N");
    }
    double n = static_cast<double>(m.first_col);
    double d = kl_bernoulli(static_cast<double>(x) / n,
                            static_cast<double>(m.first_row) / static_cast<double>(m.total));
    double bound = gaussian_cdf(-std::sqrt(2.0 * n * d));
    double below = cdf(m.distribution(), x - 1);
    return {bound, below};
}

// Exact test report for one observed cell: both exact tails, the signed
// log-likelihood, its Gaussian estimate, and the step interval the
// estimate is conjectured to inhabit.
struct ExactTestReport {
    std::int64_t x;
    double prob_le;     // Pr(X <= x)
    double prob_ge;     // Pr(X >= x)
    double pmf_at;      // Pr(X = x)
    double g;           // signed log-likelihood
    double estimate;    // Phi(g)
    double sandwich_lo; // Pr(X < x)
    double sandwich_hi; // Pr(X <= x)
};

inline ExactTestReport exact_test(const TwoByTwoMargins& m, std::int64_t x) {
    if (x < m.support_min() || x > m.support_max()) {
        throw std::domain_error("exact_test: cell outside support");
    }
    Hypergeometric h = m.distribution();
    ExactTestReport rep;
    rep.x = x;
    rep.prob_le = cdf(h, x);
    rep.sandwich_lo = cdf(h, x - 1);
    rep.sandwich_hi = rep.prob_le;
    rep.pmf_at = pmf(h, x);
    rep.prob_ge = 1.0 - rep.sandwich_lo;
    SignedLL s = signed_ll(DistSpec(h), static_cast<double>(x));
    rep.g = s.g;
    rep.estimate = gaussian_cdf(s.g);
    return rep;
}

}  // namespace siglik
