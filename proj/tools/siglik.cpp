// Command-line surface for the library: distribution evaluation, signed
// log-likelihoods, table statistics, exact 2x2 tests, intersection
// verification sweeps and QQ data emission.
//
// Exit codes: 0 success, 1 domain or usage error, 2 a verification
// sweep found violations.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "siglik/siglik.hpp"

namespace {

int g_precision = 9;

std::string num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", g_precision, v);
    return buf;
}

struct FamilyFlags {
    std::vector<std::int64_t> hyper;
    std::vector<double> binomial;
    double poisson = -1.0;
    std::vector<double> negbin;
    std::vector<double> gamma;
    std::vector<double> invgauss;
    std::string poisbin;

    void add_to(CLI::App* cmd, bool discrete_only) {
        cmd->add_option("--hyper", hyper, "hypergeometric N n r")->expected(3);
        cmd->add_option("--binomial", binomial, "binomial n p")->expected(2);
        cmd->add_option("--poisson", poisson, "Poisson lambda");
        if (!discrete_only) {
            cmd->add_option("--negbin", negbin, "negative binomial p ell")->expected(2);
            cmd->add_option("--gamma", gamma, "Gamma shape mean")->expected(2);
            cmd->add_option("--invgauss", invgauss, "inverse Gaussian mu lambda")->expected(2);
            cmd->add_option("--poisbin", poisbin, "Bernoulli sum p1,p2,...");
        }
    }

    siglik::DistSpec build() const {
        int given = !hyper.empty() + !binomial.empty() + (poisson >= 0.0) + !negbin.empty() +
                    !gamma.empty() + !invgauss.empty() + !poisbin.empty();
        if (given != 1) {
            throw std::domain_error("specify exactly one distribution family");
        }
        if (!hyper.empty()) return siglik::Hypergeometric(hyper[0], hyper[1], hyper[2]);
        if (!binomial.empty()) {
            return siglik::Binomial(static_cast<std::int64_t>(binomial[0]), binomial[1]);
        }
        if (poisson >= 0.0) return siglik::Poisson(poisson);
        if (!negbin.empty()) return siglik::NegBinomial(negbin[0], negbin[1]);
        if (!gamma.empty()) return siglik::GammaDist(gamma[0], gamma[1]);
        if (!invgauss.empty()) return siglik::InverseGaussian(invgauss[0], invgauss[1]);
        std::vector<double> probs;
        std::stringstream ss(poisbin);
        std::string field;
        while (std::getline(ss, field, ',')) probs.push_back(std::stod(field));
        return siglik::PoissonBinomial(probs);
    }
};

int default_workers() {
    if (const char* env = std::getenv("SIGLIK_WORKERS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 0;  // library picks hardware concurrency
}

void print_kv(const std::vector<std::pair<std::string, std::string>>& rows) {
    for (const auto& [k, v] : rows) std::cout << k << '\t' << v << '\n';
}

siglik::ContingencyTable read_table(const std::string& csv_path, const std::string& json_path,
                                    bool use_stdin, const std::string& stdin_format) {
    if (use_stdin) {
        std::stringstream buf;
        buf << std::cin.rdbuf();
        if (stdin_format == "json") return siglik::ContingencyTable::from_json(buf.str());
        return siglik::ContingencyTable::from_csv(buf.str());
    }
    if (!csv_path.empty()) {
        std::ifstream in(csv_path);
        if (!in) throw std::domain_error("cannot open " + csv_path);
        return siglik::ContingencyTable::from_csv(in);
    }
    if (!json_path.empty()) {
        std::ifstream in(json_path);
        if (!in) throw std::domain_error("cannot open " + json_path);
        std::stringstream buf;
        buf << in.rdbuf();
        return siglik::ContingencyTable::from_json(buf.str());
    }
    throw std::domain_error("table input required: --csv, --json or --stdin");
}

int emit_report(const siglik::VerificationReport& report, const std::string& format) {
    if (format == "json") {
        std::cout << siglik::to_json(report).dump(2) << '\n';
    } else {
        print_kv({{"mode", report.mode},
                  {"cases_checked", std::to_string(report.cases_checked)},
                  {"violations", std::to_string(report.violations.size())},
                  {"near_ties", std::to_string(report.near_ties.size())},
                  {"elapsed_seconds", num(report.elapsed_seconds)},
                  {"passed", report.passed() ? "true" : "false"}});
        for (const auto& c : report.violations) {
            std::cout << "violation\t" << siglik::to_json(c).dump() << '\n';
        }
    }
    return report.passed() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact small-sample independence tests and signed log-likelihood checks"};
    app.require_subcommand(1);

    std::string format = "tsv";
    app.add_option("--format", format, "output format: tsv or json")
        ->check(CLI::IsMember({"tsv", "json"}));
    app.add_option("--precision", g_precision, "significant digits for printed numbers")
        ->check(CLI::Range(1, 17));

    // dist pmf|cdf
    auto* dist_cmd = app.add_subcommand("dist", "evaluate pmf/density or cdf");
    dist_cmd->require_subcommand(1);
    FamilyFlags dist_pmf_flags, dist_cdf_flags;
    double dist_x = 0.0;
    auto* pmf_cmd = dist_cmd->add_subcommand("pmf", "point probability or density");
    dist_pmf_flags.add_to(pmf_cmd, false);
    pmf_cmd->add_option("--x", dist_x, "evaluation point")->required();
    auto* cdf_cmd = dist_cmd->add_subcommand("cdf", "distribution function");
    dist_cdf_flags.add_to(cdf_cmd, false);
    cdf_cmd->add_option("--x", dist_x, "evaluation point")->required();

    // g
    auto* g_cmd = app.add_subcommand("g", "signed log-likelihood and its Gaussian estimate");
    FamilyFlags g_flags;
    g_flags.add_to(g_cmd, false);
    double g_x = 0.0;
    g_cmd->add_option("--x", g_x, "support point")->required();

    // table
    auto* table_cmd = app.add_subcommand("table", "statistics and bounds of a contingency table");
    std::string table_csv, table_json, stdin_format = "csv";
    bool table_stdin = false;
    table_cmd->add_option("--csv", table_csv, "CSV file of integer counts");
    table_cmd->add_option("--json", table_json, "JSON file {\"counts\": [[...]]}");
    table_cmd->add_flag("--stdin", table_stdin, "read the table from standard input");
    table_cmd->add_option("--stdin-format", stdin_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    // exact-test
    auto* exact_cmd = app.add_subcommand("exact-test", "exact 2x2 test for fixed margins");
    std::vector<std::int64_t> margins;
    std::int64_t exact_x = 0;
    exact_cmd->add_option("--margins", margins, "N n r")->expected(3)->required();
    exact_cmd->add_option("--x", exact_x, "observed cell")->required();

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "intersection property sweeps");
    verify_cmd->require_subcommand(1);
    std::int64_t n_max = 200, tot_max = 2270;
    double eps = 1e-12;
    int workers = default_workers();
    std::string family;
    auto* vex = verify_cmd->add_subcommand("exhaustive", "all margins with sample size up to --n-max");
    vex->add_option("--n-max", n_max, "largest sample size (default 200)");
    auto* vpr = verify_cmd->add_subcommand("pruned", "margin sweep under the pruning bounds");
    vpr->add_option("--tot-max", tot_max, "largest sample size (default 2270)");
    auto* vfa = verify_cmd->add_subcommand("family", "proved inequality on a parameter grid");
    vfa->add_option("--family", family,
                    "binomial | poisson | negative-binomial | gamma | inverse-gaussian")
        ->required();
    for (auto* sub : {vex, vpr, vfa}) {
        sub->add_option("--workers", workers, "worker threads (default: SIGLIK_WORKERS or all cores)");
        sub->add_option("--eps", eps, "near-tie guard on relative gaps (default 1e-12)");
    }

    // qq
    auto* qq_cmd = app.add_subcommand("qq", "QQ data: exact steps or Monte-Carlo statistics");
    qq_cmd->require_subcommand(1);
    auto* qq_steps = qq_cmd->add_subcommand("exact-steps", "step series of g(X) vs a standard Gaussian");
    FamilyFlags steps_flags;
    steps_flags.add_to(qq_steps, true);
    auto* qq_sim = qq_cmd->add_subcommand("simulate", "sampled statistic vs chi-square quantiles");
    std::string preset = "3x3-4", statistic = "g2", sim_csv;
    std::int64_t samples = 100000, df_opt = 0;
    std::uint64_t seed = 1;
    int sim_workers = default_workers();
    qq_sim->add_option("--preset", preset, "expected table: 2x2-20-80, 2x3-18 or 3x3-4");
    qq_sim->add_option("--table-csv", sim_csv, "expected table from a CSV file instead");
    qq_sim->add_option("--statistic", statistic, "g2 or chi2")
        ->check(CLI::IsMember({"g2", "chi2"}));
    qq_sim->add_option("--samples", samples, "sample count (default 100000)");
    qq_sim->add_option("--seed", seed, "64-bit RNG seed (default 1)");
    qq_sim->add_option("--df", df_opt, "reference degrees of freedom (default: from the table)");
    qq_sim->add_option("--workers", sim_workers, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (pmf_cmd->parsed() || cdf_cmd->parsed()) {
            bool want_pmf = pmf_cmd->parsed();
            siglik::DistSpec d = (want_pmf ? dist_pmf_flags : dist_cdf_flags).build();
            double v = want_pmf ? siglik::pmf(d, dist_x) : siglik::cdf(d, dist_x);
            if (format == "json") {
                nlohmann::json j{{"family", siglik::family_name(d)},
                                 {"x", dist_x},
                                 {want_pmf ? "pmf" : "cdf", v}};
                std::cout << j.dump() << '\n';
            } else {
                std::cout << num(v) << '\n';
            }
            return 0;
        }

        if (g_cmd->parsed()) {
            siglik::DistSpec d = g_flags.build();
            siglik::SignedLL s = siglik::signed_ll(d, g_x);
            double estimate = siglik::gaussian_cdf(s.g);
            const char* side = s.side == siglik::Side::BelowMean ? "below-mean" : "at-or-above-mean";
            if (format == "json") {
                nlohmann::json j{{"family", siglik::family_name(d)},
                                 {"x", g_x},
                                 {"g", s.g},
                                 {"divergence", s.divergence},
                                 {"phi_g", estimate},
                                 {"side", side}};
                std::cout << j.dump() << '\n';
            } else {
                print_kv({{"g", num(s.g)},
                          {"divergence", num(s.divergence)},
                          {"phi_g", num(estimate)},
                          {"side", side}});
            }
            return 0;
        }

        if (table_cmd->parsed()) {
            siglik::ContingencyTable t = read_table(table_csv, table_json, table_stdin, stdin_format);
            auto mi = siglik::mutual_information(t);
            double g2 = siglik::g2_statistic(t);
            std::optional<double> chi2;
            if (!t.has_zero_margin()) chi2 = siglik::chi2_statistic(t);
            double pp = siglik::point_probability(t);
            std::optional<double> bound;
            if (!t.has_empty_cell()) bound = siglik::point_probability_bound(t);
            if (format == "json") {
                nlohmann::json j{{"rows", t.rows()}, {"cols", t.cols()}, {"N", t.total()},
                                 {"I", mi.i},        {"NI", mi.ni},      {"G2", g2},
                                 {"point_probability", pp}};
                j["chi2"] = chi2 ? nlohmann::json(*chi2) : nlohmann::json();
                j["point_probability_bound"] = bound ? nlohmann::json(*bound) : nlohmann::json();
                std::cout << j.dump() << '\n';
            } else {
                std::vector<std::pair<std::string, std::string>> rows{
                    {"rows", std::to_string(t.rows())}, {"cols", std::to_string(t.cols())},
                    {"N", std::to_string(t.total())},   {"I", num(mi.i)},
                    {"NI", num(mi.ni)},                 {"G2", num(g2)},
                    {"chi2", chi2 ? num(*chi2) : "na"}, {"point_probability", num(pp)},
                    {"point_probability_bound", bound ? num(*bound) : "na"}};
                print_kv(rows);
            }
            return 0;
        }

        if (exact_cmd->parsed()) {
            siglik::TwoByTwoMargins m(margins[0], margins[1], margins[2]);
            siglik::ExactTestReport r = siglik::exact_test(m, exact_x);
            if (format == "json") {
                nlohmann::json j{{"x", r.x},
                                 {"pmf", r.pmf_at},
                                 {"p_le", r.prob_le},
                                 {"p_ge", r.prob_ge},
                                 {"g", r.g},
                                 {"phi_g", r.estimate},
                                 {"sandwich_lo", r.sandwich_lo},
                                 {"sandwich_hi", r.sandwich_hi}};
                std::cout << j.dump() << '\n';
            } else {
                print_kv({{"x", std::to_string(r.x)},
                          {"pmf", num(r.pmf_at)},
                          {"p_le", num(r.prob_le)},
                          {"p_ge", num(r.prob_ge)},
                          {"g", num(r.g)},
                          {"phi_g", num(r.estimate)},
                          {"sandwich_lo", num(r.sandwich_lo)},
                          {"sandwich_hi", num(r.sandwich_hi)}});
            }
            return 0;
        }

        if (verify_cmd->parsed()) {
            siglik::VerificationConfig cfg;
            cfg.tie_epsilon = eps;
            cfg.worker_count = workers;
            siglik::VerificationReport report;
            if (vex->parsed()) {
                report = siglik::verify_hypergeometric_exhaustive(n_max, cfg);
            } else if (vpr->parsed()) {
                cfg.tot_max = tot_max;
                report = siglik::verify_hypergeometric_pruned(cfg);
            } else {
                report = siglik::verify_family_grid(siglik::default_family_grid(family),
                                                    siglik::theorem_side(family), cfg);
            }
            return emit_report(report, format);
        }

        if (qq_steps->parsed()) {
            siglik::DistSpec d = steps_flags.build();
            siglik::StepSeries s = siglik::qq_exact_steps(d);
            if (format == "json") {
                std::cout << siglik::to_json(s).dump() << '\n';
            } else {
                std::cout << "x\tg\tlower\tupper\n";
                for (const auto& p : s.points) {
                    std::cout << p.x << '\t' << num(p.g) << '\t' << num(p.lower) << '\t'
                              << num(p.upper) << '\n';
                }
            }
            return 0;
        }

        if (qq_sim->parsed()) {
            siglik::ContingencyTable expected = [&] {
                if (!sim_csv.empty()) {
                    std::ifstream in(sim_csv);
                    if (!in) throw std::domain_error("cannot open " + sim_csv);
                    return siglik::ContingencyTable::from_csv(in);
                }
                return siglik::preset_table(preset);
            }();
            std::int64_t df = df_opt > 0 ? df_opt : siglik::preset_df(expected);
            auto stat = statistic == "g2" ? siglik::TableStatistic::G2 : siglik::TableStatistic::Chi2;
            auto samples_v = siglik::sample_statistics(expected, stat, samples, seed, sim_workers);
            siglik::QQSeries q = siglik::qq_against_chi2(samples_v, df);
            q.seed = seed;
            if (format == "json") {
                std::cout << siglik::to_json(q).dump() << '\n';
            } else {
                for (std::size_t i = 0; i < q.sample_quantiles.size(); ++i) {
                    std::cout << num(q.sample_quantiles[i]) << '\t' << num(q.reference_quantiles[i])
                              << '\n';
                }
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
