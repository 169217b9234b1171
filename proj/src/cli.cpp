#include "psiwin/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <set>
#include <thread>

#include "psiwin/constants.hpp"
#include "psiwin/errors.hpp"
#include "psiwin/gaussian.hpp"
#include "psiwin/moments.hpp"
#include "psiwin/report_io.hpp"
#include "psiwin/singular.hpp"
#include "psiwin/twins.hpp"

namespace fs = std::filesystem;

namespace psiwin::cli {

namespace {

using Clock = std::chrono::steady_clock;
using Params = std::vector<std::pair<std::string, std::string>>;

fs::path output_dir(const std::string& flag) {
    fs::path dir = flag;
    if (dir.empty()) {
        const char* env = std::getenv("PSIWIN_OUT_DIR");
        dir = env && *env ? fs::path(env) : fs::path(".");
    }
    fs::create_directories(dir);
    return dir;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += io::shortest(v[i]);
    }
    return s;
}

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string sci(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, v);
    return buf;
}

// --- moments -----------------------------------------------------------------

struct MomentsArgs {
    std::string x;
    std::string h;
    int k_max = 6;
    std::vector<double> thresholds{3000.0};
    std::string segment_size = std::to_string(kDefaultSegmentSize);
    double bin_width = 0.0;
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::string checkpoint;
    std::string out;
    std::optional<std::uint64_t> max_segments;
    bool quiet = false;
};

void print_moment_comparison(const MomentReport& r, const MomentAccumulator& acc,
                             std::ostream& out) {
    out << "psi(x+h) - psi(x) - h over 0 <= x < X = " << r.x
        << ", h = " << r.h << "\n\n";
    out << "  k  mu_k                 mu~_k      normal\n";
    for (std::size_t k = 0; k < r.mu.size(); ++k) {
        out << "  " << std::setw(2) << k << "  " << std::left << std::setw(19) << sci(r.mu[k], 5)
            << "  " << std::setw(9) << fixed(r.mu_tilde[k], 4) << "  " << std::right
            << gaussian::normal_moment(static_cast<int>(k)) << '\n';
    }

    const auto v = constants::predict_variances(r.x, r.h);
    const int e = io::decimal_exponent(r.mu[2]);
    out << "\nsecond moment\n";
    out << "  measured mu_2          " << io::in_units(r.mu[2], e, 5) << '\n';
    out << "  h (log(X/h) + B)       " << io::in_units(v.refined, e, 4)
        << (v.meaningful ? "" : "  (X/h below e^-B: not meaningful)") << '\n';
    out << "  h log(X/h)             " << io::in_units(v.pair_correlation, e, 4) << '\n';
    out << "  h log X   (Cramer)     " << io::in_units(v.cramer, e, 4) << '\n';

    const std::uint64_t samples = std::max<std::uint64_t>(1, r.x / r.h);
    out << "\nextremes (sigma = " << fixed(r.sigma, 2) << ", N = X/h = " << samples
        << " independent samples)\n";
    const double up = r.max_dev.value / r.sigma;
    const double down = -r.min_dev.value / r.sigma;
    out << "  max " << fixed(r.max_dev.value, 2) << " at x = " << r.max_dev.at_x << "  ("
        << fixed(up, 2) << " sigma, 1 - Phi(t)^N = "
        << sci(gaussian::max_exceed_prob(up, samples), 4) << ")\n";
    out << "  min " << fixed(r.min_dev.value, 2) << " at x = " << r.min_dev.at_x << "  ("
        << fixed(-down, 2) << " sigma, 1 - Phi(t)^N = "
        << sci(gaussian::max_exceed_prob(down, samples), 4) << ")\n";
    out << "  median of the max of N normals: " << fixed(gaussian::median_max(samples, r.sigma), 1)
        << '\n';

    out << "\nexceedance measure\n";
    for (std::size_t i = 0; i < r.thresholds.size(); ++i) {
        const double expected = gaussian::expected_exceedance(r.x, r.sigma, r.thresholds[i]);
        out << "  |D| > " << io::shortest(r.thresholds[i]) << ": " << r.exceed_counts[i]
            << "  (normal expectation " << sci(expected, 4) << ", ratio "
            << fixed(expected > 0 ? static_cast<double>(r.exceed_counts[i]) / expected : 0.0, 4)
            << ")\n";
    }
    (void)acc;
}

int cmd_moments(const MomentsArgs& a, std::ostream& out, std::ostream& err) {
    const auto start = Clock::now();
    ExperimentConfig cfg;
    cfg.x = io::parse_count(a.x);
    cfg.h = io::parse_count(a.h);
    cfg.k_max = a.k_max;
    cfg.thresholds = a.thresholds;
    cfg.segment_size = io::parse_count(a.segment_size);
    cfg.bin_width = a.bin_width;
    cfg = cfg.resolved();

    RunOptions options;
    options.workers = a.workers;
    if (!a.checkpoint.empty()) options.checkpoint = fs::path(a.checkpoint);
    options.max_new_segments = a.max_segments;
    if (!a.quiet) {
        options.progress = [&err](std::uint64_t done, std::uint64_t total) {
            err << "\rsegments " << done << '/' << total << std::flush;
            if (done == total) err << '\n';
        };
    }
    const fs::path dir = output_dir(a.out);
    const RunOutcome outcome = run_experiment(cfg, options);
    if (!outcome.complete) {
        out << "stopped after " << outcome.segments_done << " of " << outcome.segments_total
            << " segments; checkpoint saved to " << a.checkpoint << '\n';
        return kExitOk;
    }
    const MomentAccumulator& acc = outcome.accumulator;
    const MomentReport report = finalize(acc);

    const fs::path moments_csv = dir / "moments.csv";
    const fs::path cdf_csv = dir / "cdf.csv";
    const fs::path extremes_csv = dir / "extremes.csv";
    const fs::path exceed_csv = dir / "exceedance.csv";
    {
        io::CsvWriter w(moments_csv, {"k", "mu_k", "mu_tilde_k"});
        for (std::size_t k = 0; k < report.mu.size(); ++k) {
            w.row({std::to_string(k), io::shortest(report.mu[k]), io::shortest(report.mu_tilde[k])});
        }
        w.close();
    }
    {
        io::CsvWriter w(cdf_csv, {"t", "empirical", "normal"});
        for (const auto& row : export_cdf(acc)) {
            w.row({io::shortest(row.t), io::shortest(row.empirical), io::shortest(row.normal)});
        }
        w.close();
    }
    {
        io::CsvWriter w(extremes_csv, {"kind", "value", "x"});
        w.row({"max", io::shortest(report.max_dev.value), std::to_string(report.max_dev.at_x)});
        w.row({"min", io::shortest(report.min_dev.value), std::to_string(report.min_dev.at_x)});
        w.close();
    }
    {
        io::CsvWriter w(exceed_csv, {"threshold", "measure", "normal_expectation"});
        for (std::size_t i = 0; i < report.thresholds.size(); ++i) {
            w.row({io::shortest(report.thresholds[i]), std::to_string(report.exceed_counts[i]),
                   io::shortest(gaussian::expected_exceedance(report.x, report.sigma,
                                                              report.thresholds[i]))});
        }
        w.close();
    }
    print_moment_comparison(report, acc, out);

    const Params params{{"x", std::to_string(cfg.x)},
                        {"h", std::to_string(cfg.h)},
                        {"k_max", std::to_string(cfg.k_max)},
                        {"thresholds", join(cfg.thresholds)},
                        {"segment_size", std::to_string(cfg.segment_size)},
                        {"bin_width", io::shortest(cfg.bin_width)},
                        {"workers", std::to_string(a.workers)},
                        {"resumed_segments", std::to_string(outcome.segments_resumed)}};
    io::write_manifest(dir / "moments_manifest.txt", "moments", params, seconds_since(start),
                       {moments_csv, cdf_csv, extremes_csv, exceed_csv});
    return kExitOk;
}

// --- singular ----------------------------------------------------------------

int cmd_singular(const std::vector<std::string>& h_list, const std::string& out_flag,
                 std::ostream& out, std::ostream& err) {
    const auto start = Clock::now();
    if (h_list.empty()) throw ConfigError("singular: --h needs at least one value");
    std::vector<std::uint64_t> hs;
    std::set<std::uint64_t> seen;
    for (const auto& text : h_list) {
        const auto h = io::parse_count(text);
        if (h < 2) throw ConfigError("singular: every h must be >= 2");
        if (!seen.insert(h).second) {
            err << "warning: duplicate h = " << h << " ignored\n";
            continue;
        }
        hs.push_back(h);
    }
    const std::uint64_t h_max = *std::max_element(hs.begin(), hs.end());
    if (h_max > singular::kMaxTableLimit) {
        throw ResourceError("singular: h = " + std::to_string(h_max) +
                            " exceeds the s(k) table capacity " +
                            std::to_string(singular::kMaxTableLimit));
    }
    const auto s = singular::s_table(h_max);
    const fs::path dir = output_dir(out_flag);
    const fs::path csv = dir / "cesaro.csv";
    io::CsvWriter w(csv, {"h", "value", "prediction", "residual", "residual_over_sqrt_h"});
    out << "        h                  value             prediction    residual  residual/h^0.5\n";
    for (auto h : hs) {
        const auto r = singular::cesaro_sum(h, s);
        const double scaled = r.residual / std::sqrt(static_cast<double>(h));
        w.row({std::to_string(h), io::shortest(r.value), io::shortest(r.prediction),
               io::shortest(r.residual), io::shortest(scaled)});
        out << std::setw(9) << h << "  " << std::setw(21) << fixed(r.value, 4) << "  "
            << std::setw(21) << fixed(r.prediction, 4) << "  " << std::setw(10)
            << fixed(r.residual, 4) << "  " << fixed(scaled, 5) << '\n';
    }
    w.close();
    std::string h_text;
    for (auto h : hs) h_text += (h_text.empty() ? "" : ",") + std::to_string(h);
    io::write_manifest(dir / "singular_manifest.txt", "singular", {{"h", h_text}},
                       seconds_since(start), {csv});
    return kExitOk;
}

// --- constants ---------------------------------------------------------------

int cmd_constants(const std::string& limit_text, const std::string& out_flag, std::ostream& out) {
    const auto start = Clock::now();
    const auto limit = io::parse_count(limit_text);
    const auto table = constants::make_table(limit);
    const auto t1 = constants::T_at(1.0, limit);
    const auto u0 = constants::U_at(0.0, limit);
    const double u_prime = constants::U_prime_at_zero(limit);
    const double ref_x = 1e10;
    const double ref_h = 1e5;
    const auto pred = constants::predict_variances(static_cast<std::uint64_t>(ref_x),
                                                   static_cast<std::uint64_t>(ref_h));

    struct Row {
        std::string name;
        double value;
        std::string shown;
        std::string provenance;
        double bound;
    };
    const std::vector<Row> rows{
        {"c", table.c, fixed(table.c, 10), "2 prod_{2<p<=L} (1 - 1/(p-1)^2)", table.truncation_bound},
        {"c_refined", table.c_refined, fixed(table.c_refined, 15),
         "partial product with prime-zeta tail", 0.0},
        {"C0", table.euler_gamma, fixed(table.euler_gamma, 10), "stored literal", 0.0},
        {"log_2pi", table.log_2pi, fixed(table.log_2pi, 10), "stored literal", 0.0},
        {"A", table.A, fixed(table.A, 8), "(1 - C0 - log 2pi)/2", 0.0},
        {"B", table.B, fixed(table.B, 5), "-C0 - log 2pi", 0.0},
        {"T(1)", t1.value, fixed(t1.value, 10), "prod_{2<p<=L} (1 + 1/((p-2)p))", t1.tail_bound},
        {"U(0)", u0.value, fixed(u0.value, 10), "prod_{2<p<=L} U factor at s=0", u0.tail_bound},
        {"2/c", 2.0 / table.c, fixed(2.0 / table.c, 10), "from c", 0.0},
        {"U'(0)", u_prime, sci(u_prime, 3), "sum of exact per-prime derivatives", 0.0},
        {"mu2_pred(1e10,1e5)", pred.refined, io::in_units(pred.refined, 5, 4),
         "h(log(X/h) + B)", 0.0},
        {"mu2_pair(1e10,1e5)", pred.pair_correlation, io::in_units(pred.pair_correlation, 5, 4),
         "h log(X/h)", 0.0},
        {"mu2_cramer(1e10,1e5)", pred.cramer, io::in_units(pred.cramer, 5, 4), "h log X", 0.0},
    };

    out << "prime limit L = " << limit << "\n\n";
    for (const auto& r : rows) {
        out << "  " << std::left << std::setw(22) << r.name << std::setw(22) << r.shown
            << std::setw(40) << r.provenance << std::right;
        if (r.bound > 0.0) out << "log-tail bound " << sci(r.bound, 3);
        out << '\n';
    }

    const fs::path dir = output_dir(out_flag);
    const fs::path csv = dir / "constants.csv";
    io::CsvWriter w(csv, {"name", "value", "tail_bound", "provenance"});
    for (const auto& r : rows) {
        w.row({r.name, io::shortest(r.value), io::shortest(r.bound), r.provenance});
    }
    w.close();
    io::write_manifest(dir / "constants_manifest.txt", "constants",
                       {{"prime_limit", std::to_string(limit)}}, seconds_since(start), {csv});
    return kExitOk;
}

// --- twins -------------------------------------------------------------------

int cmd_twins(const std::string& x_text, std::uint64_t k_max, const std::string& h_text,
              unsigned workers, const std::string& out_flag, std::ostream& out) {
    const auto start = Clock::now();
    const auto x = io::parse_count(x_text);
    if (x < 1) throw ConfigError("twins: --x must be >= 1");
    if (k_max < 1) throw ConfigError("twins: --kmax must be >= 1");
    twins::PairSumOptions options;
    options.workers = workers;
    const auto rows = twins::twin_errors(x, k_max, options);
    const double root_x = std::sqrt(static_cast<double>(x));

    const fs::path dir = output_dir(out_flag);
    const fs::path csv = dir / "twin_errors.csv";
    io::CsvWriter w(csv, {"k", "raw", "expected", "error", "error_over_sqrt_x"});
    for (const auto& t : rows) {
        w.row({std::to_string(t.k), io::shortest(t.raw), io::shortest(t.expected),
               io::shortest(t.error), io::shortest(t.error / root_x)});
    }
    w.close();

    double mean_error = 0.0;
    for (const auto& t : rows) mean_error += t.error;
    mean_error /= static_cast<double>(rows.size());
    const double squares = twins::lambda_square_sum(x);
    const double main = twins::lambda_square_main_term(x);
    out << "X = " << x << ", k = 1.." << k_max << '\n';
    out << "  mean E(X,k)                 " << fixed(mean_error, 3) << "  ("
        << fixed(mean_error / (root_x * std::log(static_cast<double>(x))), 5)
        << " sqrt(X) log X)\n";
    out << "  sum Lambda(n)^2             " << fixed(squares, 3) << '\n';
    out << "  X log X - X                 " << fixed(main, 3) << "  (ratio "
        << fixed(squares / main, 6) << ")\n";

    Params params{{"x", std::to_string(x)}, {"kmax", std::to_string(k_max)}};
    if (!h_text.empty()) {
        const auto h = io::parse_count(h_text);
        const auto ws = twins::weighted_error_sum(x, h, twins::kDefaultWorkBudget, options);
        out << "  2 sum (h-k) E(X,k), h = " << h << "   " << sci(ws.value, 6) << '\n';
        out << "  2 sum (h-k) |E(X,k)|          " << sci(ws.absolute, 6) << '\n';
        out << "  / (h^1.5 X^0.5)               " << sci(ws.ratio_cancelling, 4) << '\n';
        out << "  / (h^2 X^0.5)                 " << sci(ws.ratio_trivial, 4) << '\n';
        params.emplace_back("h", std::to_string(h));
    }
    io::write_manifest(dir / "twins_manifest.txt", "twins", params, seconds_since(start), {csv});
    return kExitOk;
}

// --- gaussian ----------------------------------------------------------------

struct GaussianArgs {
    std::optional<double> t;
    std::optional<std::string> n;
    std::optional<double> sigma;
    std::optional<double> threshold;
    std::optional<std::string> x;
    std::optional<double> measured;
};

int cmd_gaussian(const GaussianArgs& a, std::ostream& out) {
    if (!a.n) throw ConfigError("gaussian: --n is required");
    const auto n = io::parse_count(*a.n);
    if (n < 1) throw ConfigError("gaussian: --n must be >= 1");
    if (a.t) {
        out << "1 - Phi(" << io::shortest(*a.t) << ")^" << n << " = "
            << fixed(gaussian::max_exceed_prob(*a.t, n), 7) << '\n';
        return kExitOk;
    }
    if (!a.sigma) throw ConfigError("gaussian: give --t, or --sigma with optional --threshold");
    gaussian::NormalTailQuery{0.0, n, *a.sigma}.validate();
    out << "median of the max of " << n << " normals (sigma " << io::shortest(*a.sigma)
        << "): " << fixed(gaussian::median_max(n, *a.sigma), 2) << '\n';
    if (a.threshold) {
        const double t = *a.threshold / *a.sigma;
        out << "threshold " << io::shortest(*a.threshold) << " = " << fixed(t, 4)
            << " sigma; 1 - Phi(t)^" << n << " = " << fixed(gaussian::max_exceed_prob(t, n), 7)
            << '\n';
        if (a.x) {
            const auto x = io::parse_count(*a.x);
            const double expected = gaussian::expected_exceedance(x, *a.sigma, *a.threshold);
            out << "expected measure of |G| > threshold on [0, " << x << "): " << sci(expected, 4)
                << '\n';
            if (a.measured) {
                out << "measured / expected = " << fixed(*a.measured / expected, 4) << '\n';
            }
        }
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Primes in short intervals: moments of psi(x+h) - psi(x) - h and singular series"};
    app.set_help_flag("--help", "print help and exit");
    app.require_subcommand(1);

    MomentsArgs m;
    auto* moments = app.add_subcommand("moments", "stream D(x) = psi(x+h) - psi(x) - h");
    moments->add_option("--x", m.x, "upper limit X (scientific notation accepted)")->required();
    moments->add_option("--h", m.h, "window length h")->required();
    moments->add_option("--kmax", m.k_max, "highest moment (2..12)");
    moments->add_option("--thresholds", m.thresholds, "exceedance levels")->delimiter(',');
    moments->add_option("--segment-size", m.segment_size, "integers per segment");
    moments->add_option("--bin-width", m.bin_width, "histogram bin width (0 = sigma_pred/50)");
    moments->add_option("--workers", m.workers, "worker threads");
    moments->add_option("--checkpoint", m.checkpoint, "checkpoint file (resumed if present)");
    moments->add_option("--max-segments", m.max_segments,
                        "compute at most this many new segments, then stop");
    moments->add_option("--out", m.out, "output directory");
    moments->add_flag("--quiet", m.quiet, "no progress output");

    std::vector<std::string> h_list;
    std::string singular_out;
    auto* singular_cmd = app.add_subcommand("singular", "Cesaro-weighted singular series sums");
    singular_cmd->add_option("--h", h_list, "window lengths")->delimiter(',');
    singular_cmd->add_option("--out", singular_out, "output directory");

    std::string prime_limit = "1e7";
    std::string constants_out;
    auto* constants_cmd = app.add_subcommand("constants", "constants and Euler-product identities");
    constants_cmd->add_option("--prime-limit", prime_limit, "Euler product truncation");
    constants_cmd->add_option("--out", constants_out, "output directory");

    std::string twins_x;
    std::uint64_t twins_k = 100;
    std::string twins_h;
    unsigned twins_workers = std::max(1u, std::thread::hardware_concurrency());
    std::string twins_out;
    auto* twins_cmd = app.add_subcommand("twins", "pair correlations of Lambda and E(X,k)");
    twins_cmd->add_option("--x", twins_x, "upper limit X")->required();
    twins_cmd->add_option("--kmax", twins_k, "largest offset k");
    twins_cmd->add_option("--h", twins_h, "also compute 2 sum (h-k) E(X,k)");
    twins_cmd->add_option("--workers", twins_workers, "worker threads");
    twins_cmd->add_option("--out", twins_out, "output directory");

    GaussianArgs g;
    auto* gaussian_cmd = app.add_subcommand("gaussian", "normal tail probabilities");
    gaussian_cmd->add_option("--t", g.t, "deviation in standard deviations");
    gaussian_cmd->add_option("--n", g.n, "number of independent samples");
    gaussian_cmd->add_option("--sigma", g.sigma, "standard deviation");
    gaussian_cmd->add_option("--threshold", g.threshold, "absolute threshold");
    gaussian_cmd->add_option("--x", g.x, "measure of the x-range");
    gaussian_cmd->add_option("--measured", g.measured, "measured exceedance, for the ratio");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (moments->parsed()) return cmd_moments(m, out, err);
        if (singular_cmd->parsed()) return cmd_singular(h_list, singular_out, out, err);
        if (constants_cmd->parsed()) return cmd_constants(prime_limit, constants_out, out);
        if (twins_cmd->parsed()) {
            return cmd_twins(twins_x, twins_k, twins_h, twins_workers, twins_out, out);
        }
        if (gaussian_cmd->parsed()) return cmd_gaussian(g, out);
    } catch (const ConfigError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace psiwin::cli
