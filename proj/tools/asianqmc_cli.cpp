// asianqmc: run experiment sweeps, single Greek estimates and self-checks.
//
// Exit codes: 0 success, 1 runtime failure (failed cell or check), 2 invalid
// input (flags or config).

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "asianqmc/errors.hpp"
#include "asianqmc/report.hpp"
#include "asianqmc/validate.hpp"

namespace {

using namespace asianqmc;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::string markdown_path(const std::string& csv_path) {
    std::filesystem::path p(csv_path);
    p.replace_extension(".md");
    return p.string();
}

int cmd_run(const std::string& config_path, bool dry_run, int workers, const std::string& output_override,
            const std::string& format_override) {
    ExperimentConfig config;
    try {
        config = load_config(config_path);
        if (!output_override.empty()) config.output_path = output_override;
        if (!format_override.empty()) config.output_format = format_override;
        config.validate();
    } catch (const Error& e) {
        std::cerr << config_path << ": " << e.what() << '\n';
        return kExitUsage;
    }

    if (dry_run) {
        const auto cells = plan_cells(config);
        std::cout << "# " << cells.size() << " cells, M = " << config.m_batches << ", N = " << config.n_samples
                  << ", construction " << to_string(config.construction) << "\n";
        for (const auto& c : cells)
            std::cout << to_string(c.option) << ' ' << to_string(c.greek) << " K=" << c.strike << " d=" << c.d << ' '
                      << c.method.name() << '\n';
        return 0;
    }

    const auto start = std::chrono::steady_clock::now();
    std::size_t done = 0;
    const std::size_t total = config.cell_count();
    const ExperimentReport report = run_experiment(config, workers, [&](const ReportRow& row) {
        std::cerr << '[' << ++done << '/' << total << "] " << to_string(row.option) << ' ' << to_string(row.greek)
                  << " K=" << row.strike << " d=" << row.d << ' ' << row.method << ": "
                  << (row.ok() ? format_significant(row.estimate.mean, 6) + " (VRF " + format_significant(row.vrf, 6) +
                                     ")"
                               : "FAILED " + row.status)
                  << '\n';
    });

    const bool csv = config.output_format != "markdown";
    const bool md = config.output_format != "csv";
    const std::string md_path = csv ? markdown_path(config.output_path) : config.output_path;
    if (csv) {
        std::ofstream out(config.output_path);
        write_csv(report, out);
        if (!out) {
            std::cerr << "cannot write " << config.output_path << '\n';
            return kExitFailure;
        }
    }
    if (md) {
        std::ofstream out(md_path);
        write_markdown(report, out);
        if (!out) {
            std::cerr << "cannot write " << md_path << '\n';
            return kExitFailure;
        }
    }

    std::size_t failed = 0;
    for (const auto& r : report.rows) failed += r.ok() ? 0 : 1;
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << report.rows.size() << " rows written to " << (csv ? config.output_path : md_path);
    if (csv && md) std::cout << " and " << md_path;
    std::cout << " in " << format_significant(seconds, 4) << " s\n";
    if (report.partial()) {
        std::cout << "PARTIAL REPORT: " << failed << " cell(s) failed\n";
        return kExitFailure;
    }
    return 0;
}

int cmd_validate(const std::string& level, int workers, int corrupt_dim) {
    const SobolDirections& reference = SobolDirections::joe_kuo();
    const std::optional<SobolDirections> corrupted =
        corrupt_dim >= 0 ? std::optional(reference.corrupted(static_cast<std::size_t>(corrupt_dim), 3)) : std::nullopt;
    const auto results =
        run_validation(level == "full" ? ValidationLevel::kFull : ValidationLevel::kFast,
                       corrupted ? *corrupted : reference, workers, [](const CheckResult& r) {
                           std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " ("
                                     << format_significant(r.seconds, 3) << " s): " << r.detail << std::endl;
                       });
    std::size_t failed = 0;
    for (const auto& r : results) failed += r.passed ? 0 : 1;
    std::cout << results.size() - failed << '/' << results.size() << " checks passed\n";
    if (failed) {
        std::cout << "failed:";
        for (const auto& r : results)
            if (!r.passed) std::cout << ' ' << r.name;
        std::cout << '\n';
        return kExitFailure;
    }
    return 0;
}

struct GreekArgs {
    std::string option = "call", greek = "delta", method = "qmc-cmv", construction = "gpca";
    double strike = 100.0, barrier = 120.0;
    int d = 64, m = 500, n = 1 << 15, workers = 0;
    std::uint64_t seed = 20240101;
    MarketParams market;
};

int cmd_greek(const GreekArgs& a) {
    OptionSpec option;
    GreekKind greek;
    MethodSpec method;
    std::optional<TimeGrid> grid;
    try {
        option = {parse_option(a.option), a.strike, a.barrier};
        greek = parse_greek(a.greek);
        method = MethodSpec::parse(a.method, parse_construction(a.construction));
        a.market.validate();
        option.validate();
        grid.emplace(a.d, a.market.maturity);
        if (a.m < 2 || a.n < 2) throw ConfigError("--M and --N must be at least 2");
        if (method.sampler == Sampler::kRQMC && !std::has_single_bit(static_cast<unsigned>(a.n)))
            throw ConfigError("--N must be a power of two for RQMC methods");
    } catch (const Error& e) {
        std::cerr << "invalid arguments: " << e.what() << '\n';
        return kExitUsage;
    }

    RunOptions options;
    options.workers = a.workers;
    const auto start = std::chrono::steady_clock::now();
    GreekEstimate est;
    try {
        est = run_batches(method, greek, option, a.market, *grid, a.m, a.n, a.seed, options);
    } catch (const std::exception& e) {
        std::cerr << "estimation failed: " << e.what() << '\n';
        return kExitFailure;
    }
    nlohmann::ordered_json out;
    out["option"] = a.option;
    out["greek"] = a.greek;
    out["K"] = a.strike;
    if (option.kind == OptionKind::kUpAndOutAsianCall) out["H"] = a.barrier;
    out["d"] = a.d;
    out["method"] = method.name();
    out["construction"] = std::string(to_string(method.effective_construction()));
    out["S0"] = a.market.s0;
    out["sigma"] = a.market.sigma;
    out["r"] = a.market.r;
    out["T"] = a.market.maturity;
    out["mean"] = est.mean;
    out["std_err"] = est.std_err;
    out["m_batches"] = est.m_batches;
    out["n_samples"] = est.n_samples;
    out["seed"] = a.seed;
    out["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << out.dump() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Malliavin and conditional-Malliavin Greeks of Asian options with randomized QMC"};
    app.require_subcommand(0, 1);
    bool print_config = false;
    app.add_flag("--print-config", print_config, "Print the default experiment configuration as JSON");

    auto* run = app.add_subcommand("run", "Run an experiment sweep described by a JSON config");
    std::string config_path, output_override, format_override;
    bool dry_run = false;
    int run_workers = 0;
    run->add_option("config", config_path, "Config file")->required();
    run->add_flag("--dry-run", dry_run, "Print the cell plan and exit");
    run->add_option("--workers", run_workers, "Worker threads (default: ASIANQMC_WORKERS or all cores)")
        ->check(CLI::NonNegativeNumber);
    run->add_option("--output", output_override, "Override output.path");
    run->add_option("--format", format_override, "Override output.format")
        ->check(CLI::IsMember({"csv", "markdown", "both"}));

    auto* validate = app.add_subcommand("validate", "Run the oracle self-checks");
    std::string level = "fast";
    int validate_workers = 0, corrupt_dim = -1;
    validate->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
    validate->add_option("--workers", validate_workers, "Worker threads")->check(CLI::NonNegativeNumber);
    validate->add_option("--corrupt-directions", corrupt_dim, "Corrupt one Sobol' coordinate (fault injection)")
        ->group("");

    auto* greek = app.add_subcommand("greek", "Estimate one Greek and print it as JSON");
    GreekArgs g;
    greek->add_option("--option", g.option, "binary, call or uoc")->capture_default_str();
    greek->add_option("--greek", g.greek, "delta, gamma or vega")->capture_default_str();
    greek->add_option("--K", g.strike, "Strike")->capture_default_str();
    greek->add_option("--H", g.barrier, "Barrier (uoc)")->capture_default_str();
    greek->add_option("--d", g.d, "Monitoring dates")->capture_default_str();
    greek->add_option("--method", g.method, "mc-mv, qmc-mv, mc-cmv or qmc-cmv")->capture_default_str();
    greek->add_option("--construction", g.construction, "std, bb, pca or gpca (RQMC)")->capture_default_str();
    greek->add_option("--M", g.m, "Batches")->capture_default_str();
    greek->add_option("--N", g.n, "Samples per batch")->capture_default_str();
    greek->add_option("--seed", g.seed, "Master seed")->capture_default_str();
    greek->add_option("--S0", g.market.s0, "Spot")->capture_default_str();
    greek->add_option("--sigma", g.market.sigma, "Volatility")->capture_default_str();
    greek->add_option("--r", g.market.r, "Rate")->capture_default_str();
    greek->add_option("--T", g.market.maturity, "Maturity")->capture_default_str();
    greek->add_option("--workers", g.workers, "Worker threads")->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    if (print_config) {
        std::cout << config_to_json(default_config()).dump(2) << '\n';
        return 0;
    }
    if (*run) return cmd_run(config_path, dry_run, run_workers, output_override, format_override);
    if (*validate) return cmd_validate(level, validate_workers, corrupt_dim);
    if (*greek) return cmd_greek(g);
    std::cout << app.help() << '\n';
    return kExitUsage;
}
