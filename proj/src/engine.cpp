#include "asianqmc/engine.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <limits>
#include <memory>
#include <mutex>

#include <omp.h>

#include "asianqmc/errors.hpp"
#include "asianqmc/lowdisc.hpp"

namespace asianqmc {

std::string MethodSpec::name() const {
    std::string out = sampler == Sampler::kMC ? "mc-" : "qmc-";
    out += estimator == Estimator::kMV ? "mv" : "cmv";
    return out;
}

MethodSpec MethodSpec::parse(std::string_view name, Construction construction) {
    if (name == "mc-mv") return {Sampler::kMC, Estimator::kMV, construction};
    if (name == "qmc-mv" || name == "rqmc-mv") return {Sampler::kRQMC, Estimator::kMV, construction};
    if (name == "mc-cmv") return {Sampler::kMC, Estimator::kCMV, construction};
    if (name == "qmc-cmv" || name == "rqmc-cmv") return {Sampler::kRQMC, Estimator::kCMV, construction};
    throw ConfigError("unknown method '" + std::string(name) + "'");
}

std::vector<MethodSpec> standard_methods(Construction construction) {
    return {{Sampler::kMC, Estimator::kMV, construction},
            {Sampler::kRQMC, Estimator::kMV, construction},
            {Sampler::kMC, Estimator::kCMV, construction},
            {Sampler::kRQMC, Estimator::kCMV, construction}};
}

GreekEstimate summarize_batches(std::vector<double> batch_means, int n_samples) {
    GreekEstimate est;
    est.m_batches = static_cast<int>(batch_means.size());
    est.n_samples = n_samples;
    const double m = static_cast<double>(batch_means.size());
    double sum = 0.0;
    for (double q : batch_means) sum += q;
    est.mean = sum / m;
    double ss = 0.0;
    for (double q : batch_means) ss += (q - est.mean) * (q - est.mean);
    est.var_of_means = batch_means.size() > 1 ? ss / (m * (m - 1.0)) : 0.0;
    est.std_err = std::sqrt(est.var_of_means);
    est.batch_means = std::move(batch_means);
    return est;
}

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("ASIANQMC_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return omp_get_max_threads();
}

namespace {

void check_sizes(const Integrand& integrand, Sampler sampler, int m, int n) {
    if (m < 2) throw ConfigError("at least two batches are required");
    if (n < 2) throw ConfigError("at least two samples per batch are required");
    if (integrand.dim == 0 || !integrand.make) throw ConfigError("integrand is empty");
    if (sampler == Sampler::kRQMC && !std::has_single_bit(static_cast<unsigned>(n)))
        throw ConfigError("RQMC needs a power-of-two sample count");
}

// Shared per-batch kernel: one evaluator, one normal buffer, samples summed in
// index order.
class BatchKernel {
public:
    BatchKernel(const Integrand& integrand, Sampler sampler, int n, std::uint64_t seed, const SobolDigits* base)
        : sampler_(sampler), n_(n), seed_(seed), base_(base), eval_(integrand.make()), x_(integrand.dim) {}

    double operator()(int batch) {
        const std::size_t dim = x_.size();
        double sum = 0.0;
        if (sampler_ == Sampler::kMC) {
            const CounterRng rng(derive_key(seed_, static_cast<std::uint64_t>(batch), 1));
            for (int i = 0; i < n_; ++i) {
                const std::uint64_t offset = static_cast<std::uint64_t>(i) * dim;
                for (std::size_t k = 0; k < dim; ++k) x_[k] = inv_normal_cdf(CounterRng::to_unit(rng.at(offset + k)));
                sum += eval_(x_);
            }
        } else {
            const DigitalScramble scramble(dim, {seed_, static_cast<std::uint64_t>(batch)});
            for (int i = 0; i < n_; ++i) {
                const auto digits = base_->point(static_cast<std::size_t>(i));
                for (std::size_t k = 0; k < dim; ++k) x_[k] = inv_normal_cdf(digits_to_unit(scramble.apply(digits[k], k)));
                sum += eval_(x_);
            }
        }
        return sum / n_;
    }

private:
    Sampler sampler_;
    int n_;
    std::uint64_t seed_;
    const SobolDigits* base_;
    SampleFn eval_;
    std::vector<double> x_;
};

std::optional<SobolDigits> base_digits(const Integrand& integrand, Sampler sampler, int n) {
    if (sampler != Sampler::kRQMC) return std::nullopt;
    return generate_sobol_digits(integrand.dim, static_cast<std::size_t>(n));
}

}  // namespace

GreekEstimate run_batches(const Integrand& integrand, Sampler sampler, int m, int n, std::uint64_t seed,
                          int workers) {
    check_sizes(integrand, sampler, m, n);
    const auto base = base_digits(integrand, sampler, n);
    std::vector<double> means(static_cast<std::size_t>(m));
    std::exception_ptr failure;
    std::once_flag failed;
#pragma omp parallel num_threads(resolve_workers(workers))
    {
        std::optional<BatchKernel> kernel;
        try {
            kernel.emplace(integrand, sampler, n, seed, base ? &*base : nullptr);
        } catch (...) {
            std::call_once(failed, [&] { failure = std::current_exception(); });
        }
#pragma omp for schedule(dynamic, 1)
        for (int j = 0; j < m; ++j) {
            if (!kernel) continue;
            try {
                means[static_cast<std::size_t>(j)] = (*kernel)(j);
            } catch (...) {
                std::call_once(failed, [&] { failure = std::current_exception(); });
            }
        }
    }
    if (failure) std::rethrow_exception(failure);
    return summarize_batches(std::move(means), n);
}

GreekEstimate run_batches_serial(const Integrand& integrand, Sampler sampler, int m, int n, std::uint64_t seed) {
    check_sizes(integrand, sampler, m, n);
    const auto base = base_digits(integrand, sampler, n);
    BatchKernel kernel(integrand, sampler, n, seed, base ? &*base : nullptr);
    std::vector<double> means(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) means[static_cast<std::size_t>(j)] = kernel(j);
    return summarize_batches(std::move(means), n);
}

Integrand make_greek_integrand(const MethodSpec& method, GreekKind greek, const OptionSpec& option,
                               const MarketParams& params, const TimeGrid& grid, std::uint64_t seed,
                               const RunOptions& options) {
    params.validate();
    option.validate();
    if (grid.d < 2) throw InvalidGrid("the estimators need d >= 2 monitoring dates");
    if (std::fabs(grid.maturity - params.maturity) > 1e-12 * params.maturity)
        throw ConfigError("time grid maturity differs from the market maturity");

    const bool cmv = method.estimator == Estimator::kCMV;
    const PathFields fields = cmv ? PathFields::kTilde : PathFields::kSpot;
    // Value of the estimator as a function of the shifted Brownian values
    // (x1 fixed at 0 for MV); used as the GPCA pilot target.
    auto estimator_at = [=](double x1, std::span<const double> wbar, PathSample& path) {
        fill_path(params, grid, x1, wbar, path, fields);
        return cmv ? cmv_estimate(greek, option, params, grid, path) : mv_estimate(greek, option, params, grid, path);
    };

    const Eigen::MatrixXd sigma = build_covariance(grid);
    std::optional<GpcaPilot> pilot;
    const Construction construction = method.effective_construction();
    if (construction == Construction::kGpca) {
        auto scratch = std::make_shared<PathSample>();
        pilot = GpcaPilot{[=](std::span<const double> wbar) { return estimator_at(0.0, wbar, *scratch); },
                          options.gpca_pilot_size, options.gpca_fd_step, derive_key(seed, 0x9b1a07ULL)};
    }
    auto factor = std::make_shared<const FactorizedCovariance>(factorize(sigma, construction, pilot));

    Integrand integrand;
    integrand.dim = cmv ? factor->size() : factor->size() + 1;
    integrand.make = [=]() -> SampleFn {
        auto path = std::make_shared<PathSample>();
        auto wbar = std::make_shared<std::vector<double>>(factor->size());
        return [=](std::span<const double> x) {
            const auto z = cmv ? x : x.subspan(1);
            factor->apply(z, *wbar);
            return estimator_at(cmv ? 0.0 : x[0], *wbar, *path);
        };
    };
    return integrand;
}

GreekEstimate run_batches(const MethodSpec& method, GreekKind greek, const OptionSpec& option,
                          const MarketParams& params, const TimeGrid& grid, int m, int n, std::uint64_t seed,
                          const RunOptions& options) {
    const Integrand integrand = make_greek_integrand(method, greek, option, params, grid, seed, options);
    return run_batches(integrand, method.sampler, m, n, seed, options.workers);
}

double compute_vrf(const GreekEstimate& baseline, const GreekEstimate& candidate) {
    if (baseline.m_batches != candidate.m_batches || baseline.n_samples != candidate.n_samples)
        throw ConfigError("VRF needs estimates built with the same batch and sample counts");
    if (candidate.var_of_means <= 0.0) {
        std::cerr << "warning: candidate variance is zero; VRF reported as infinite\n";
        return std::numeric_limits<double>::infinity();
    }
    return baseline.var_of_means / candidate.var_of_means;
}

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError(what); };
    try {
        market.validate();
    } catch (const DomainError& e) {
        fail(std::string("market: ") + e.what());
    }
    if (options.empty()) fail("options: list is empty");
    if (greeks.empty()) fail("greeks: list is empty");
    if (strikes.empty()) fail("strikes: list is empty");
    if (dims.empty()) fail("dims: list is empty");
    if (methods.empty()) fail("methods: list is empty");
    for (double k : strikes)
        if (!(k > 0.0)) fail("strikes: every strike must be positive");
    for (int d : dims)
        if (d < 2 || d > 1025) fail("dims: every d must lie in [2, 1025]");
    for (auto o : options)
        if (o == OptionKind::kUpAndOutAsianCall)
            for (double k : strikes)
                if (!(barrier > k)) fail("barrier: must exceed every strike for up-and-out options");
    if (m_batches < 2) fail("m_batches: must be at least 2");
    if (n_samples < 2) fail("n_samples: must be at least 2");
    for (const auto& m : methods)
        if (m.sampler == Sampler::kRQMC && !std::has_single_bit(static_cast<unsigned>(n_samples)))
            fail("n_samples: must be a power of two when an RQMC method is present");
    if (gpca_pilot_size == 0) fail("gpca_pilot_size: must be positive");
    if (output_format != "csv" && output_format != "markdown" && output_format != "both")
        fail("output.format: must be csv, markdown or both");
}

std::size_t ExperimentConfig::cell_count() const {
    return options.size() * greeks.size() * strikes.size() * dims.size() * methods.size();
}

bool ExperimentReport::partial() const {
    for (const auto& r : rows)
        if (!r.ok()) return true;
    return false;
}

std::uint64_t cell_seed(std::uint64_t master, OptionKind option, GreekKind greek, double strike, int d,
                        const MethodSpec& method) {
    const std::uint64_t what = (static_cast<std::uint64_t>(option) << 8) | (static_cast<std::uint64_t>(greek) << 4) |
                               (static_cast<std::uint64_t>(method.sampler) << 2) |
                               (static_cast<std::uint64_t>(method.estimator) << 1);
    const std::uint64_t where = derive_key(std::bit_cast<std::uint64_t>(strike), static_cast<std::uint64_t>(d),
                                           static_cast<std::uint64_t>(method.effective_construction()));
    return derive_key(master, what, where);
}

std::vector<PlannedCell> plan_cells(const ExperimentConfig& config) {
    std::vector<PlannedCell> cells;
    for (auto option : config.options)
        for (auto greek : config.greeks)
            for (double k : config.strikes)
                for (int d : config.dims)
                    for (const auto& m : config.methods) cells.push_back({option, greek, k, d, m});
    return cells;
}

ExperimentReport run_experiment(const ExperimentConfig& config, int workers,
                                const std::function<void(const ReportRow&)>& on_row) {
    config.validate();
    const MethodSpec baseline_method{Sampler::kMC, Estimator::kMV, config.construction};
    RunOptions run_options;
    run_options.workers = workers;
    run_options.gpca_pilot_size = config.gpca_pilot_size;

    ExperimentReport report;
    for (auto option_kind : config.options)
        for (auto greek : config.greeks)
            for (double strike : config.strikes)
                for (int d : config.dims) {
                    const OptionSpec option{option_kind, strike, config.barrier};
                    auto run_cell = [&](const MethodSpec& method) {
                        ReportRow row{option_kind, greek, strike, d, method.name(), {}, 1.0, 0.0, "ok"};
                        const auto start = std::chrono::steady_clock::now();
                        try {
                            const TimeGrid grid(d, config.market.maturity);
                            row.estimate = run_batches(method, greek, option, config.market, grid, config.m_batches,
                                                       config.n_samples,
                                                       cell_seed(config.seed, option_kind, greek, strike, d, method),
                                                       run_options);
                        } catch (const std::exception& e) {
                            row.status = e.what();
                        }
                        if (config.record_timing)
                            row.seconds =
                                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                        return row;
                    };
                    // Baseline first; reused when MC-MV is itself requested.
                    const ReportRow baseline = run_cell(baseline_method);
                    for (const auto& requested : config.methods) {
                        MethodSpec method = requested;
                        method.construction = config.construction;
                        ReportRow row = method == baseline_method ? baseline : run_cell(method);
                        if (row.ok() && baseline.ok()) {
                            row.vrf = method == baseline_method ? 1.0 : compute_vrf(baseline.estimate, row.estimate);
                        } else {
                            row.vrf = std::numeric_limits<double>::quiet_NaN();
                            if (row.ok()) row.status = "baseline failed: " + baseline.status;
                        }
                        if (on_row) on_row(row);
                        report.rows.push_back(std::move(row));
                    }
                }
    return report;
}

std::vector<GreekEstimate> convergence_scan(GreekKind greek, const OptionSpec& option, const MarketParams& params,
                                            const MethodSpec& method, std::span<const int> d_list, int m, int n,
                                            std::uint64_t seed, const RunOptions& options) {
    for (std::size_t i = 1; i < d_list.size(); ++i)
        if (d_list[i] <= d_list[i - 1]) throw ConfigError("convergence_scan: d_list must be increasing");
    std::vector<GreekEstimate> out;
    out.reserve(d_list.size());
    for (int d : d_list) out.push_back(run_batches(method, greek, option, params, TimeGrid(d, params.maturity), m, n, seed, options));
    return out;
}

}  // namespace asianqmc
