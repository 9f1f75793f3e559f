#pragma once

// Batch-means driver: M independent randomizations of an N-sample rule per
// method, variance reduction factors against the MC-MV baseline, and full
// experiment sweeps.
//
// The batch loop has an OpenMP kernel (run_batches) and a serial reference
// (run_batches_serial). Both compute each batch mean with the same summation
// order, so they agree bit for bit for any worker count.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asianqmc/estimators.hpp"
#include "asianqmc/pathgen.hpp"

namespace asianqmc {

enum class Sampler { kMC, kRQMC };
enum class Estimator { kMV, kCMV };

struct MethodSpec {
    Sampler sampler = Sampler::kMC;
    Estimator estimator = Estimator::kMV;
    Construction construction = Construction::kGpca;  // RQMC only

    // "mc-mv", "qmc-mv", "mc-cmv", "qmc-cmv"
    std::string name() const;
    static MethodSpec parse(std::string_view name, Construction construction = Construction::kGpca);
    // Path construction actually used: MC always samples with STD.
    Construction effective_construction() const {
        return sampler == Sampler::kMC ? Construction::kStd : construction;
    }
    bool operator==(const MethodSpec&) const = default;
};

// The four methods compared throughout, MC-MV first.
std::vector<MethodSpec> standard_methods(Construction construction = Construction::kGpca);

struct GreekEstimate {
    double mean = 0.0;
    double var_of_means = 0.0;  // sum (Q_j - mean)^2 / (M (M - 1))
    double std_err = 0.0;
    int m_batches = 0;
    int n_samples = 0;
    std::vector<double> batch_means;
};

GreekEstimate summarize_batches(std::vector<double> batch_means, int n_samples);

// Maps one normal vector to one sample. Each worker builds its own evaluator
// through `make`, so evaluators may keep mutable scratch space.
using SampleFn = std::function<double(std::span<const double>)>;
struct Integrand {
    std::size_t dim = 0;
    std::function<SampleFn()> make;
};

// Resolves the worker count: explicit > 0, else ASIANQMC_WORKERS, else the
// OpenMP default.
int resolve_workers(int requested);

GreekEstimate run_batches(const Integrand& integrand, Sampler sampler, int m, int n, std::uint64_t seed,
                          int workers = 0);
GreekEstimate run_batches_serial(const Integrand& integrand, Sampler sampler, int m, int n, std::uint64_t seed);

struct RunOptions {
    int workers = 0;
    std::size_t gpca_pilot_size = 1024;
    double gpca_fd_step = 1e-4;
};

// Builds the path factor (running the GPCA pilot when asked) and the
// per-sample estimator for one (method, greek, option) cell. MV integrands
// take d normals (X1 first); CMV integrands take the d-1 normals of Z.
Integrand make_greek_integrand(const MethodSpec& method, GreekKind greek, const OptionSpec& option,
                               const MarketParams& params, const TimeGrid& grid, std::uint64_t seed,
                               const RunOptions& options = {});

GreekEstimate run_batches(const MethodSpec& method, GreekKind greek, const OptionSpec& option,
                          const MarketParams& params, const TimeGrid& grid, int m, int n, std::uint64_t seed,
                          const RunOptions& options = {});

// baseline variance / candidate variance; +inf (with a warning on stderr)
// when the candidate variance is zero. Throws ConfigError on mismatched sizes.
double compute_vrf(const GreekEstimate& baseline, const GreekEstimate& candidate);

struct ExperimentConfig {
    MarketParams market;
    std::vector<OptionKind> options;
    std::vector<GreekKind> greeks;
    std::vector<double> strikes;
    std::vector<int> dims;
    double barrier = 120.0;
    std::vector<MethodSpec> methods;
    int m_batches = 500;
    int n_samples = 1 << 15;
    std::uint64_t seed = 20240101;
    Construction construction = Construction::kGpca;
    std::size_t gpca_pilot_size = 1024;
    bool record_timing = true;
    std::string output_path = "report.csv";
    std::string output_format = "csv";  // csv | markdown | both

    // Throws ConfigError naming the offending field.
    void validate() const;
    std::size_t cell_count() const;
};

struct ReportRow {
    OptionKind option;
    GreekKind greek;
    double strike;
    int d;
    std::string method;
    GreekEstimate estimate;
    double vrf = 1.0;
    double seconds = 0.0;
    std::string status = "ok";  // anything else is an error message

    bool ok() const { return status == "ok"; }
};

struct ExperimentReport {
    std::vector<ReportRow> rows;
    bool partial() const;
};

// Seed for one cell, derived from the master seed and the cell's content so a
// cell reproduces whatever else the sweep contains.
std::uint64_t cell_seed(std::uint64_t master, OptionKind option, GreekKind greek, double strike, int d,
                        const MethodSpec& method);

struct PlannedCell {
    OptionKind option;
    GreekKind greek;
    double strike;
    int d;
    MethodSpec method;
};
std::vector<PlannedCell> plan_cells(const ExperimentConfig& config);

ExperimentReport run_experiment(const ExperimentConfig& config, int workers = 0,
                                const std::function<void(const ReportRow&)>& on_row = {});

std::vector<GreekEstimate> convergence_scan(GreekKind greek, const OptionSpec& option, const MarketParams& params,
                                            const MethodSpec& method, std::span<const int> d_list, int m, int n,
                                            std::uint64_t seed, const RunOptions& options = {});

}  // namespace asianqmc
