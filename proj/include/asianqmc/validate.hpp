#pragma once

// Named self-checks run by `asianqmc validate` and the acceptance suite. Each
// check compares a fast path against an independent oracle or a structural
// property and reports the worst discrepancy it saw.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "asianqmc/engine.hpp"
#include "asianqmc/lowdisc.hpp"

namespace asianqmc {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

// Every coordinate of the first n base points (and of one scrambled copy)
// puts exactly one point in each interval [k/n, (k+1)/n). n must be a power
// of two.
CheckResult check_sobol_stratification(const SobolDirections& directions, std::size_t dims, std::size_t n);

// Monotonicity, antisymmetry and reference quantiles of inv_normal_cdf.
CheckResult check_inverse_normal();

// max |AA' - Sigma| <= rel_tol * max |Sigma| for STD, BB, PCA and GPCA.
CheckResult check_factorizations(std::span<const int> dims, double rel_tol = 1e-10);

// cmv_estimate against conditional_quadrature for every (option, greek) pair
// at `z_draws` random Z. Passes when |cmv - q| <= rel_tol |q| + abs_floor.
CheckResult check_quadrature_equivalence(int d, int z_draws, std::uint64_t seed, double rel_tol = 1e-7,
                                         double abs_floor = 1e-10);

// Quadrature at abs_tol 1e-10 and 1e-12 agree to 1e-9.
CheckResult check_quadrature_self_consistency(int d, std::uint64_t seed);

// |mean(MC-MV) - mean(MC-CMV)| <= z_max combined SE for all nine
// (option, greek) pairs at K = 100.
CheckResult check_conditioning_consistency(int d, int m, int n, std::uint64_t seed, int workers,
                                           double z_max = 4.0);

// Call delta by MV (m x n batch means) against the central-difference
// estimate with n * m common-random-number paths.
CheckResult check_fd_agreement(OptionKind option, int d, int m, int n, std::uint64_t seed, double bump,
                               double z_max, int workers);

struct ScanVerdict {
    bool gaps_shrink = false;
    bool final_gap_ok = false;
    std::vector<double> gaps;
    std::vector<double> gap_se;
};
// Gaps |mean_{k+1} - mean_k| shrink within noise when each gap exceeds the
// previous one by at most 2 SE of their difference; the last gap must be below
// z_final combined SE.
ScanVerdict judge_convergence(std::span<const GreekEstimate> scan, double z_final = 5.0);
CheckResult check_convergence_scan(std::span<const int> d_list, int m, int n, std::uint64_t seed, int workers);

enum class ValidationLevel { kFast, kFull };

std::vector<CheckResult> run_validation(ValidationLevel level, const SobolDirections& directions, int workers = 0,
                                        const std::function<void(const CheckResult&)>& on_check = {});

}  // namespace asianqmc
