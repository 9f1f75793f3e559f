#pragma once

// Slow reference computations used to check the fast paths: numerical
// conditional expectations, finite-difference Greeks with common random
// numbers, and direct nested-loop versions of the discretized integrals.

#include <cstdint>
#include <functional>
#include <limits>
#include <span>

#include "asianqmc/estimators.hpp"

namespace asianqmc {

struct QuadratureSpec {
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    double abs_tol = 1e-10;
    int max_subdivisions = 500;
};

// Normal mass beyond |x| = 8.5 is below 1e-17; integrals against phi are truncated there.
inline constexpr double kNormalTruncation = 8.5;

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int subdivisions = 0;
};

// Adaptive Gauss-Kronrod (7/15) on a finite interval, bisecting the interval
// with the largest error estimate. Throws OracleFailure if abs_tol is not met
// within max_subdivisions.
QuadratureResult gauss_kronrod(const std::function<double(double)>& f, double a, double b, double abs_tol,
                               int max_subdivisions);

// int f(x) phi(x) dx over [spec.lower, spec.upper] clipped to +-8.5.
double normal_expectation(const std::function<double(double)>& f, const QuadratureSpec& spec);

// E[mv_estimate | Z = z] by quadrature over x1. The integration domain is
// derived from where the payoff is non-zero; spec.lower/upper further clip it.
double conditional_quadrature(GreekKind greek, const OptionSpec& option, const MarketParams& params,
                              const TimeGrid& grid, const FactorizedCovariance& factor, std::span<const double> z,
                              const QuadratureSpec& spec = {});

struct FdEstimate {
    double value = 0.0;
    double std_err = 0.0;
    int n = 0;
};

// Central differences of the discounted MC price with the same normals at each
// bumped parameter: delta and gamma bump S0, vega bumps sigma.
FdEstimate finite_difference_greek(GreekKind greek, const OptionSpec& option, const MarketParams& params,
                                   const TimeGrid& grid, int n, std::uint64_t seed, double bump);

// Same, for any price functional of the parameters evaluated with a fixed
// normal draw `x` (exposed so the differencing can be checked on smooth
// deterministic functions).
using PathPricer = std::function<double(const MarketParams&, std::span<const double> x)>;
FdEstimate finite_difference(GreekKind greek, const PathPricer& pricer, const MarketParams& params, int dim, int n,
                             std::uint64_t seed, double bump);

struct PathIntegrals {
    double lin_g, dbl_g, lin_g_tilde, dbl_g_tilde, dbl_s_tilde;
};

// O(d^2) double sums computed straight from the definitions.
PathIntegrals naive_path_integrals(const MarketParams& params, const TimeGrid& grid, const PathSample& path);

// O(d^3) evaluation of the complex-Asian delta estimate.
double naive_complex_delta(const MarketParams& params, const TimeGrid& grid, const PathSample& path,
                           const TerminalAveragePayoff& payoff2);

}  // namespace asianqmc
