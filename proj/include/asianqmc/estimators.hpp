#pragma once

// Malliavin (MV) per-path Greek estimators for continuously monitored Asian
// options and their conditional (CMV) closed forms, obtained by integrating
// the first normal coordinate X1 out analytically.

#include <functional>
#include <string_view>

#include "asianqmc/model.hpp"

namespace asianqmc {

enum class OptionKind { kBinaryAsian, kAsianCall, kUpAndOutAsianCall };
enum class GreekKind { kDelta, kGamma, kVega };

std::string_view to_string(OptionKind k);
std::string_view to_string(GreekKind g);
OptionKind parse_option(std::string_view name);
GreekKind parse_greek(std::string_view name);

struct OptionSpec {
    OptionKind kind = OptionKind::kAsianCall;
    double strike = 100.0;
    double barrier = 0.0;  // up-and-out only

    void validate() const;  // throws DomainError
};

// Undiscounted payoff of the average price.
double payoff(const OptionSpec& option, double s_avg);

// Weight multiplying exp(-rT) f(S_A); uses the spot-side fields of `path`.
double mv_weight(GreekKind greek, const MarketParams& params, const TimeGrid& grid, const PathSample& path);

// exp(-rT) f(S_A) * weight.
double mv_estimate(GreekKind greek, const OptionSpec& option, const MarketParams& params, const TimeGrid& grid,
                   const PathSample& path);

// Delta of a payoff depending on (S_T, S_A), with the time integrals of the
// weight replaced by their left-point sums on the grid and a_t = T/2 - t.
// Throws DegenerateWeight when the normalizing integral h_T vanishes.
using TerminalAveragePayoff = std::function<double(double s_terminal, double s_avg)>;
double mv_estimate_complex_delta(const MarketParams& params, const TimeGrid& grid, const PathSample& path,
                                 const TerminalAveragePayoff& payoff2);

struct ConditionalTerms {
    double psi = 0.0;        // X1 threshold where S_A crosses the strike
    double phi1 = 0.0;       // Phi(-psi)
    double phi2 = 0.0;       // Phi(-s - psi), s = sigma sqrt(t_1)
    double phi3 = 0.0;       // Phi(-2s - psi)
    double phi2_tilde = 0.0; // Phi(s - psi)
};

ConditionalTerms conditional_terms(double strike, const MarketParams& params, const TimeGrid& grid,
                                   const PathSample& path);

// E[mv_estimate | Z]; only the tilde-side fields of `path` are read, so the
// result does not depend on path.x1.
double cmv_estimate(GreekKind greek, const OptionSpec& option, const MarketParams& params, const TimeGrid& grid,
                    const PathSample& path);

}  // namespace asianqmc
