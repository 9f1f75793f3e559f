#include "asianqmc/estimators.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "asianqmc/errors.hpp"
#include "asianqmc/lowdisc.hpp"

namespace asianqmc {

std::string_view to_string(OptionKind k) {
    switch (k) {
        case OptionKind::kBinaryAsian: return "binary";
        case OptionKind::kAsianCall: return "call";
        case OptionKind::kUpAndOutAsianCall: return "uoc";
    }
    return "?";
}

std::string_view to_string(GreekKind g) {
    switch (g) {
        case GreekKind::kDelta: return "delta";
        case GreekKind::kGamma: return "gamma";
        case GreekKind::kVega: return "vega";
    }
    return "?";
}

OptionKind parse_option(std::string_view name) {
    if (name == "binary") return OptionKind::kBinaryAsian;
    if (name == "call") return OptionKind::kAsianCall;
    if (name == "uoc" || name == "up-and-out") return OptionKind::kUpAndOutAsianCall;
    throw ConfigError("unknown option kind '" + std::string(name) + "'");
}

GreekKind parse_greek(std::string_view name) {
    if (name == "delta") return GreekKind::kDelta;
    if (name == "gamma") return GreekKind::kGamma;
    if (name == "vega") return GreekKind::kVega;
    throw ConfigError("unknown greek '" + std::string(name) + "'");
}

void OptionSpec::validate() const {
    if (!(strike > 0.0)) throw DomainError("strike must be positive");
    if (kind == OptionKind::kUpAndOutAsianCall && !(barrier > strike))
        throw DomainError("up-and-out barrier must exceed the strike");
}

double payoff(const OptionSpec& option, double s_avg) {
    switch (option.kind) {
        case OptionKind::kBinaryAsian: return s_avg > option.strike ? 1.0 : 0.0;
        case OptionKind::kAsianCall: return std::max(s_avg - option.strike, 0.0);
        case OptionKind::kUpAndOutAsianCall:
            return s_avg <= option.barrier ? std::max(s_avg - option.strike, 0.0) : 0.0;
    }
    return 0.0;
}

double mv_weight(GreekKind greek, const MarketParams& p, const TimeGrid& grid, const PathSample& path) {
    const double s0 = p.s0, sig2 = p.sigma * p.sigma, r = p.r, T = grid.maturity, omega = p.omega();
    const double sa = path.s_avg, sd = path.s_last();
    switch (greek) {
        case GreekKind::kDelta:
            return 2.0 / (s0 * sig2) * ((sd - s0) / (T * sa) - omega);
        case GreekKind::kGamma:
            return 4.0 / (sig2 * sig2 * s0 * s0 * T * T * sa * sa) *
                   (sd * sd - 2.0 * sd * s0 + s0 * s0 + omega * r * T * T * sa * sa - 2.0 * r * T * sd * sa +
                    2.0 * omega * T * s0 * sa);
        case GreekKind::kVega:
            return 2.0 / (sig2 * T * T * sa * sa) *
                   ((sd - s0 - (r - sig2) * T * sa) * path.lin_g - sig2 * path.dbl_g - 0.5 * p.sigma * T * T * sa * sa);
    }
    return 0.0;
}

double mv_estimate(GreekKind greek, const OptionSpec& option, const MarketParams& params, const TimeGrid& grid,
                   const PathSample& path) {
    const double f = payoff(option, path.s_avg);
    if (f == 0.0) return 0.0;
    return std::exp(-params.r * grid.maturity) * f * mv_weight(greek, params, grid, path);
}

double mv_estimate_complex_delta(const MarketParams& p, const TimeGrid& grid, const PathSample& path,
                                 const TerminalAveragePayoff& payoff2) {
    const double f = payoff2(path.s_last(), path.s_avg);
    if (f == 0.0) return 0.0;
    const int d = grid.d;
    const double T = grid.maturity, dt = grid.dt();
    auto a = [&](int j) { return 0.5 * T - grid.t(j); };

    // h_T = int a_v int_0^v S_u du dv and the double/triple integrals of the
    // weight, as left-point sums. The triple sum
    //   sum_i a_i sum_{v>=i} a_v (P_v - P_{i-1})
    // uses suffix sums of a_v P_v and a_v so the whole pass is O(d).
    double prefix = 0.0, h = 0.0, int_w = 0.0;
    std::vector<double> prefix_s(static_cast<std::size_t>(d) + 1, 0.0);
    for (int j = 1; j <= d; ++j) {
        prefix += path.s[static_cast<std::size_t>(j - 1)];
        prefix_s[static_cast<std::size_t>(j)] = prefix;
        h += a(j) * prefix;
        int_w += path.w_tilde[static_cast<std::size_t>(j - 1)];
    }
    h *= dt * dt;
    int_w *= dt;
    if (std::fabs(h) < 1e-12) throw DegenerateWeight("complex-Asian delta: h_T vanished on a sample path");

    double j2 = 0.0, j3 = 0.0, suffix_s = 0.0, suffix_ap = 0.0, suffix_a = 0.0;
    for (int i = d; i >= 1; --i) {
        const auto ui = static_cast<std::size_t>(i);
        suffix_s += path.s[ui - 1];
        suffix_ap += a(i) * prefix_s[ui];
        suffix_a += a(i);
        j2 += a(i) * suffix_s;
        j3 += a(i) * (suffix_ap - prefix_s[ui - 1] * suffix_a);
    }
    j2 *= dt * dt;
    j3 *= dt * dt * dt;

    const double sigma = p.sigma, s0 = p.s0, sa = path.s_avg, sd = path.s_last();
    const double w_T = path.w_tilde.back();
    const double weight = (sd - s0 - p.r * T * sa) / (sigma * sigma * T * sa) -
                          T * sa / (2.0 * sigma * h) * (int_w - 0.5 * T * w_T) + j2 / (2.0 * h) + 0.5 -
                          T * sa * j3 / (2.0 * h * h);
    return std::exp(-p.r * T) * f * weight / s0;
}

ConditionalTerms conditional_terms(double strike, const MarketParams& p, const TimeGrid& grid,
                                   const PathSample& path) {
    const double t1 = grid.t(1);
    const double s = p.sigma * std::sqrt(t1);
    ConditionalTerms c;
    c.psi = (std::log(strike) - std::log(path.s_tilde_avg) - p.omega() * t1) / s;
    c.phi1 = normal_cdf(-c.psi);
    c.phi2 = normal_cdf(-s - c.psi);
    c.phi3 = normal_cdf(-2.0 * s - c.psi);
    c.phi2_tilde = normal_cdf(s - c.psi);
    return c;
}

namespace {

constexpr double kInvSqrt2Pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;

// Quantities shared by every closed form.
struct Common {
    double disc, s0, sigma, sig2, r, T, omega, t1, sqrt_t1, d;
    double st_a, st_d;
    double sum_g;   // sum_j S~_j (A_{j-1}Z - sigma t_j)
    double dbl_g;   // sum_{i<=j} S~_i S~_j (A_{j-1}Z - sigma t_j)
    double dbl_s;   // sum_{i<=j} S~_i S~_j

    Common(const MarketParams& p, const TimeGrid& grid, const PathSample& path)
        : disc(std::exp(-p.r * grid.maturity)), s0(p.s0), sigma(p.sigma), sig2(p.sigma * p.sigma), r(p.r),
          T(grid.maturity), omega(p.omega()), t1(grid.t(1)), sqrt_t1(std::sqrt(t1)), d(grid.d),
          st_a(path.s_tilde_avg), st_d(path.s_tilde_last()) {
        const double per_dt = grid.d / grid.maturity;
        sum_g = path.lin_g_tilde * per_dt;
        dbl_g = path.dbl_g_tilde * per_dt * per_dt;
        dbl_s = path.dbl_s_tilde * per_dt * per_dt;
    }
};

double binary_delta(const Common& c, const ConditionalTerms& k) {
    return (2.0 * c.disc * c.st_d / (c.T * c.s0 * c.st_a * c.sig2) - 2.0 * c.disc * c.omega / (c.s0 * c.sig2)) * k.phi1 -
           2.0 * c.disc * std::exp(-c.r * c.t1 + c.sig2 * c.t1) / (c.T * c.st_a * c.sig2) * k.phi2;
}

double binary_gamma(const Common& c, const ConditionalTerms& k) {
    const double ratio = c.st_d / c.st_a;
    return 4.0 * c.disc / (c.sig2 * c.sig2 * c.s0 * c.s0 * c.T * c.T) *
           ((ratio * ratio + c.omega * c.r * c.T * c.T - 2.0 * c.r * c.T * ratio) * k.phi1 +
            c.s0 * c.s0 / (c.st_a * c.st_a) * std::exp(-2.0 * c.r * c.t1 + 3.0 * c.sig2 * c.t1) * k.phi3 +
            (2.0 * c.omega * c.T * c.s0 / c.st_a - 2.0 * c.s0 * c.st_d / (c.st_a * c.st_a)) *
                std::exp(-c.r * c.t1 + c.sig2 * c.t1) * k.phi2);
}

double binary_vega(const Common& c, const ConditionalTerms& k) {
    const double D = c.disc, st_a2 = c.st_a * c.st_a;
    const double s = c.sigma * c.sqrt_t1;
    const double term1 = k.phi1 * (2.0 * D * (c.st_d - (c.r - c.sig2) * c.T * c.st_a) / (c.sig2 * c.T * st_a2 * c.d) * c.sum_g -
                                   2.0 * D / (c.d * c.d * st_a2) * c.dbl_g - D / c.sigma);
    const double term2 =
        k.phi2 * (2.0 * D * c.s0 * c.sqrt_t1 / (c.sig2 * c.T * c.st_a) * s *
                      std::exp(0.5 * c.sig2 * c.t1 - c.omega * c.t1) -
                  2.0 * c.s0 * D / (c.sig2 * c.T * c.d * st_a2) * std::exp(-c.r * c.t1 + c.sig2 * c.t1) * c.sum_g);
    const double term3 = kInvSqrt2Pi * std::exp(-0.5 * k.psi * k.psi) *
                         (2.0 * D * c.st_d * c.sqrt_t1 / (c.sig2 * c.T * c.st_a) -
                          2.0 * D / c.sig2 * c.sqrt_t1 * (c.r - c.sig2) -
                          2.0 * D * c.sqrt_t1 / (st_a2 * c.d * c.d) * c.dbl_s);
    const double term4 = 2.0 * D * c.s0 * c.sqrt_t1 / (c.sig2 * c.T * c.st_a) * kInvSqrt2Pi *
                         std::exp(0.5 * c.sig2 * c.t1 - c.omega * c.t1) *
                         std::exp(-0.5 * (k.psi + s) * (k.psi + s));
    return term1 + term2 + term3 - term4;
}

double binary(GreekKind g, const Common& c, const ConditionalTerms& k) {
    switch (g) {
        case GreekKind::kDelta: return binary_delta(c, k);
        case GreekKind::kGamma: return binary_gamma(c, k);
        case GreekKind::kVega: return binary_vega(c, k);
    }
    return 0.0;
}

double call(GreekKind g, double strike, const Common& c, const ConditionalTerms& k) {
    const double D = c.disc, ert1 = std::exp(c.r * c.t1);
    const double sig4 = c.sig2 * c.sig2;
    switch (g) {
        case GreekKind::kDelta:
            return -2.0 * D / (c.T * c.sig2) * k.phi1 +
                   (2.0 * D * c.st_d / (c.T * c.s0 * c.sig2) * ert1 - 2.0 * D * c.omega * c.st_a / (c.s0 * c.sig2) * ert1) *
                       k.phi2_tilde -
                   strike * binary_delta(c, k);
        case GreekKind::kGamma:
            return (8.0 * c.omega * D / (sig4 * c.s0 * c.T) - 8.0 * D * c.st_d / (sig4 * c.s0 * c.T * c.T * c.st_a)) * k.phi1 +
                   4.0 * D / (sig4 * c.T * c.T * c.st_a) * std::exp(-c.r * c.t1 + c.sig2 * c.t1) * k.phi2 +
                   (4.0 * D * c.st_d * c.st_d / (sig4 * c.s0 * c.s0 * c.T * c.T * c.st_a) * ert1 +
                    4.0 * D * c.omega * c.r * c.st_a / (sig4 * c.s0 * c.s0) * ert1 -
                    8.0 * c.r * c.st_d * D / (sig4 * c.s0 * c.s0 * c.T) * ert1) *
                       k.phi2_tilde -
                   strike * binary_gamma(c, k);
        case GreekKind::kVega: {
            const double s = c.sigma * c.sqrt_t1;
            // The bare "t" of the printed exponent is t_1, so this factor is exp(r t_1).
            const double growth = std::exp(0.5 * c.sig2 * c.t1 + c.omega * c.t1);
            const double coeff = 2.0 * D * c.st_d * c.sqrt_t1 / (c.sig2 * c.T) -
                                 2.0 * D * c.st_a / c.sig2 * c.sqrt_t1 * (c.r - c.sig2) -
                                 2.0 * D * c.sqrt_t1 / (c.st_a * c.d * c.d) * c.dbl_s;
            const double bracket = 2.0 * D * c.st_d / (c.sig2 * c.T * c.st_a * c.d) * c.sum_g * ert1 +
                                   coeff * s * growth -
                                   2.0 * D * (c.r - c.sig2) / (c.sig2 * c.d) * c.sum_g * ert1 -
                                   2.0 * D / (c.d * c.d * c.st_a) * c.dbl_g * ert1 - c.st_a * D / c.sigma * ert1;
            return -2.0 * D * c.s0 / (c.sig2 * c.T * c.st_a * c.d) * c.sum_g * k.phi1 - strike * binary_vega(c, k) -
                   2.0 * D * c.s0 * c.sqrt_t1 / (c.sig2 * c.T) * kInvSqrt2Pi * std::exp(-0.5 * k.psi * k.psi) +
                   bracket * k.phi2_tilde +
                   coeff * kInvSqrt2Pi * std::exp(0.5 * c.sig2 * c.t1 + c.omega * c.t1 - 0.5 * (k.psi - s) * (k.psi - s));
        }
    }
    return 0.0;
}

}  // namespace

double cmv_estimate(GreekKind greek, const OptionSpec& option, const MarketParams& params, const TimeGrid& grid,
                    const PathSample& path) {
    const Common c(params, grid, path);
    const ConditionalTerms at_k = conditional_terms(option.strike, params, grid, path);
    switch (option.kind) {
        case OptionKind::kBinaryAsian: return binary(greek, c, at_k);
        case OptionKind::kAsianCall: return call(greek, option.strike, c, at_k);
        case OptionKind::kUpAndOutAsianCall: {
            // (a-K)^+ 1{a<=H} = (a-K)^+ - (a-H)^+ - (H-K) 1{a>H}
            const ConditionalTerms at_h = conditional_terms(option.barrier, params, grid, path);
            return call(greek, option.strike, c, at_k) -
                   (call(greek, option.barrier, c, at_h) + (option.barrier - option.strike) * binary(greek, c, at_h));
        }
    }
    return 0.0;
}

}  // namespace asianqmc
