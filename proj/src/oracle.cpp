#include "asianqmc/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "asianqmc/errors.hpp"
#include "asianqmc/lowdisc.hpp"

namespace asianqmc {

namespace {

// 15-point Kronrod abscissae and weights with the embedded 7-point Gauss rule
// (Piessens et al., QUADPACK qk15).
constexpr std::array<double, 8> kXgk = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod15(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b), half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double fsum = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * fsum;
        if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
    }
    return {a, b, kronrod * half, std::fabs((kronrod - gauss) * half)};
}

}  // namespace

QuadratureResult gauss_kronrod(const std::function<double(double)>& f, double a, double b, double abs_tol,
                               int max_subdivisions) {
    if (!(abs_tol > 0.0)) throw OracleFailure("quadrature tolerance must be positive");
    if (a == b) return {};
    std::priority_queue<Segment> heap;
    heap.push(kronrod15(f, a, b));
    double value = heap.top().value, error = heap.top().error;
    int subdivisions = 0;
    while (error > abs_tol) {
        if (subdivisions >= max_subdivisions)
            throw OracleFailure("quadrature did not reach tolerance " + std::to_string(abs_tol) + " (error estimate " +
                                std::to_string(error) + ")");
        const Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Segment left = kronrod15(f, worst.a, mid), right = kronrod15(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++subdivisions;
    }
    // Re-sum to shed the drift of the running updates.
    value = 0.0;
    error = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    return {value, error, subdivisions};
}

double normal_expectation(const std::function<double(double)>& f, const QuadratureSpec& spec) {
    const double lo = std::max(spec.lower, -kNormalTruncation);
    const double hi = std::min(spec.upper, kNormalTruncation);
    if (!(hi > lo)) return 0.0;
    const auto integrand = [&](double x) { return f(x) * normal_pdf(x); };
    return gauss_kronrod(integrand, lo, hi, spec.abs_tol, spec.max_subdivisions).value;
}

double conditional_quadrature(GreekKind greek, const OptionSpec& option, const MarketParams& params,
                              const TimeGrid& grid, const FactorizedCovariance& factor, std::span<const double> z,
                              const QuadratureSpec& spec) {
    if (z.size() != factor.size() || factor.size() != static_cast<std::size_t>(grid.d - 1))
        throw ShapeError("conditional_quadrature: z must have d-1 entries");
    std::vector<double> wbar(z.size());
    factor.apply(z, wbar);

    // S_A(x1) = S_A(0) exp(sigma sqrt(t1) x1), so each payoff boundary maps to an x1 threshold.
    PathSample path;
    fill_path(params, grid, 0.0, wbar, path, PathFields::kSpot);
    const double scale = params.sigma * std::sqrt(grid.t(1));
    auto threshold = [&](double level) { return (std::log(level) - std::log(path.s_avg)) / scale; };

    QuadratureSpec domain = spec;
    domain.lower = std::max(spec.lower, threshold(option.strike));
    if (option.kind == OptionKind::kUpAndOutAsianCall) domain.upper = std::min(spec.upper, threshold(option.barrier));

    const auto integrand = [&](double x1) {
        fill_path(params, grid, x1, wbar, path, PathFields::kSpot);
        const double s_avg = path.s_avg;
        // Inside the domain the payoff is active; evaluate it without the
        // indicator so rounding at the endpoints cannot switch it off.
        double f = 1.0;
        if (option.kind != OptionKind::kBinaryAsian) f = s_avg - option.strike;
        return std::exp(-params.r * grid.maturity) * f * mv_weight(greek, params, grid, path);
    };
    return normal_expectation(integrand, domain);
}

FdEstimate finite_difference(GreekKind greek, const PathPricer& pricer, const MarketParams& params, int dim, int n,
                             std::uint64_t seed, double bump) {
    if (!(bump > 0.0)) throw DomainError("finite difference bump must be positive");
    if (n < 2) throw DomainError("finite difference needs at least two samples");
    CounterRng rng(derive_key(seed, 0xfdULL));
    std::vector<double> x(static_cast<std::size_t>(dim));
    MarketParams up = params, down = params;
    if (greek == GreekKind::kVega) {
        up.sigma += bump;
        down.sigma -= bump;
    } else {
        up.s0 += bump;
        down.s0 -= bump;
    }
    double mean = 0.0, m2 = 0.0;
    for (int i = 0; i < n; ++i) {
        for (auto& xi : x) xi = inv_normal_cdf(CounterRng::to_unit(rng.next()));
        const double vu = pricer(up, x), vd = pricer(down, x);
        double sample;
        if (greek == GreekKind::kGamma) {
            sample = (vu - 2.0 * pricer(params, x) + vd) / (bump * bump);
        } else {
            sample = (vu - vd) / (2.0 * bump);
        }
        const double delta = sample - mean;
        mean += delta / (i + 1);
        m2 += delta * (sample - mean);
    }
    return {mean, std::sqrt(m2 / (n - 1) / n), n};
}

FdEstimate finite_difference_greek(GreekKind greek, const OptionSpec& option, const MarketParams& params,
                                   const TimeGrid& grid, int n, std::uint64_t seed, double bump) {
    const FactorizedCovariance factor = factorize(build_covariance(grid), Construction::kStd);
    PathSample path;
    std::vector<double> wbar(factor.size());
    const PathPricer pricer = [&](const MarketParams& p, std::span<const double> x) {
        factor.apply(x.subspan(1), wbar);
        fill_path(p, grid, x[0], wbar, path, PathFields::kSpot);
        return std::exp(-p.r * grid.maturity) * payoff(option, path.s_avg);
    };
    return finite_difference(greek, pricer, params, grid.d, n, seed, bump);
}

PathIntegrals naive_path_integrals(const MarketParams& params, const TimeGrid& grid, const PathSample& path) {
    const int d = grid.d;
    const double dt = grid.dt(), sigma = params.sigma;
    PathIntegrals out{0.0, 0.0, 0.0, 0.0, 0.0};
    auto g = [&](int j) { return path.w_tilde[static_cast<std::size_t>(j - 1)] - sigma * grid.t(j); };
    auto g_tilde = [&](int j) { return (j == 1 ? 0.0 : path.wbar[static_cast<std::size_t>(j - 2)]) - sigma * grid.t(j); };
    auto s = [&](int j) { return path.s[static_cast<std::size_t>(j - 1)]; };
    auto st = [&](int j) { return path.s_tilde[static_cast<std::size_t>(j - 1)]; };
    for (int j = 1; j <= d; ++j) {
        out.lin_g += s(j) * g(j);
        out.lin_g_tilde += st(j) * g_tilde(j);
    }
    for (int i = 1; i <= d; ++i) {
        for (int j = i; j <= d; ++j) {
            out.dbl_g += s(i) * s(j) * g(j);
            out.dbl_g_tilde += st(i) * st(j) * g_tilde(j);
            out.dbl_s_tilde += st(i) * st(j);
        }
    }
    out.lin_g *= dt;
    out.lin_g_tilde *= dt;
    out.dbl_g *= dt * dt;
    out.dbl_g_tilde *= dt * dt;
    out.dbl_s_tilde *= dt * dt;
    return out;
}

double naive_complex_delta(const MarketParams& p, const TimeGrid& grid, const PathSample& path,
                           const TerminalAveragePayoff& payoff2) {
    const int d = grid.d;
    const double T = grid.maturity, dt = grid.dt();
    auto a = [&](int j) { return 0.5 * T - grid.t(j); };
    auto s = [&](int j) { return path.s[static_cast<std::size_t>(j - 1)]; };
    double h = 0.0, int_w = 0.0, j2 = 0.0, j3 = 0.0;
    for (int v = 1; v <= d; ++v) {
        for (int u = 1; u <= v; ++u) h += a(v) * s(u);
        int_w += path.w_tilde[static_cast<std::size_t>(v - 1)];
    }
    for (int t = 1; t <= d; ++t) {
        for (int u = t; u <= d; ++u) j2 += a(t) * s(u);
        for (int v = t; v <= d; ++v)
            for (int u = t; u <= v; ++u) j3 += a(t) * a(v) * s(u);
    }
    h *= dt * dt;
    int_w *= dt;
    j2 *= dt * dt;
    j3 *= dt * dt * dt;
    const double sa = path.s_avg, sd = path.s.back(), sigma = p.sigma;
    const double weight = (sd - p.s0 - p.r * T * sa) / (sigma * sigma * T * sa) -
                          T * sa / (2.0 * sigma * h) * (int_w - 0.5 * T * path.w_tilde.back()) + j2 / (2.0 * h) + 0.5 -
                          T * sa * j3 / (2.0 * h * h);
    return std::exp(-p.r * T) * payoff2(sd, sa) * weight / p.s0;
}

}  // namespace asianqmc
