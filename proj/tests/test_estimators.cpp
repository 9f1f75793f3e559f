#include <doctest.h>

#include <cmath>
#include <memory>

#include "asianqmc/engine.hpp"
#include "asianqmc/errors.hpp"
#include "asianqmc/lowdisc.hpp"
#include "asianqmc/oracle.hpp"

using namespace asianqmc;

namespace {

constexpr OptionKind kOptions[] = {OptionKind::kBinaryAsian, OptionKind::kAsianCall, OptionKind::kUpAndOutAsianCall};
constexpr GreekKind kGreeks[] = {GreekKind::kDelta, GreekKind::kGamma, GreekKind::kVega};

std::vector<double> normals(std::uint64_t key, std::size_t n) {
    const CounterRng rng(key);
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_normal_cdf(CounterRng::to_unit(rng.at(i)));
    return z;
}

PathSample random_path(const MarketParams& p, const TimeGrid& grid, std::uint64_t key) {
    const auto f = factorize(build_covariance(grid), Construction::kStd);
    return simulate_path(p, grid, f, normals(key, static_cast<std::size_t>(grid.d)));
}

}  // namespace

TEST_SUITE("estimators") {

TEST_CASE("payoffs") {
    CHECK(payoff({OptionKind::kBinaryAsian, 100.0}, 105.0) == 1.0);
    CHECK(payoff({OptionKind::kBinaryAsian, 100.0}, 95.0) == 0.0);
    CHECK(payoff({OptionKind::kAsianCall, 100.0}, 95.0) == 0.0);
    CHECK(payoff({OptionKind::kAsianCall, 100.0}, 107.5) == 7.5);
    CHECK(payoff({OptionKind::kUpAndOutAsianCall, 90.0, 120.0}, 130.0) == 0.0);
    CHECK(payoff({OptionKind::kUpAndOutAsianCall, 90.0, 120.0}, 110.0) == 20.0);
}

TEST_CASE("up-and-out payoff decomposes into calls and a binary") {
    const double k = 95.0, h = 120.0;
    for (double a = 50.0; a <= 200.0; a += 0.37) {
        if (a == h) continue;
        const double lhs = payoff({OptionKind::kUpAndOutAsianCall, k, h}, a);
        const double rhs = payoff({OptionKind::kAsianCall, k}, a) - payoff({OptionKind::kAsianCall, h}, a) -
                           (h - k) * payoff({OptionKind::kBinaryAsian, h}, a);
        REQUIRE(lhs == doctest::Approx(rhs).epsilon(1e-13));
    }
}

TEST_CASE("delta weight on the zero-noise two-date path") {
    const MarketParams p;
    const TimeGrid grid(2, 1.0);
    const PathSample path = simulate_path(p, grid, factorize(build_covariance(grid), Construction::kStd), std::vector<double>(2, 0.0));
    const double s1 = 100.0 * std::exp(0.04), s2 = 100.0 * std::exp(0.08);
    const double expected = (2.0 / (100.0 * 0.04)) * ((s2 - 100.0) / (0.5 * (s1 + s2)) - 0.08);
    CHECK(mv_weight(GreekKind::kDelta, p, grid, path) == doctest::Approx(expected).epsilon(1e-13));
    CHECK(mv_weight(GreekKind::kDelta, p, grid, path) == doctest::Approx(-7.896e-4).epsilon(1e-3));
}

TEST_CASE("gamma weight with S_d = S_A = S0") {
    const MarketParams p;
    const TimeGrid grid(2, 1.0);
    PathSample path;
    path.s = {100.0, 100.0};
    path.s_avg = 100.0;
    const double sig = 0.2, w = p.omega(), r = 0.1;
    const double expected = 4.0 / (std::pow(sig, 4) * 1e4) * (w * r - 2.0 * r + 2.0 * w);
    CHECK(mv_weight(GreekKind::kGamma, p, grid, path) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("vega weight matches the direct double sums") {
    const MarketParams p;
    for (int d : {2, 5, 32}) {
        const TimeGrid grid(d, 1.0);
        for (std::uint64_t k = 0; k < 4; ++k) {
            const PathSample path = k == 0 ? simulate_path(p, grid, factorize(build_covariance(grid), Construction::kStd),
                                                           std::vector<double>(static_cast<std::size_t>(d), 0.0))
                                           : random_path(p, grid, derive_key(31, k));
            const PathIntegrals n = naive_path_integrals(p, grid, path);
            const double sa = path.s_avg, sd = path.s_last(), s2 = p.sigma * p.sigma;
            const double expected = (2.0 / (s2 * sa * sa)) *
                                    ((sd - p.s0 - (p.r - s2) * sa) * n.lin_g - s2 * n.dbl_g - 0.5 * p.sigma * sa * sa);
            CHECK(mv_weight(GreekKind::kVega, p, grid, path) == doctest::Approx(expected).epsilon(1e-11));
        }
    }
}

TEST_CASE("path accumulators agree with the nested-loop sums") {
    const MarketParams p;
    const TimeGrid grid(16, 1.0);
    for (std::uint64_t k = 0; k < 5; ++k) {
        const PathSample path = random_path(p, grid, derive_key(37, k));
        const PathIntegrals n = naive_path_integrals(p, grid, path);
        CHECK(path.lin_g == doctest::Approx(n.lin_g).epsilon(1e-12));
        CHECK(path.dbl_g == doctest::Approx(n.dbl_g).epsilon(1e-12));
        CHECK(path.lin_g_tilde == doctest::Approx(n.lin_g_tilde).epsilon(1e-12));
        CHECK(path.dbl_g_tilde == doctest::Approx(n.dbl_g_tilde).epsilon(1e-12));
        CHECK(path.dbl_s_tilde == doctest::Approx(n.dbl_s_tilde).epsilon(1e-12));
    }
}

TEST_CASE("estimate vanishes when the payoff does") {
    const MarketParams p;
    const TimeGrid grid(8, 1.0);
    const PathSample path = random_path(p, grid, 3);
    const OptionSpec deep{OptionKind::kAsianCall, 1e6};
    for (auto g : kGreeks) CHECK(mv_estimate(g, deep, p, grid, path) == 0.0);
    CHECK(mv_estimate_complex_delta(p, grid, path, [](double, double) { return 0.0; }) == 0.0);
}

TEST_CASE("complex-Asian delta matches the cubic-cost reference") {
    const MarketParams p;
    const auto call = [](double, double a) { return std::max(a - 100.0, 0.0); };
    const auto mixed = [](double s, double a) { return std::max(0.5 * (s + a) - 95.0, 0.0); };
    for (int d : {4, 9, 32}) {
        const TimeGrid grid(d, 1.0);
        const PathSample zero = simulate_path(p, grid, factorize(build_covariance(grid), Construction::kStd),
                                              std::vector<double>(static_cast<std::size_t>(d), 0.0));
        CHECK(mv_estimate_complex_delta(p, grid, zero, call) ==
              doctest::Approx(naive_complex_delta(p, grid, zero, call)).epsilon(1e-11));
        for (std::uint64_t k = 0; k < 5; ++k) {
            const PathSample path = random_path(p, grid, derive_key(41, k));
            CHECK(mv_estimate_complex_delta(p, grid, path, mixed) ==
                  doctest::Approx(naive_complex_delta(p, grid, path, mixed)).epsilon(1e-10));
        }
    }
}

TEST_CASE("complex-Asian delta rejects a vanishing normalizer") {
    const MarketParams p;
    const TimeGrid grid(2, 1.0);
    PathSample path;
    path.s = {1.0, -1.0};
    path.s_avg = 0.0;
    path.w_tilde = {0.0, 0.0};
    CHECK_THROWS_AS(mv_estimate_complex_delta(p, grid, path, [](double, double) { return 1.0; }), DegenerateWeight);
}

TEST_CASE("complex-Asian delta with an average-only payoff estimates the call delta") {
    const MarketParams p;
    const TimeGrid grid(32, 1.0);
    const auto factor = std::make_shared<const FactorizedCovariance>(factorize(build_covariance(grid), Construction::kStd));
    Integrand complex_delta;
    complex_delta.dim = 32;
    complex_delta.make = [=]() -> SampleFn {
        return [=](std::span<const double> x) {
            const PathSample path = simulate_path(p, grid, *factor, x);
            return mv_estimate_complex_delta(p, grid, path, [](double, double a) { return std::max(a - 100.0, 0.0); });
        };
    };
    const auto a = run_batches(complex_delta, Sampler::kMC, 32, 1024, 71);
    const auto b = run_batches(MethodSpec{Sampler::kMC, Estimator::kMV}, GreekKind::kDelta, {OptionKind::kAsianCall, 100.0},
                               p, grid, 32, 1024, 72);
    CHECK(std::fabs(a.mean - b.mean) <= 4.0 * std::hypot(a.std_err, b.std_err));
}

TEST_CASE("conditional terms") {
    SUBCASE("threshold is zero when the tilde average equals the strike and the drift vanishes") {
        const MarketParams p{100.0, 0.2, 0.02, 1.0};  // omega = 0
        const TimeGrid grid(8, 1.0);
        const PathSample path = simulate_path(p, grid, factorize(build_covariance(grid), Construction::kStd),
                                              std::vector<double>(8, 0.0));
        const auto c = conditional_terms(100.0, p, grid, path);
        CHECK(c.psi == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(c.phi1 == doctest::Approx(0.5));
    }
    SUBCASE("tiny strike pushes the threshold to minus infinity") {
        const MarketParams p;
        const TimeGrid grid(8, 1.0);
        const auto c = conditional_terms(1e-8, p, grid, random_path(p, grid, 5));
        CHECK(c.psi < -50.0);
        CHECK(c.phi1 == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("paper parameters on the zero path") {
        const MarketParams p;
        const TimeGrid grid(64, 1.0);
        const PathSample path = simulate_path(p, grid, factorize(build_covariance(grid), Construction::kStd),
                                              std::vector<double>(64, 0.0));
        double sum = 0.0;
        for (int j = 1; j <= 64; ++j) sum += 100.0 * std::exp(0.08 * (j - 1) / 64.0);
        const double expected = (std::log(100.0) - std::log(sum / 64.0) - 0.08 / 64.0) / (0.2 * std::sqrt(1.0 / 64.0));
        const auto c = conditional_terms(100.0, p, grid, path);
        CHECK(c.psi == doctest::Approx(expected).epsilon(1e-13));
        CHECK(c.phi1 == doctest::Approx(normal_cdf(-expected)).epsilon(1e-14));
        CHECK(c.phi2 == doctest::Approx(normal_cdf(-0.2 / 8.0 - expected)).epsilon(1e-14));
        CHECK(c.phi3 == doctest::Approx(normal_cdf(-0.4 / 8.0 - expected)).epsilon(1e-14));
        CHECK(c.phi2_tilde == doctest::Approx(normal_cdf(0.2 / 8.0 - expected)).epsilon(1e-14));
    }
}

TEST_CASE("closed forms do not depend on x1") {
    const MarketParams p;
    const TimeGrid grid(16, 1.0);
    const PathSample base = random_path(p, grid, 77);
    for (double x1 : {-3.0, -0.5, 0.0, 1.25, 4.0}) {
        PathSample other;
        fill_path(p, grid, x1, base.wbar, other);
        for (auto o : kOptions)
            for (auto g : kGreeks) {
                const OptionSpec option{o, 100.0, 120.0};
                REQUIRE(cmv_estimate(g, option, p, grid, other) == cmv_estimate(g, option, p, grid, base));
            }
    }
}

TEST_CASE("up-and-out closed forms approach the call as the barrier recedes") {
    const MarketParams p;
    const TimeGrid grid(16, 1.0);
    for (std::uint64_t k = 0; k < 10; ++k) {
        const PathSample path = random_path(p, grid, derive_key(83, k));
        for (auto g : kGreeks)
            CHECK(cmv_estimate(g, {OptionKind::kUpAndOutAsianCall, 100.0, 1e9}, p, grid, path) ==
                  doctest::Approx(cmv_estimate(g, {OptionKind::kAsianCall, 100.0}, p, grid, path)).epsilon(1e-9));
    }
}

TEST_CASE("binary delta closed form equals the conditional quadrature at Z = 0") {
    const MarketParams p;
    const TimeGrid grid(8, 1.0);
    const auto factor = factorize(build_covariance(grid), Construction::kStd);
    const std::vector<double> z(7, 0.0);
    const PathSample path = simulate_path(p, grid, factor, std::vector<double>(8, 0.0));
    const OptionSpec binary{OptionKind::kBinaryAsian, 100.0};
    const double closed = cmv_estimate(GreekKind::kDelta, binary, p, grid, path);
    const double q = conditional_quadrature(GreekKind::kDelta, binary, p, grid, factor, z);
    CHECK(closed == doctest::Approx(q).epsilon(1e-8));
}

TEST_CASE("closed forms equal the conditional quadrature for every option and Greek") {
    const MarketParams p;
    for (int d : {4, 8, 16}) {
        const TimeGrid grid(d, 1.0);
        for (auto c : {Construction::kStd, Construction::kPca}) {
            const auto factor = factorize(build_covariance(grid), c);
            for (std::uint64_t k = 0; k < 10; ++k) {
                const auto z = normals(derive_key(89, static_cast<std::uint64_t>(d), k), static_cast<std::size_t>(d - 1));
                std::vector<double> x(1, 0.3);
                x.insert(x.end(), z.begin(), z.end());
                const PathSample path = simulate_path(p, grid, factor, x);
                for (auto o : kOptions)
                    for (auto g : kGreeks) {
                        const OptionSpec option{o, 100.0, 120.0};
                        const double q = conditional_quadrature(g, option, p, grid, factor, z);
                        REQUIRE(std::fabs(cmv_estimate(g, option, p, grid, path) - q) <= 1e-7 * std::fabs(q) + 1e-10);
                    }
            }
        }
    }
}

TEST_CASE("option and greek names parse") {
    for (auto o : kOptions) CHECK(parse_option(to_string(o)) == o);
    for (auto g : kGreeks) CHECK(parse_greek(to_string(g)) == g);
    CHECK_THROWS_AS(parse_option("put"), ConfigError);
    CHECK_THROWS_AS(parse_greek("theta"), ConfigError);
    CHECK_THROWS_AS((OptionSpec{OptionKind::kAsianCall, -5.0}.validate()), DomainError);
    CHECK_THROWS_AS((OptionSpec{OptionKind::kUpAndOutAsianCall, 100.0, 90.0}.validate()), DomainError);
}

}  // TEST_SUITE
