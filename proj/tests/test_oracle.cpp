#include <doctest.h>

#include <cmath>
#include <numbers>

#include "asianqmc/errors.hpp"
#include "asianqmc/oracle.hpp"

using namespace asianqmc;

TEST_SUITE("oracle") {

TEST_CASE("normal expectations of constants") {
    CHECK(normal_expectation([](double) { return 1.0; }, {}) == doctest::Approx(1.0).epsilon(1e-13));
    QuadratureSpec half;
    half.lower = 0.0;
    CHECK(normal_expectation([](double) { return 1.0; }, half) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(normal_expectation([](double x) { return x * x; }, {}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Gauss-Kronrod integrates smooth and kinked functions") {
    CHECK(gauss_kronrod([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-12, 100).value ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(gauss_kronrod([](double x) { return std::fabs(x - 0.3); }, 0.0, 1.0, 1e-12, 200).value ==
          doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-12));
}

TEST_CASE("quadrature that cannot converge fails loudly") {
    CHECK_THROWS_AS(gauss_kronrod([](double x) { return std::sin(1e4 * x) / (x + 1e-9); }, 0.0, 1.0, 1e-14, 3),
                    OracleFailure);
}

TEST_CASE("central differences are exact on affine pricers") {
    const MarketParams p;
    const PathPricer linear = [](const MarketParams& m, std::span<const double> x) { return 3.0 * m.s0 + x[0]; };
    const auto delta = finite_difference(GreekKind::kDelta, linear, p, 1, 100, 1, 0.1);
    CHECK(std::fabs(delta.value - 3.0) < 1e-10);
    CHECK(delta.std_err < 1e-10);
    const auto gamma = finite_difference(GreekKind::kGamma, linear, p, 1, 100, 1, 0.1);
    CHECK(std::fabs(gamma.value) < 1e-8);
    const PathPricer in_sigma = [](const MarketParams& m, std::span<const double>) { return 5.0 * m.sigma; };
    CHECK(std::fabs(finite_difference(GreekKind::kVega, in_sigma, p, 1, 10, 1, 0.01).value - 5.0) < 1e-10);
}

TEST_CASE("quadrature tolerances agree") {
    const MarketParams p;
    const TimeGrid grid(8, 1.0);
    const auto factor = factorize(build_covariance(grid), Construction::kStd);
    const std::vector<double> z = {0.3, -1.2, 0.8, 0.0, 2.1, -0.4, 0.9};
    QuadratureSpec tight;
    tight.abs_tol = 1e-12;
    for (auto o : {OptionKind::kBinaryAsian, OptionKind::kAsianCall, OptionKind::kUpAndOutAsianCall})
        for (auto g : {GreekKind::kDelta, GreekKind::kGamma, GreekKind::kVega}) {
            const OptionSpec option{o, 100.0, 120.0};
            CHECK(std::fabs(conditional_quadrature(g, option, p, grid, factor, z) -
                            conditional_quadrature(g, option, p, grid, factor, z, tight)) <= 1e-9);
        }
}

TEST_CASE("finite-difference gamma of the call settles as the bump shrinks") {
    const MarketParams p;
    const TimeGrid grid(16, 1.0);
    const OptionSpec call{OptionKind::kAsianCall, 100.0};
    const auto g10 = finite_difference_greek(GreekKind::kGamma, call, p, grid, 1 << 15, 5, 1.0);
    const auto g05 = finite_difference_greek(GreekKind::kGamma, call, p, grid, 1 << 15, 5, 0.5);
    const auto g01 = finite_difference_greek(GreekKind::kGamma, call, p, grid, 1 << 15, 5, 0.1);
    // Bias shrinks quadratically while the noise grows like 1/bump.
    CHECK(std::fabs(g10.value - g05.value) <= 4.0 * std::hypot(g10.std_err, g05.std_err) + 1e-3);
    CHECK(std::fabs(g05.value - g01.value) <= 4.0 * std::hypot(g05.std_err, g01.std_err));
    CHECK(g01.std_err > g05.std_err);
}

}  // TEST_SUITE
