#include "asianqmc/validate.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "asianqmc/errors.hpp"
#include "asianqmc/oracle.hpp"

namespace asianqmc {

namespace {

std::string fmt(const char* format, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

template <typename F>
CheckResult timed(std::string name, F&& body) {
    CheckResult result;
    result.name = std::move(name);
    const auto start = std::chrono::steady_clock::now();
    try {
        body(result);
    } catch (const std::exception& e) {
        result.passed = false;
        result.detail = std::string("error: ") + e.what();
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

constexpr OptionKind kOptions[] = {OptionKind::kBinaryAsian, OptionKind::kAsianCall, OptionKind::kUpAndOutAsianCall};
constexpr GreekKind kGreeks[] = {GreekKind::kDelta, GreekKind::kGamma, GreekKind::kVega};

OptionSpec option_at_100(OptionKind kind) { return {kind, 100.0, 120.0}; }

std::vector<double> normal_draw(std::uint64_t key, std::size_t n) {
    const CounterRng rng(key);
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_normal_cdf(CounterRng::to_unit(rng.at(i)));
    return z;
}

std::string pair_name(OptionKind o, GreekKind g) { return std::string(to_string(o)) + "/" + std::string(to_string(g)); }

}  // namespace

CheckResult check_sobol_stratification(const SobolDirections& directions, std::size_t dims, std::size_t n) {
    return timed("sobol-stratification", [&](CheckResult& r) {
        if (!std::has_single_bit(n)) throw ConfigError("stratification check needs a power-of-two n");
        const int shift = kSobolBits - std::countr_zero(n);
        const SobolDigits base = generate_sobol_digits(dims, n, directions);
        const DigitalScramble scramble(dims, {0x5eedULL, 0});
        std::vector<std::size_t> bad;
        std::vector<char> seen(n), seen_scrambled(n);
        for (std::size_t j = 0; j < dims; ++j) {
            std::fill(seen.begin(), seen.end(), 0);
            std::fill(seen_scrambled.begin(), seen_scrambled.end(), 0);
            bool ok = true;
            for (std::size_t i = 0; i < n; ++i) {
                const std::uint32_t digits = base.bits[i * dims + j];
                ok &= !std::exchange(seen[digits >> shift], 1);
                ok &= !std::exchange(seen_scrambled[scramble.apply(digits, j) >> shift], 1);
            }
            if (!ok) bad.push_back(j);
        }
        r.passed = bad.empty();
        std::ostringstream os;
        os << dims << " coordinates, n = " << n;
        if (!bad.empty()) {
            os << "; one-point-per-interval fails in coordinate(s)";
            for (std::size_t i = 0; i < std::min<std::size_t>(bad.size(), 8); ++i) os << ' ' << bad[i];
        }
        r.detail = os.str();
    });
}

CheckResult check_inverse_normal() {
    return timed("inverse-normal", [](CheckResult& r) {
        struct Ref {
            double u, x;
        };
        // Reference quantiles computed in 40-digit arithmetic.
        constexpr Ref refs[] = {{0.975, 1.9599639845400542}, {0.1, -1.2815515655446005},
                                {1e-10, -6.3613409024040562}, {0.999, 3.0902323061678135},
                                {1e-300, -37.047096299361199}, {0.75, 0.67448975019608174}};
        double worst = 0.0;
        for (const auto& ref : refs) worst = std::max(worst, std::fabs(inv_normal_cdf(ref.u) - ref.x) / std::fabs(ref.x));
        bool monotone = true, antisymmetric = true;
        double prev = -INFINITY;
        constexpr int n = 100000;
        for (int i = 1; i < n; ++i) {
            const double u = static_cast<double>(i) / n;
            const double x = inv_normal_cdf(u);
            monotone &= x > prev;
            prev = x;
            antisymmetric &= std::fabs(x + inv_normal_cdf(1.0 - u)) <= 1e-12 * std::max(1.0, std::fabs(x));
        }
        r.passed = worst <= 1e-14 && monotone && antisymmetric && inv_normal_cdf(0.5) == 0.0;
        r.detail = fmt("max relative error %.2e at reference quantiles; monotone %s; antisymmetric %s", worst,
                       monotone ? "yes" : "no", antisymmetric ? "yes" : "no");
    });
}

CheckResult check_factorizations(std::span<const int> dims, double rel_tol) {
    return timed("factorization", [&](CheckResult& r) {
        double worst = 0.0;
        std::string worst_at = "-";
        for (int d : dims) {
            const TimeGrid grid(d, 1.0);
            const Eigen::MatrixXd sigma = build_covariance(grid);
            const double scale = sigma.cwiseAbs().maxCoeff();
            for (auto method : {Construction::kStd, Construction::kBrownianBridge, Construction::kPca,
                                Construction::kGpca}) {
                std::optional<GpcaPilot> pilot;
                if (method == Construction::kGpca)
                    pilot = GpcaPilot{[](std::span<const double> w) {
                                          double s = 0.0;
                                          for (double v : w) s += std::exp(0.2 * v);
                                          return std::max(s / static_cast<double>(w.size()) - 0.9, 0.0);
                                      },
                                      256, 1e-4, 7};
                const double err = factorize(sigma, method, pilot).reconstruction_error() / scale;
                if (err > worst) {
                    worst = err;
                    worst_at = std::string(to_string(method)) + " d=" + std::to_string(d);
                }
            }
        }
        r.passed = worst <= rel_tol;
        r.detail = fmt("max |AA'-Sigma|/max|Sigma| = %.2e (%s), limit %.0e", worst, worst_at.c_str(), rel_tol);
    });
}

CheckResult check_quadrature_equivalence(int d, int z_draws, std::uint64_t seed, double rel_tol, double abs_floor) {
    return timed("quadrature-equivalence-d" + std::to_string(d), [&](CheckResult& r) {
        const MarketParams params;
        const TimeGrid grid(d, params.maturity);
        const FactorizedCovariance factor = factorize(build_covariance(grid), Construction::kStd);
        double worst = 0.0;  // |cmv - q| / (rel_tol |q| + abs_floor)
        std::string worst_at = "-";
        for (int k = 0; k < z_draws; ++k) {
            std::vector<double> x(static_cast<std::size_t>(d), 0.0);
            const auto z = normal_draw(derive_key(seed, static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(k)),
                                       static_cast<std::size_t>(d - 1));
            std::copy(z.begin(), z.end(), x.begin() + 1);
            const PathSample path = simulate_path(params, grid, factor, x);
            for (auto o : kOptions)
                for (auto g : kGreeks) {
                    const OptionSpec option = option_at_100(o);
                    const double c = cmv_estimate(g, option, params, grid, path);
                    const double q = conditional_quadrature(g, option, params, grid, factor, z);
                    const double ratio = std::fabs(c - q) / (rel_tol * std::fabs(q) + abs_floor);
                    if (ratio > worst) {
                        worst = ratio;
                        worst_at = pair_name(o, g) + fmt(" draw %d (cmv %.12g, quadrature %.12g)", k, c, q);
                    }
                }
        }
        r.passed = worst <= 1.0;
        r.detail = fmt("%d draws x 9 pairs; worst error at %.3f of tolerance: ", z_draws, worst) + worst_at;
    });
}

CheckResult check_quadrature_self_consistency(int d, std::uint64_t seed) {
    return timed("quadrature-self-consistency-d" + std::to_string(d), [&](CheckResult& r) {
        const MarketParams params;
        const TimeGrid grid(d, params.maturity);
        const FactorizedCovariance factor = factorize(build_covariance(grid), Construction::kStd);
        const auto z = normal_draw(derive_key(seed, 0xc0ffeeULL), static_cast<std::size_t>(d - 1));
        QuadratureSpec loose, tight;
        tight.abs_tol = 1e-12;
        double worst = 0.0;
        for (auto o : kOptions)
            for (auto g : kGreeks) {
                const OptionSpec option = option_at_100(o);
                worst = std::max(worst, std::fabs(conditional_quadrature(g, option, params, grid, factor, z, loose) -
                                                  conditional_quadrature(g, option, params, grid, factor, z, tight)));
            }
        r.passed = worst <= 1e-9;
        r.detail = fmt("max |q(1e-10) - q(1e-12)| = %.2e, limit 1e-9", worst);
    });
}

CheckResult check_conditioning_consistency(int d, int m, int n, std::uint64_t seed, int workers, double z_max) {
    return timed("conditioning-consistency", [&](CheckResult& r) {
        const MarketParams params;
        const TimeGrid grid(d, params.maturity);
        RunOptions options;
        options.workers = workers;
        const MethodSpec mv{Sampler::kMC, Estimator::kMV}, cmv{Sampler::kMC, Estimator::kCMV};
        double worst = 0.0;
        std::string worst_at = "-";
        for (auto o : kOptions)
            for (auto g : kGreeks) {
                const OptionSpec option = option_at_100(o);
                const auto a = run_batches(mv, g, option, params, grid, m, n, derive_key(seed, 1, static_cast<std::uint64_t>(o) * 3 + static_cast<std::uint64_t>(g)), options);
                const auto b = run_batches(cmv, g, option, params, grid, m, n, derive_key(seed, 2, static_cast<std::uint64_t>(o) * 3 + static_cast<std::uint64_t>(g)), options);
                const double z = std::fabs(a.mean - b.mean) / std::hypot(a.std_err, b.std_err);
                if (z > worst) {
                    worst = z;
                    worst_at = pair_name(o, g) + fmt(" (MV %.6g, CMV %.6g)", a.mean, b.mean);
                }
            }
        r.passed = worst <= z_max;
        r.detail = fmt("d=%d M=%d N=%d; max |MV-CMV|/SE = %.2f (limit %.1f) at ", d, m, n, worst, z_max) + worst_at;
    });
}

CheckResult check_fd_agreement(OptionKind kind, int d, int m, int n, std::uint64_t seed, double bump, double z_max,
                               int workers) {
    return timed("fd-agreement-" + std::string(to_string(kind)), [&](CheckResult& r) {
        const MarketParams params;
        const TimeGrid grid(d, params.maturity);
        const OptionSpec option = option_at_100(kind);
        RunOptions options;
        options.workers = workers;
        const auto mv = run_batches(MethodSpec{Sampler::kMC, Estimator::kMV}, GreekKind::kDelta, option, params, grid,
                                    m, n, derive_key(seed, 1), options);
        const auto fd = finite_difference_greek(GreekKind::kDelta, option, params, grid, m * n, derive_key(seed, 2), bump);
        const double z = std::fabs(mv.mean - fd.value) / std::hypot(mv.std_err, fd.std_err);
        r.passed = z <= z_max;
        r.detail = fmt("delta MV %.6g +- %.2g, FD %.6g +- %.2g, bump %.2g; |diff|/SE = %.2f (limit %.1f)", mv.mean,
                       mv.std_err, fd.value, fd.std_err, bump, z, z_max);
    });
}

ScanVerdict judge_convergence(std::span<const GreekEstimate> scan, double z_final) {
    ScanVerdict v;
    for (std::size_t k = 1; k < scan.size(); ++k) {
        v.gaps.push_back(std::fabs(scan[k].mean - scan[k - 1].mean));
        v.gap_se.push_back(std::hypot(scan[k].std_err, scan[k - 1].std_err));
    }
    v.gaps_shrink = true;
    for (std::size_t k = 1; k < v.gaps.size(); ++k)
        v.gaps_shrink &= v.gaps[k] <= v.gaps[k - 1] + 2.0 * std::hypot(v.gap_se[k], v.gap_se[k - 1]);
    v.final_gap_ok = !v.gaps.empty() && v.gaps.back() < z_final * v.gap_se.back();
    return v;
}

CheckResult check_convergence_scan(std::span<const int> d_list, int m, int n, std::uint64_t seed, int workers) {
    return timed("convergence-scan", [&](CheckResult& r) {
        RunOptions options;
        options.workers = workers;
        const auto scan = convergence_scan(GreekKind::kDelta, option_at_100(OptionKind::kAsianCall), MarketParams{},
                                           MethodSpec{Sampler::kMC, Estimator::kMV}, d_list, m, n, seed, options);
        const ScanVerdict v = judge_convergence(scan);
        r.passed = v.gaps_shrink && v.final_gap_ok;
        std::ostringstream os;
        os << "call delta (MC-MV) gaps:";
        for (std::size_t k = 0; k < v.gaps.size(); ++k)
            os << fmt(" d%d->%d %.2e (SE %.1e)", d_list[k], d_list[k + 1], v.gaps[k], v.gap_se[k]);
        os << (v.gaps_shrink ? "; shrinking" : "; NOT shrinking") << (v.final_gap_ok ? "" : "; final gap too large");
        r.detail = os.str();
    });
}

std::vector<CheckResult> run_validation(ValidationLevel level, const SobolDirections& directions, int workers,
                                        const std::function<void(const CheckResult&)>& on_check) {
    std::vector<CheckResult> results;
    auto record = [&](CheckResult r) {
        if (on_check) on_check(r);
        results.push_back(std::move(r));
    };
    constexpr std::uint64_t seed = 20240101;
    const int factor_dims[] = {2, 4, 16, 64, 128, 256};
    record(check_sobol_stratification(directions, std::min<std::size_t>(1024, directions.max_dim()), 1024));
    record(check_inverse_normal());
    record(check_factorizations(factor_dims));
    record(check_quadrature_equivalence(4, 20, seed));
    record(check_quadrature_equivalence(8, 20, seed));
    record(check_quadrature_self_consistency(8, seed));
    if (level == ValidationLevel::kFull) {
        record(check_quadrature_equivalence(16, 100, seed));
        record(check_conditioning_consistency(64, 50, 1 << 14, seed, workers));
        record(check_fd_agreement(OptionKind::kAsianCall, 64, 32, 1 << 10, seed, 0.1, 4.0, workers));
        record(check_fd_agreement(OptionKind::kBinaryAsian, 64, 32, 1 << 10, seed, 0.1, 6.0, workers));
        const int d_list[] = {8, 16, 32, 64, 128};
        record(check_convergence_scan(d_list, 50, 1 << 13, seed, workers));
    }
    return results;
}

}  // namespace asianqmc
