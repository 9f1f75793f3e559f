#include "asianqmc/model.hpp"

#include <cmath>

#include "asianqmc/errors.hpp"

namespace asianqmc {

void MarketParams::validate() const {
    if (!(s0 > 0.0)) throw DomainError("spot must be positive");
    if (!(sigma > 0.0)) throw DomainError("volatility must be positive");
    if (!(maturity > 0.0)) throw DomainError("maturity must be positive");
    if (!std::isfinite(r)) throw DomainError("rate must be finite");
}

PathSample simulate_path(const MarketParams& params, const TimeGrid& grid, const FactorizedCovariance& factor,
                         std::span<const double> x) {
    if (grid.d < 2 || x.size() != static_cast<std::size_t>(grid.d) || factor.size() != x.size() - 1)
        throw ShapeError("simulate_path: x must have d entries and the factor d-1 rows");
    PathSample out;
    out.z.assign(x.begin() + 1, x.end());
    std::vector<double> wbar(factor.size());
    factor.apply(out.z, wbar);
    fill_path(params, grid, x[0], wbar, out);
    return out;
}

void fill_path(const MarketParams& params, const TimeGrid& grid, double x1, std::span<const double> wbar,
               PathSample& out, PathFields fields) {
    const int d = grid.d;
    if (wbar.size() != static_cast<std::size_t>(d - 1)) throw ShapeError("fill_path: wbar must have d-1 entries");
    const double t1 = grid.t(1);
    const double sqrt_t1 = std::sqrt(t1);
    const double omega = params.omega();
    const double sigma = params.sigma;
    const double dt = grid.dt();
    const auto ud = static_cast<std::size_t>(d);

    out.x1 = x1;
    out.wbar.assign(wbar.begin(), wbar.end());
    out.w_tilde.resize(ud);
    out.s.resize(ud);
    out.s_tilde.resize(ud);

    const bool spot = fields != PathFields::kTilde;
    const bool tilde = fields != PathFields::kSpot;

    double sum_s = 0.0, lin = 0.0, dbl = 0.0, prefix = 0.0;
    double sum_st = 0.0, lin_t = 0.0, dbl_t = 0.0, dbl_st = 0.0, prefix_t = 0.0;
    for (int j = 1; j <= d; ++j) {
        const auto k = static_cast<std::size_t>(j - 1);
        const double tj = grid.t(j);
        const double az = j == 1 ? 0.0 : wbar[k - 1];
        const double w = sqrt_t1 * x1 + az;
        out.w_tilde[k] = w;
        if (spot) {
            const double sj = params.s0 * std::exp(omega * tj + sigma * w);
            out.s[k] = sj;
            sum_s += sj;
            prefix += sj;
            const double g = w - sigma * tj;
            lin += sj * g;
            // sum_{i<=j} S_i S_j g_j accumulated through the running prefix sum.
            dbl += g * sj * prefix;
        }
        if (tilde) {
            const double st = params.s0 * std::exp(omega * (tj - t1) + sigma * az);
            out.s_tilde[k] = st;
            sum_st += st;
            prefix_t += st;
            const double g = az - sigma * tj;
            lin_t += st * g;
            dbl_t += g * st * prefix_t;
            dbl_st += st * prefix_t;
        }
    }
    out.s_avg = sum_s / d;
    out.lin_g = dt * lin;
    out.dbl_g = dt * dt * dbl;
    out.s_tilde_avg = sum_st / d;
    out.lin_g_tilde = dt * lin_t;
    out.dbl_g_tilde = dt * dt * dbl_t;
    out.dbl_s_tilde = dt * dt * dbl_st;
}

}  // namespace asianqmc
