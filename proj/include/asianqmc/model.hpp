#pragma once

// Discretized Black-Scholes paths built from X = (X1, Z) with the X1 / Z
// variable separation, plus the path functionals the estimators consume.

#include <span>
#include <vector>

#include "asianqmc/pathgen.hpp"

namespace asianqmc {

struct MarketParams {
    double s0 = 100.0;
    double sigma = 0.2;
    double r = 0.1;
    double maturity = 1.0;

    double omega() const { return r - 0.5 * sigma * sigma; }
    void validate() const;  // throws DomainError
};

struct PathSample {
    double x1 = 0.0;
    std::vector<double> z;        // d-1 normals
    std::vector<double> wbar;     // A z: W(t_{j+1}) - W(t_1), j = 1..d-1
    std::vector<double> w_tilde;  // W(t_j), j = 1..d
    std::vector<double> s;        // S_j
    std::vector<double> s_tilde;  // S_j with the X1 factor removed
    double s_avg = 0.0;
    double s_tilde_avg = 0.0;
    double lin_g = 0.0;        // (T/d) sum_j S_j (W_j - sigma t_j)
    double dbl_g = 0.0;        // (T/d)^2 sum_{i<=j} S_i S_j (W_j - sigma t_j)
    double lin_g_tilde = 0.0;  // same with S~ and A_{j-1} Z
    double dbl_g_tilde = 0.0;
    double dbl_s_tilde = 0.0;  // (T/d)^2 sum_{i<=j} S~_i S~_j

    int d() const { return static_cast<int>(s.size()); }
    double s_last() const { return s.back(); }
    double s_tilde_last() const { return s_tilde.back(); }
};

// Which half of the separated functionals to fill. The estimators only need
// one of them on the hot path; kFull is the documented contract.
enum class PathFields { kFull, kSpot, kTilde };

// x = (x1, z_1, ..., z_{d-1}). Throws ShapeError on dimension mismatch.
PathSample simulate_path(const MarketParams& params, const TimeGrid& grid, const FactorizedCovariance& factor,
                         std::span<const double> x);

// Same as simulate_path but reuses `out` and takes the already factorized
// increments wbar = A z.
void fill_path(const MarketParams& params, const TimeGrid& grid, double x1, std::span<const double> wbar,
               PathSample& out, PathFields fields = PathFields::kFull);

}  // namespace asianqmc
