#pragma once

// Covariance of the separated Brownian increments and the path generation
// methods (factorizations A with A A' = Sigma) used to feed them.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>

#include <Eigen/Dense>

namespace asianqmc {

// Equidistant monitoring dates t_j = j T / d, j = 1..d.
struct TimeGrid {
    int d = 0;
    double maturity = 0.0;

    TimeGrid() = default;
    TimeGrid(int d_, double maturity_);

    double dt() const { return maturity / d; }
    double t(int j) const { return j * maturity / d; }  // j in 1..d
};

enum class Construction { kStd, kBrownianBridge, kPca, kGpca };

std::string_view to_string(Construction c);
Construction parse_construction(std::string_view name);

// Pilot run for the gradient-based PCA. `target` receives the (d-1)-vector of
// shifted Brownian values W(t_{j+1}) - W(t_1) and must be smooth enough for
// central differences to be meaningful.
struct GpcaPilot {
    std::function<double(std::span<const double>)> target;
    std::size_t size = 1024;
    double fd_step = 1e-4;
    std::uint64_t seed = 0;
};

class FactorizedCovariance {
public:
    FactorizedCovariance(Construction method, Eigen::MatrixXd a, Eigen::MatrixXd sigma);

    Construction method() const { return method_; }
    const Eigen::MatrixXd& a() const { return a_; }
    const Eigen::MatrixXd& sigma_matrix() const { return sigma_; }
    std::size_t size() const { return static_cast<std::size_t>(a_.rows()); }

    // out = A z. STD uses the random-walk structure of its Cholesky factor.
    void apply(std::span<const double> z, std::span<double> out) const;

    // max |A A' - Sigma|
    double reconstruction_error() const;

private:
    Construction method_;
    Eigen::MatrixXd a_;
    Eigen::MatrixXd sigma_;
    Eigen::VectorXd std_scale_;
};

// (d-1) x (d-1) matrix with entries t_{min(i,j)+1} - t_1. Throws InvalidGrid for d < 2.
Eigen::MatrixXd build_covariance(const TimeGrid& grid);

// Symmetric eigendecomposition with eigenvalues in non-increasing order.
// Equal eigenvalues keep the solver's order; eigenvector signs are fixed so
// the largest-magnitude entry is positive.
struct SortedEigen {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};
SortedEigen sorted_eigen(const Eigen::MatrixXd& symmetric);

// Brownian-bridge factor for arbitrary increasing times tau_1..tau_n.
Eigen::MatrixXd brownian_bridge_factor(std::span<const double> tau);

FactorizedCovariance factorize(const Eigen::MatrixXd& sigma, Construction method,
                               const std::optional<GpcaPilot>& pilot = std::nullopt);

}  // namespace asianqmc
