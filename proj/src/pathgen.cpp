#include "asianqmc/pathgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "asianqmc/errors.hpp"
#include "asianqmc/lowdisc.hpp"

namespace asianqmc {

TimeGrid::TimeGrid(int d_, double maturity_) : d(d_), maturity(maturity_) {
    if (d < 1) throw InvalidGrid("time grid needs at least one date");
    if (!(maturity > 0.0)) throw InvalidGrid("maturity must be positive");
}

std::string_view to_string(Construction c) {
    switch (c) {
        case Construction::kStd: return "std";
        case Construction::kBrownianBridge: return "bb";
        case Construction::kPca: return "pca";
        case Construction::kGpca: return "gpca";
    }
    return "?";
}

Construction parse_construction(std::string_view name) {
    if (name == "std") return Construction::kStd;
    if (name == "bb") return Construction::kBrownianBridge;
    if (name == "pca") return Construction::kPca;
    if (name == "gpca") return Construction::kGpca;
    throw ConfigError("unknown path construction '" + std::string(name) + "'");
}

FactorizedCovariance::FactorizedCovariance(Construction method, Eigen::MatrixXd a, Eigen::MatrixXd sigma)
    : method_(method), a_(std::move(a)), sigma_(std::move(sigma)) {
    if (a_.rows() != a_.cols() || a_.rows() != sigma_.rows() || sigma_.rows() != sigma_.cols())
        throw ShapeError("factor and covariance must be square matrices of equal size");
    if (method_ == Construction::kStd) std_scale_ = a_.diagonal();
}

void FactorizedCovariance::apply(std::span<const double> z, std::span<double> out) const {
    const auto n = static_cast<Eigen::Index>(size());
    if (static_cast<Eigen::Index>(z.size()) != n || static_cast<Eigen::Index>(out.size()) != n)
        throw ShapeError("factor apply: dimension mismatch");
    if (method_ == Construction::kStd) {
        // Cholesky factor of a Brownian covariance: column j is constant below the diagonal.
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            acc += std_scale_[i] * z[i];
            out[i] = acc;
        }
        return;
    }
    Eigen::Map<const Eigen::VectorXd> zv(z.data(), n);
    Eigen::Map<Eigen::VectorXd> ov(out.data(), n);
    ov.noalias() = a_ * zv;
}

double FactorizedCovariance::reconstruction_error() const {
    return (a_ * a_.transpose() - sigma_).cwiseAbs().maxCoeff();
}

Eigen::MatrixXd build_covariance(const TimeGrid& grid) {
    if (grid.d < 2) throw InvalidGrid("covariance of separated increments needs d >= 2");
    const int n = grid.d - 1;
    Eigen::MatrixXd sigma(n, n);
    const double t1 = grid.t(1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) sigma(i, j) = grid.t(std::min(i, j) + 2) - t1;
    return sigma;
}

SortedEigen sorted_eigen(const Eigen::MatrixXd& symmetric) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric);
    if (solver.info() != Eigen::Success) throw FactorizationError("eigendecomposition did not converge");
    const auto n = symmetric.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    // Solver output is ascending; reverse it, then stable-sort so ties keep that order.
    std::reverse(order.begin(), order.end());
    const auto& ev = solver.eigenvalues();
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return ev[a] > ev[b]; });

    SortedEigen out{Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values[k] = ev[order[k]];
        Eigen::VectorXd v = solver.eigenvectors().col(order[k]);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v[arg] < 0.0) v = -v;
        out.vectors.col(k) = v;
    }
    return out;
}

Eigen::MatrixXd brownian_bridge_factor(std::span<const double> tau) {
    const auto n = tau.size();
    std::vector<std::size_t> bridge(n), left(n), right(n), filled(n, 0);
    std::vector<double> lw(n, 0.0), rw(n, 0.0), sd(n, 0.0);
    filled[n - 1] = 1;
    bridge[0] = n - 1;
    sd[0] = std::sqrt(tau[n - 1]);
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        while (filled[j]) ++j;
        std::size_t k = j;
        while (!filled[k]) ++k;
        const std::size_t l = j + (k - 1 - j) / 2;
        filled[l] = i;
        bridge[i] = l;
        left[i] = j;
        right[i] = k;
        const double t_left = j == 0 ? 0.0 : tau[j - 1];
        const double span = tau[k] - t_left;
        lw[i] = (tau[k] - tau[l]) / span;
        rw[i] = (tau[l] - t_left) / span;
        sd[i] = std::sqrt((tau[l] - t_left) * (tau[k] - tau[l]) / span);
        j = k + 1;
        if (j >= n) j = 0;
    }
    const auto ni = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(ni, ni);
    std::vector<double> path(n);
    for (std::size_t col = 0; col < n; ++col) {
        // The bridge is linear in z, so column col is the image of the unit vector e_col.
        auto z = [&](std::size_t i) { return i == col ? 1.0 : 0.0; };
        path[n - 1] = sd[0] * z(0);
        for (std::size_t i = 1; i < n; ++i) {
            const double from_left = left[i] == 0 ? 0.0 : lw[i] * path[left[i] - 1];
            path[bridge[i]] = from_left + rw[i] * path[right[i]] + sd[i] * z(i);
        }
        for (std::size_t r = 0; r < n; ++r) a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) = path[r];
    }
    return a;
}

namespace {

Eigen::MatrixXd pca_factor(const Eigen::MatrixXd& sigma) {
    const SortedEigen eig = sorted_eigen(sigma);
    if (eig.values.minCoeff() <= 0.0) throw FactorizationError("covariance matrix is not positive definite");
    return eig.vectors * eig.values.cwiseSqrt().asDiagonal();
}

Eigen::MatrixXd gpca_rotation(const Eigen::MatrixXd& a_pca, const GpcaPilot& pilot) {
    const auto n = a_pca.rows();
    const auto dim = static_cast<std::size_t>(n);
    const PointSet base = generate_sobol(dim, pilot.size);
    const PointSet u = randomize(base, {pilot.seed, 0});

    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd z(n), w(n), grad(n);
    Eigen::VectorXd plus(n), minus(n);
    const double h = pilot.fd_step;
    for (std::size_t p = 0; p < pilot.size; ++p) {
        for (Eigen::Index k = 0; k < n; ++k) z[k] = inv_normal_cdf(u(p, static_cast<std::size_t>(k)));
        w.noalias() = a_pca * z;
        for (Eigen::Index k = 0; k < n; ++k) {
            plus = w + h * a_pca.col(k);
            minus = w - h * a_pca.col(k);
            grad[k] = (pilot.target({plus.data(), dim}) - pilot.target({minus.data(), dim})) / (2.0 * h);
        }
        b.noalias() += grad * grad.transpose();
    }
    b /= static_cast<double>(pilot.size);
    return sorted_eigen(b).vectors;
}

}  // namespace

FactorizedCovariance factorize(const Eigen::MatrixXd& sigma, Construction method,
                               const std::optional<GpcaPilot>& pilot) {
    if (sigma.rows() != sigma.cols() || sigma.rows() == 0) throw ShapeError("covariance must be square and non-empty");
    if (!sigma.isApprox(sigma.transpose(), 1e-14)) throw FactorizationError("covariance matrix is not symmetric");
    switch (method) {
        case Construction::kStd: {
            Eigen::LLT<Eigen::MatrixXd> llt(sigma);
            if (llt.info() != Eigen::Success) throw FactorizationError("covariance matrix is not positive definite");
            return {method, llt.matrixL(), sigma};
        }
        case Construction::kBrownianBridge: {
            // Valid for Brownian covariances: Sigma_ij = tau_min(i,j).
            std::vector<double> tau(static_cast<std::size_t>(sigma.rows()));
            for (Eigen::Index i = 0; i < sigma.rows(); ++i) tau[static_cast<std::size_t>(i)] = sigma(i, i);
            for (std::size_t i = 0; i < tau.size(); ++i)
                if (tau[i] <= (i == 0 ? 0.0 : tau[i - 1])) throw FactorizationError("Brownian bridge needs increasing times");
            return {method, brownian_bridge_factor(tau), sigma};
        }
        case Construction::kPca:
            return {method, pca_factor(sigma), sigma};
        case Construction::kGpca: {
            if (!pilot || !pilot->target) throw MissingPilot("GPCA construction requires a pilot target");
            if (pilot->size == 0 || !(pilot->fd_step > 0.0)) throw MissingPilot("GPCA pilot needs a positive size and step");
            const Eigen::MatrixXd a_pca = pca_factor(sigma);
            return {method, a_pca * gpca_rotation(a_pca, *pilot), sigma};
        }
    }
    throw FactorizationError("unknown construction");
}

}  // namespace asianqmc
