#pragma once

#include "fucik/operator.hpp"

#include <Eigen/Dense>

namespace fucik {

/// Symmetric tridiagonal matrix in the interior nodal basis.
struct Tridiagonal {
    Eigen::VectorXd diag;
    Eigen::VectorXd off; ///< off(i) couples i and i+1

    explicit Tridiagonal(Eigen::Index n = 0) : diag(Eigen::VectorXd::Zero(n)), off(Eigen::VectorXd::Zero(n > 0 ? n - 1 : 0)) {}

    Eigen::Index size() const { return diag.size(); }
    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
    Eigen::MatrixXd dense() const;
    Tridiagonal& operator+=(const Tridiagonal& other);
    Tridiagonal& operator*=(double factor);
};

/// Five equispaced points per element (composite Simpson, four panels). Used for
/// every integral of a nonlinear function of a piecewise-linear field: u+, u-,
/// F(u), f(u). Exact for cubics on each element, so it reproduces the mass
/// matrix for products of hat functions.
class SampleGrid {
public:
    static constexpr int points_per_element = 5;

    explicit SampleGrid(const Mesh1D& mesh);

    Eigen::Index size() const { return positions_.size(); }
    const Eigen::VectorXd& positions() const { return positions_; }
    const Eigen::VectorXd& weights() const { return weights_; }

    /// Values of the piecewise-linear interpolant of interior nodal values.
    Eigen::VectorXd sample(const Eigen::VectorXd& nodal) const;
    double integrate(const Eigen::VectorXd& values) const { return weights_.dot(values); }
    /// g_i = sum_p w_p values_p psi_i(x_p): the discrete  int g phi_i.
    Eigen::VectorXd project(const Eigen::VectorXd& values) const;
    /// T_ij = sum_p w_p rho_p psi_i(x_p) psi_j(x_p).
    Tridiagonal weighted_mass(const Eigen::VectorXd& rho) const;

private:
    int n_elements_;
    Eigen::VectorXd positions_;
    Eigen::VectorXd weights_;
};

} // namespace fucik
