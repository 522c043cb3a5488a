#pragma once

#include "fucik/eigen_basis.hpp"
#include "fucik/quadrature.hpp"

#include <Eigen/Dense>

namespace fucik {

/// Value, nodal gradient and generalised nodal Hessian of the non-quadratic part
/// P of a functional  Phi(u) = 1/2 c^T Lambda c + P(u).
struct PotentialEval {
    double value = 0.0;
    Eigen::VectorXd gradient;
    Tridiagonal hessian;
};

class Potential {
public:
    virtual ~Potential() = default;
    /// order 0 fills value, 1 adds gradient, 2 adds hessian.
    virtual PotentialEval evaluate(const Eigen::VectorXd& nodal, int order) const = 0;
};

/// P(u) = -1/2 (alpha int (u+)^2 + beta int (u-)^2) on the sample grid. At samples
/// where u = 0 the generalised Hessian takes the alpha branch.
class JumpingPotential : public Potential {
public:
    JumpingPotential(const SampleGrid& grid, double alpha, double beta)
        : grid_(&grid), alpha_(alpha), beta_(beta) {}

    PotentialEval evaluate(const Eigen::VectorXd& nodal, int order) const override;
    /// Contribution of an already sampled field, added into out.
    void accumulate(const Eigen::VectorXd& samples, int order, PotentialEval& out) const;

private:
    const SampleGrid* grid_;
    double alpha_;
    double beta_;
};

/// q+(u) = int (u+)^2 and q-(u) = int (u-)^2 on the sample grid.
std::pair<double, double> sign_masses(const SampleGrid& grid, const Eigen::VectorXd& nodal);

/// A point of the functional with all coefficients and derived quantities.
struct Evaluated {
    Eigen::VectorXd coeffs;
    Eigen::VectorXd nodal;
    double value = 0.0;
    Eigen::VectorXd gradient; ///< in coefficients
    Tridiagonal curvature;    ///< potential Hessian (order 2 only)
};

Evaluated evaluate_functional(const EigenBasis& basis, const Potential& p, Eigen::VectorXd coeffs, int order);

/// Full generalised Hessian Lambda + Phi^T T Phi split into X1/X2 blocks.
struct HessianBlocks {
    Eigen::MatrixXd h11;
    Eigen::MatrixXd h21;
    Eigen::MatrixXd h22;
};
HessianBlocks hessian_blocks(const EigenBasis& basis, const Tridiagonal& curvature);
Eigen::MatrixXd full_hessian(const EigenBasis& basis, const Tridiagonal& curvature);

/// Result of maximising Phi(x + v) over x in X1 for fixed v in X2.
struct X1Maximum {
    Evaluated point;
    int iterations = 0;
    double residual = 0.0; ///< |P1 grad|
    /// min over iterate pairs of -<g(x2)-g(x1), x2-x1> / |x2-x1|_A^2; +inf if no pair.
    double delta_eff = 0.0;
};

/// Damped semismooth Newton on the k-dimensional problem, with a shifted step when
/// the generalised Hessian is not negative definite.
/// v_coeffs has length N - k. Throws MaxIterations.
X1Maximum maximize_x1(const EigenBasis& basis, const Potential& p, const Eigen::VectorXd& v_coeffs,
                      double tol_grad, const Eigen::VectorXd* warm_start = nullptr, int max_iter = 200);

} // namespace fucik
