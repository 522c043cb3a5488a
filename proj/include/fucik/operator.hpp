#pragma once

#include "fucik/kernel.hpp"

#include <Eigen/Dense>

namespace fucik {

/// Uniform partition of (a, b). Interior nodes 1..n_elements-1 carry the unknowns;
/// the end nodes are pinned to zero by the exterior Dirichlet condition.
class Mesh1D {
public:
    Mesh1D(double a, double b, int n_elements);

    double a() const { return a_; }
    double b() const { return b_; }
    int n_elements() const { return n_; }
    int interior_dim() const { return n_ - 1; }
    double h() const { return (b_ - a_) / n_; }
    double length() const { return b_ - a_; }

    /// Coordinate of node i, 0 <= i <= n_elements.
    double node(int i) const { return a_ + (b_ - a_) * static_cast<double>(i) / n_; }
    /// Coordinates of the interior nodes.
    Eigen::VectorXd interior_nodes() const;

private:
    double a_;
    double b_;
    int n_;
};

/// Piecewise-linear Galerkin discretisation of the bilinear form
///   (u, v) -> iint (u(x)-u(y)) (v(x)-v(y)) K(x-y) dx dy
/// for functions vanishing outside the mesh interval, together with the L2 mass matrix.
class GalerkinOperator {
public:
    GalerkinOperator(Kernel kernel, Mesh1D mesh, Eigen::MatrixXd stiffness, Eigen::MatrixXd mass);

    const Kernel& kernel() const { return kernel_; }
    const Mesh1D& mesh() const { return mesh_; }
    const Eigen::MatrixXd& stiffness() const { return stiffness_; }
    const Eigen::MatrixXd& mass() const { return mass_; }
    int dim() const { return static_cast<int>(mass_.rows()); }

private:
    Kernel kernel_;
    Mesh1D mesh_;
    Eigen::MatrixXd stiffness_;
    Eigen::MatrixXd mass_;
};

/// Assembles stiffness and mass for Fractional and Local kernels.
///
/// Fractional stiffness is built from element pairs: coincident and adjacent pairs
/// in closed form, separated pairs with an 8x8 Gauss rule, and the interaction of
/// the interval with its exterior through the analytic tail of the kernel.
GalerkinOperator assemble(const Kernel& kernel, const Mesh1D& mesh);

namespace detail {

/// Reference element-pair matrices for the unit mesh and K(r) = r^-(1+2s).
/// offset 0: 2x2 over (left, right) of one element; offset 1: 3x3 over
/// (far-left, shared, far-right); offset >= 2: 4x4 over (l1, r1, l2, r2).
/// Both orderings of the pair are included.
Eigen::MatrixXd element_pair_matrix(double s, int offset);

/// Reference 2x2 exterior matrix of the element [m, m+1] at distance m from the
/// left end of the interval: (1/s) int N_i N_j (m + t)^(-2s) dt.
Eigen::Matrix2d exterior_matrix(double s, int m);

/// int_0^1 int_0^1 p^a q^b (p + q)^gamma dp dq for integer a, b >= 0.
double square_moment(int a, int b, double gamma);

} // namespace detail

} // namespace fucik
