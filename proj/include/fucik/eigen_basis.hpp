#pragma once

#include "fucik/operator.hpp"
#include "fucik/quadrature.hpp"

#include <Eigen/Dense>

#include <memory>

namespace fucik {

/// Generalised eigenpairs A phi = lambda M phi of an assembled operator with a
/// chosen splitting index k: X1 = span(phi_1..phi_k), X2 = span(phi_{k+1}..phi_N).
///
/// Eigenvalues ascend; columns of vectors() hold nodal values and are
/// M-orthonormal. Each column is sign-normalised so that its entry of largest
/// magnitude is positive, which makes phi_1 nonnegative.
class EigenBasis {
public:
    EigenBasis(std::shared_ptr<const GalerkinOperator> op, Eigen::VectorXd eigenvalues,
               Eigen::MatrixXd vectors, int k);

    const GalerkinOperator& op() const { return *op_; }
    const std::shared_ptr<const GalerkinOperator>& op_ptr() const { return op_; }
    const Mesh1D& mesh() const { return op_->mesh(); }
    const SampleGrid& grid() const { return grid_; }
    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
    const Eigen::MatrixXd& vectors() const { return vectors_; }
    int k() const { return k_; }
    int dim() const { return static_cast<int>(eigenvalues_.size()); }

    double lambda(int j) const { return eigenvalues_(j - 1); } ///< 1-based, like phi_j
    double lambda_k() const { return lambda(k_); }
    double lambda_k1() const { return lambda(k_ + 1); }
    double gap() const { return lambda_k1() - lambda_k(); }

    /// Nodal values of phi_{k+1}..phi_N.
    auto x2_vectors() const { return vectors_.rightCols(dim() - k_); }
    auto x1_vectors() const { return vectors_.leftCols(k_); }

private:
    std::shared_ptr<const GalerkinOperator> op_;
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXd vectors_;
    int k_;
    SampleGrid grid_;
};

using BasisPtr = std::shared_ptr<const EigenBasis>;

/// Dense Cholesky-reduced symmetric eigensolve. Throws DegenerateSplit when
/// lambda_{k+1} - lambda_k <= 1e-9 lambda_{k+1}, FactorizationFailure when M is
/// not numerically SPD.
BasisPtr eigenpairs(std::shared_ptr<const GalerkinOperator> op, int k);
BasisPtr eigenpairs(const GalerkinOperator& op, int k);

/// Same decomposition with a different splitting index.
BasisPtr with_split(const EigenBasis& basis, int k);

} // namespace fucik
