#include "fucik/eigen_basis.hpp"

#include "fucik/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace fucik {

namespace {

const GalerkinOperator& require(const std::shared_ptr<const GalerkinOperator>& op) {
    if (!op) throw InvalidArgument("eigen basis needs an operator");
    return *op;
}

} // namespace

EigenBasis::EigenBasis(std::shared_ptr<const GalerkinOperator> op, Eigen::VectorXd eigenvalues,
                       Eigen::MatrixXd vectors, int k)
    : op_(std::move(op)), eigenvalues_(std::move(eigenvalues)), vectors_(std::move(vectors)), k_(k),
      grid_(require(op_).mesh()) {
    if (vectors_.rows() != op_->dim() || vectors_.cols() != eigenvalues_.size())
        throw DimensionMismatch(op_->dim(), vectors_.rows());
    if (k_ < 1 || k_ >= dim()) throw InvalidArgument("splitting index must satisfy 1 <= k < N");
    const double lk = lambda(k_);
    const double lk1 = lambda(k_ + 1);
    if (lk1 - lk <= 1e-9 * lk1) throw DegenerateSplit(k_, lk, lk1);
}

BasisPtr eigenpairs(std::shared_ptr<const GalerkinOperator> op, int k) {
    if (!op) throw InvalidArgument("eigenpairs needs an operator");
    const int n = op->dim();
    if (k < 1 || k >= n) throw InvalidArgument("splitting index must satisfy 1 <= k < N");

    Eigen::LLT<Eigen::MatrixXd> llt(op->mass());
    if (llt.info() != Eigen::Success) throw FactorizationFailure("mass matrix is not SPD");

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        op->stiffness(), op->mass(), Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (solver.info() != Eigen::Success) throw FactorizationFailure("generalised eigensolve failed");

    Eigen::VectorXd values = solver.eigenvalues();
    Eigen::MatrixXd vectors = solver.eigenvectors();
    for (int j = 0; j < n; ++j) {
        Eigen::Index at = 0;
        vectors.col(j).cwiseAbs().maxCoeff(&at);
        if (vectors(at, j) < 0.0) vectors.col(j) = -vectors.col(j);
    }
    if (!(values(0) > 0.0)) throw FactorizationFailure("first eigenvalue is not positive");
    return std::make_shared<const EigenBasis>(std::move(op), std::move(values), std::move(vectors), k);
}

BasisPtr eigenpairs(const GalerkinOperator& op, int k) {
    return eigenpairs(std::make_shared<const GalerkinOperator>(op), k);
}

BasisPtr with_split(const EigenBasis& basis, int k) {
    return std::make_shared<const EigenBasis>(basis.op_ptr(), basis.eigenvalues(), basis.vectors(), k);
}

} // namespace fucik
