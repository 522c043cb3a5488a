#include "fucik/field.hpp"

#include "fucik/errors.hpp"

#include <algorithm>
#include <cmath>

namespace fucik {

namespace {

const EigenBasis& require(const BasisPtr& basis) {
    if (!basis) throw InvalidArgument("field needs a basis");
    return *basis;
}

} // namespace

Field::Field(BasisPtr basis, Eigen::VectorXd coeffs, Eigen::VectorXd nodal)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)), nodal_(std::move(nodal)) {}

Field::Field(BasisPtr basis, Coeffs c) : basis_(std::move(basis)) {
    const EigenBasis& b = require(basis_);
    if (c.values.size() != b.dim()) throw DimensionMismatch(b.dim(), c.values.size());
    coeffs_ = std::move(c.values);
    nodal_ = b.vectors() * coeffs_;
}

Field::Field(BasisPtr basis, Nodal u) : basis_(std::move(basis)) {
    const EigenBasis& b = require(basis_);
    if (u.values.size() != b.dim()) throw DimensionMismatch(b.dim(), u.values.size());
    nodal_ = std::move(u.values);
    coeffs_ = b.vectors().transpose() * (b.op().mass() * nodal_);
}

Field Field::zero(BasisPtr basis) {
    const int n = require(basis).dim();
    return Field(std::move(basis), Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n));
}

Field Field::eigenfunction(BasisPtr basis, int j) {
    const EigenBasis& b = require(basis);
    if (j < 1 || j > b.dim()) throw InvalidArgument("eigenfunction index out of range");
    Eigen::VectorXd c = Eigen::VectorXd::Zero(b.dim());
    c(j - 1) = 1.0;
    Eigen::VectorXd u = b.vectors().col(j - 1);
    return Field(std::move(basis), std::move(c), std::move(u));
}

double Field::energy() const { return coeffs_.dot(basis_->eigenvalues().cwiseProduct(coeffs_)); }

double Field::energy_norm() const { return std::sqrt(std::max(energy(), 0.0)); }

double Field::dot(const Field& other) const {
    require_same(other);
    return coeffs_.dot(other.coeffs_);
}

bool Field::changes_sign(double rel_tol) const {
    if (nodal_.size() == 0) return false;
    const double scale = nodal_.cwiseAbs().maxCoeff();
    if (scale == 0.0) return false;
    return nodal_.maxCoeff() > rel_tol * scale && nodal_.minCoeff() < -rel_tol * scale;
}

void Field::require_same(const Field& other) const {
    if (basis_ != other.basis_ && basis_->op_ptr() != other.basis_->op_ptr())
        throw InvalidArgument("fields live on different bases");
}

Field Field::operator+(const Field& other) const {
    require_same(other);
    return Field(basis_, coeffs_ + other.coeffs_, nodal_ + other.nodal_);
}

Field Field::operator-(const Field& other) const {
    require_same(other);
    return Field(basis_, coeffs_ - other.coeffs_, nodal_ - other.nodal_);
}

Field Field::operator-() const { return Field(basis_, -coeffs_, -nodal_); }

Field Field::operator*(double t) const { return Field(basis_, t * coeffs_, t * nodal_); }

Field to_field(BasisPtr basis, Coeffs c) { return Field(std::move(basis), std::move(c)); }
Field to_field(BasisPtr basis, Nodal u) { return Field(std::move(basis), std::move(u)); }

std::pair<Field, Field> split(const Field& u) {
    const int k = u.eigen().k();
    const Eigen::Index n = u.dim();
    Eigen::VectorXd c1 = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd c2 = Eigen::VectorXd::Zero(n);
    c1.head(k) = u.coeffs().head(k);
    c2.tail(n - k) = u.coeffs().tail(n - k);
    return {Field(u.basis(), Coeffs{std::move(c1)}), Field(u.basis(), Coeffs{std::move(c2)})};
}

} // namespace fucik
