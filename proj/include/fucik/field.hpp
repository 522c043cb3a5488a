#pragma once

#include "fucik/eigen_basis.hpp"

#include <Eigen/Dense>

#include <utility>

namespace fucik {

/// Tags selecting the representation a Field is built from.
struct Coeffs {
    Eigen::VectorXd values;
};
struct Nodal {
    Eigen::VectorXd values;
};

/// A discrete function u = sum_j c_j phi_j, held both as eigen-coefficients and as
/// interior nodal values. The two are kept consistent: nodal = Phi c, and
/// c = Phi^T M nodal.
class Field {
public:
    /// Empty placeholder with no basis.
    Field() = default;
    Field(BasisPtr basis, Coeffs c);
    Field(BasisPtr basis, Nodal u);

    static Field zero(BasisPtr basis);
    /// phi_j, 1-based.
    static Field eigenfunction(BasisPtr basis, int j);

    const BasisPtr& basis() const { return basis_; }
    const EigenBasis& eigen() const { return *basis_; }
    const Eigen::VectorXd& coeffs() const { return coeffs_; }
    const Eigen::VectorXd& nodal() const { return nodal_; }
    Eigen::Index dim() const { return coeffs_.size(); }

    double l2_norm() const { return coeffs_.norm(); }
    /// sum_j lambda_j c_j^2, the squared A-seminorm.
    double energy() const;
    double energy_norm() const;
    double dot(const Field& other) const; ///< L2 inner product

    bool empty() const { return basis_ == nullptr; }
    /// Nodal values of both signs, each exceeding rel_tol times the max magnitude.
    bool changes_sign(double rel_tol = 0.0) const;

    Field operator+(const Field& other) const;
    Field operator-(const Field& other) const;
    Field operator-() const;
    Field operator*(double t) const;
    friend Field operator*(double t, const Field& u) { return u * t; }

private:
    Field(BasisPtr basis, Eigen::VectorXd coeffs, Eigen::VectorXd nodal);
    void require_same(const Field& other) const;

    BasisPtr basis_;
    Eigen::VectorXd coeffs_;
    Eigen::VectorXd nodal_;
};

Field to_field(BasisPtr basis, Coeffs c);
Field to_field(BasisPtr basis, Nodal u);

/// (u1, u2) with u1 in X1 = span(phi_1..phi_k) and u2 in X2.
std::pair<Field, Field> split(const Field& u);

} // namespace fucik
