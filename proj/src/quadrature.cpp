#include "fucik/quadrature.hpp"

#include "fucik/errors.hpp"

#include <array>

namespace fucik {

namespace {

constexpr std::array<double, 5> kTau = {0.0, 0.25, 0.5, 0.75, 1.0};
constexpr std::array<double, 5> kSimpson = {1.0 / 12.0, 4.0 / 12.0, 2.0 / 12.0, 4.0 / 12.0, 1.0 / 12.0};

} // namespace

Eigen::MatrixXd Tridiagonal::apply(const Eigen::MatrixXd& x) const {
    const Eigen::Index n = size();
    if (x.rows() != n) throw DimensionMismatch(n, x.rows());
    Eigen::MatrixXd y = diag.asDiagonal() * x;
    if (n > 1) {
        y.topRows(n - 1).noalias() += off.asDiagonal() * x.bottomRows(n - 1);
        y.bottomRows(n - 1).noalias() += off.asDiagonal() * x.topRows(n - 1);
    }
    return y;
}

Eigen::MatrixXd Tridiagonal::dense() const {
    const Eigen::Index n = size();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    m.diagonal() = diag;
    if (n > 1) {
        m.diagonal(1) = off;
        m.diagonal(-1) = off;
    }
    return m;
}

Tridiagonal& Tridiagonal::operator+=(const Tridiagonal& other) {
    diag += other.diag;
    off += other.off;
    return *this;
}

Tridiagonal& Tridiagonal::operator*=(double factor) {
    diag *= factor;
    off *= factor;
    return *this;
}

SampleGrid::SampleGrid(const Mesh1D& mesh) : n_elements_(mesh.n_elements()) {
    const Eigen::Index n = static_cast<Eigen::Index>(n_elements_) * points_per_element;
    positions_.resize(n);
    weights_.resize(n);
    const double h = mesh.h();
    for (int e = 0; e < n_elements_; ++e) {
        for (int p = 0; p < points_per_element; ++p) {
            const Eigen::Index at = static_cast<Eigen::Index>(e) * points_per_element + p;
            positions_(at) = mesh.node(e) + kTau[static_cast<std::size_t>(p)] * h;
            weights_(at) = kSimpson[static_cast<std::size_t>(p)] * h;
        }
    }
}

Eigen::VectorXd SampleGrid::sample(const Eigen::VectorXd& nodal) const {
    if (nodal.size() != n_elements_ - 1) throw DimensionMismatch(n_elements_ - 1, nodal.size());
    Eigen::VectorXd out(size());
    for (int e = 0; e < n_elements_; ++e) {
        const double left = e >= 1 ? nodal(e - 1) : 0.0;
        const double right = e + 1 <= n_elements_ - 1 ? nodal(e) : 0.0;
        for (int p = 0; p < points_per_element; ++p) {
            const double t = kTau[static_cast<std::size_t>(p)];
            out(static_cast<Eigen::Index>(e) * points_per_element + p) = (1.0 - t) * left + t * right;
        }
    }
    return out;
}

Eigen::VectorXd SampleGrid::project(const Eigen::VectorXd& values) const {
    if (values.size() != size()) throw DimensionMismatch(size(), values.size());
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n_elements_ - 1);
    for (int e = 0; e < n_elements_; ++e) {
        double to_left = 0.0;
        double to_right = 0.0;
        for (int p = 0; p < points_per_element; ++p) {
            const Eigen::Index at = static_cast<Eigen::Index>(e) * points_per_element + p;
            const double t = kTau[static_cast<std::size_t>(p)];
            const double wv = weights_(at) * values(at);
            to_left += wv * (1.0 - t);
            to_right += wv * t;
        }
        if (e >= 1) g(e - 1) += to_left;
        if (e + 1 <= n_elements_ - 1) g(e) += to_right;
    }
    return g;
}

Tridiagonal SampleGrid::weighted_mass(const Eigen::VectorXd& rho) const {
    if (rho.size() != size()) throw DimensionMismatch(size(), rho.size());
    Tridiagonal t(n_elements_ - 1);
    for (int e = 0; e < n_elements_; ++e) {
        double ll = 0.0;
        double lr = 0.0;
        double rr = 0.0;
        for (int p = 0; p < points_per_element; ++p) {
            const Eigen::Index at = static_cast<Eigen::Index>(e) * points_per_element + p;
            const double tau = kTau[static_cast<std::size_t>(p)];
            const double w = weights_(at) * rho(at);
            ll += w * (1.0 - tau) * (1.0 - tau);
            lr += w * (1.0 - tau) * tau;
            rr += w * tau * tau;
        }
        const bool has_left = e >= 1;
        const bool has_right = e + 1 <= n_elements_ - 1;
        if (has_left) t.diag(e - 1) += ll;
        if (has_right) t.diag(e) += rr;
        if (has_left && has_right) t.off(e - 1) += lr;
    }
    return t;
}

} // namespace fucik
