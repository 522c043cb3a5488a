#include "support.hpp"

#include "fucik/errors.hpp"
#include "fucik/quadrature.hpp"

#include <doctest.h>

using namespace fucik;
using testsupport::close_rel;

TEST_CASE("to_field: unit coefficient gives the eigenvector") {
    const BasisPtr b = testsupport::fractional_basis(0.5, -1.0, 1.0, 64, 2);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(b->dim());
    c(0) = 1.0;
    const Field u = to_field(b, Coeffs{c});
    CHECK((u.nodal() - b->vectors().col(0)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("to_field: zero nodal values give zero coefficients") {
    const BasisPtr b = testsupport::fractional_basis(0.5, -1.0, 1.0, 64, 2);
    const Field u = to_field(b, Nodal{Eigen::VectorXd::Zero(b->dim())});
    CHECK(u.coeffs().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("to_field: representations are consistent") {
    const BasisPtr b = testsupport::fractional_basis(0.5, -1.0, 1.0, 64, 2);
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const Field u = to_field(b, Coeffs{testsupport::random_vector(rng, b->dim())});
        CHECK(close_rel(u.coeffs().squaredNorm(), u.nodal().dot(b->op().mass() * u.nodal()), 1e-8));
        CHECK(close_rel(u.energy(), u.nodal().dot(b->op().stiffness() * u.nodal()), 1e-8));
        const Field back = to_field(b, Nodal{u.nodal()});
        CHECK((back.coeffs() - u.coeffs()).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((back.nodal() - b->vectors() * back.coeffs()).cwiseAbs().maxCoeff() < 1e-10);
    }
    CHECK_THROWS_AS(to_field(b, Coeffs{Eigen::VectorXd::Zero(3)}), DimensionMismatch);
    CHECK_THROWS_AS(to_field(b, Nodal{Eigen::VectorXd::Zero(b->dim() + 1)}), DimensionMismatch);
}

TEST_CASE("split: eigenfunctions land in their own subspace") {
    const int k = 2;
    const BasisPtr b = testsupport::fractional_basis(0.5, -1.0, 1.0, 64, k);
    auto [a1, a2] = split(Field::eigenfunction(b, 1));
    CHECK(a1.coeffs()(0) == 1.0);
    CHECK(a2.coeffs().cwiseAbs().maxCoeff() == 0.0);
    auto [c1, c2] = split(Field::eigenfunction(b, k + 1));
    CHECK(c1.coeffs().cwiseAbs().maxCoeff() == 0.0);
    CHECK(c2.coeffs()(k) == 1.0);
}

TEST_CASE("split: orthogonal and energy additive") {
    const BasisPtr b = testsupport::fractional_basis(0.5, -1.0, 1.0, 64, 3);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const Field u = to_field(b, Coeffs{testsupport::random_vector(rng, b->dim())});
        auto [u1, u2] = split(u);
        CHECK(((u1 + u2).coeffs() - u.coeffs()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(u1.coeffs().tail(b->dim() - 3).cwiseAbs().maxCoeff() == 0.0);
        CHECK(u2.coeffs().head(3).cwiseAbs().maxCoeff() == 0.0);
        CHECK(std::abs(u1.nodal().dot(b->op().mass() * u2.nodal())) < 1e-12 * (1.0 + u.l2_norm() * u.l2_norm()));
        CHECK(close_rel(u.energy(), u1.energy() + u2.energy(), 1e-8));
    }
}

TEST_CASE("sample grid: Simpson reproduces the mass matrix") {
    const Mesh1D mesh(-1.0, 1.0, 16);
    const SampleGrid grid(mesh);
    const GalerkinOperator op = assemble(Kernel::local(), mesh);
    const Tridiagonal t = grid.weighted_mass(Eigen::VectorXd::Ones(grid.size()));
    CHECK((t.dense() - op.mass()).cwiseAbs().maxCoeff() < 1e-15);
    std::mt19937_64 rng(1);
    const Eigen::VectorXd u = testsupport::random_vector(rng, mesh.interior_dim());
    const Eigen::VectorXd v = testsupport::random_vector(rng, mesh.interior_dim());
    const Eigen::VectorXd su = grid.sample(u);
    const Eigen::VectorXd sv = grid.sample(v);
    CHECK(grid.integrate(su.cwiseProduct(sv)) == doctest::Approx(u.dot(op.mass() * v)).epsilon(1e-13));
    CHECK((grid.project(su) - op.mass() * u).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((t.apply(u) - op.mass() * u).cwiseAbs().maxCoeff() < 1e-14);
}
