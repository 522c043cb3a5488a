#include "support.hpp"

#include "fucik/errors.hpp"
#include "fucik/oracle.hpp"

#include <doctest.h>

#include <numbers>

using namespace fucik;

namespace {

constexpr double pi = std::numbers::pi;

// Classical curve through ((k+1)^2, (k+1)^2) on (0, pi): p / sqrt(alpha) + n / sqrt(beta) = 1,
// where p and n count the positive and negative arcs.
double closed_form_beta(int k, double alpha, int first_sign) {
    const int arcs = k + 1;
    const int first = (arcs + 1) / 2, second = arcs / 2;
    const int p = first_sign > 0 ? first : second;
    const int n = arcs - p;
    const double r = (1.0 - p / std::sqrt(alpha)) / n;
    return 1.0 / (r * r);
}

BasisPtr basis(int k) { return testsupport::fractional_basis(0.5, -1.0, 1.0, 128, k); }

} // namespace

// ---------------------------------------------------------------------------
// Shooting

TEST_CASE("shoot: arcs and zeros") {
    const ShootingResult diag = shoot(4.0, 4.0);
    CHECK(diag.zeros == 1);
    CHECK(std::abs(diag.boundary_mismatch) <= 1e-15);
    const ShootingResult below = shoot(0.81, 0.81);
    CHECK(below.zeros == 0);
    CHECK(below.boundary_mismatch == doctest::Approx(std::sin(0.9 * pi) / 0.9));
    CHECK(shoot(4.0, 9.0, pi, -1).boundary_mismatch * shoot(4.0, 9.0, pi, 1).boundary_mismatch != 0.0);
    CHECK_THROWS_AS(shoot(0.0, 1.0), InvalidArgument);
}

TEST_CASE("classical_curve: diagonal point and closed form") {
    const auto diag = classical_curve(1, {4.0});
    CHECK(std::abs(diag[0].beta - 4.0) <= 1e-10);
    const auto far = classical_curve(1, {9.0});
    CHECK(std::abs(far[0].beta - 2.25) <= 1e-10);
    CHECK(std::abs(far[0].boundary_mismatch) <= 1e-10);
    CHECK(far[0].zeros == 1);
}

TEST_CASE("classical_curve: matches the arc-length relation on several branches") {
    for (int k : {1, 2, 3}) {
        const double lo = k * k, hi = (k + 1) * (k + 1);
        std::vector<double> alphas;
        for (int i = 1; i <= 7; ++i) alphas.push_back(lo + (hi - lo) * i / 8.0);
        for (ShootingStart start : {ShootingStart::Positive, ShootingStart::Negative, ShootingStart::Lower}) {
            const int sign = start == ShootingStart::Positive ? 1 : -1;
            std::vector<double> usable;
            for (double a : alphas) {
                const int p = sign > 0 ? (k + 2) / 2 : (k + 1) / 2;
                if (p / std::sqrt(a) < 1.0) usable.push_back(a);
            }
            const auto got = classical_curve(k, usable, start);
            for (std::size_t i = 0; i < usable.size(); ++i) {
                CAPTURE(k);
                CAPTURE(usable[i]);
                double want = closed_form_beta(k, usable[i], sign);
                if (start == ShootingStart::Lower) want = std::min(want, closed_form_beta(k, usable[i], 1));
                CHECK(std::abs(got[i].beta - want) <= 1e-10 * std::max(1.0, want));
                CHECK(std::abs(got[i].boundary_mismatch) <= 1e-10);
                CHECK(got[i].zeros == k);
            }
        }
    }
}

TEST_CASE("classical_curve: mirror symmetry") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> ud(1.05, 3.95);
    for (int i = 0; i < 20; ++i) {
        const double a = ud(rng);
        const double b = classical_curve(1, {a})[0].beta;
        const double back = classical_curve(1, {b})[0].beta;
        CHECK(std::abs(back - a) <= 1e-10 * std::max(1.0, a));
    }
    // For an even arc count the two starts are the two mirror images.
    const double a = 6.25;
    const double neg = classical_curve(2, {a}, ShootingStart::Negative)[0].beta;
    const double pos_back = classical_curve(2, {neg}, ShootingStart::Positive)[0].beta;
    CHECK(std::abs(pos_back - a) <= 1e-10 * a);
}

TEST_CASE("classical_curve: interval length scaling and errors") {
    const double len = 2.0;
    const double a = 2.5;
    const double scale = (pi / len) * (pi / len);
    const double b = classical_curve(1, {a * scale}, ShootingStart::Lower, len)[0].beta;
    CHECK(std::abs(b / scale - classical_curve(1, {a})[0].beta) <= 1e-10 * b / scale);
    CHECK_THROWS_AS(classical_curve(1, {0.9}, ShootingStart::Positive), NoCrossing);
    CHECK_THROWS_AS(classical_curve(1, {0.9}), NoCrossing);
    CHECK_THROWS_AS(classical_curve(0, {2.0}), InvalidArgument);
    CHECK_THROWS_AS(classical_curve(1, {-1.0}), InvalidArgument);
}

// ---------------------------------------------------------------------------
// Exhaustive searches

TEST_CASE("brute_force_max_X1: trivial maximisers") {
    std::mt19937_64 rng(42);
    for (int k : {1, 2}) {
        const BasisPtr b = basis(k);
        const double a = b->lambda_k() + 0.5 * b->gap();
        const double step = 0.01;
        const Field zero = brute_force_max_X1(FucikParams(b, a, 3.0 * b->lambda_k1()), Field::zero(b), 1.0, step);
        CHECK(zero.l2_norm() <= step);
        const Field v = testsupport::random_x2_field(rng, b);
        const Field diag = brute_force_max_X1(FucikParams(b, a, a), v, 1.0, step);
        CHECK(diag.l2_norm() <= step);
    }
}

TEST_CASE("brute_force_max_X1: agrees with the solver on random cases") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> frac(0.05, 1.0);
    int cases = 0;
    for (int k : {1, 2}) {
        const BasisPtr b = basis(k);
        const int count = k == 1 ? 13 : 12;
        for (int i = 0; i < count; ++i, ++cases) {
            const double a = b->lambda_k() + frac(rng) * b->gap();
            const double beta = b->lambda_k1() * (1.0 + 3.0 * frac(rng));
            const FucikParams p(b, a, beta);
            Field v = testsupport::random_x2_field(rng, b);
            v = v * (1.0 / v.l2_norm());
            const Field solver = maximize_X1(p, v);
            double radius = 2.0;
            Field oracle;
            for (;;) {
                try {
                    oracle = brute_force_max_X1(p, v, radius, radius / 40.0);
                    break;
                } catch (const RadiusTooSmall&) {
                    radius *= 2.0;
                }
            }
            CAPTURE(k);
            CAPTURE(a);
            CAPTURE(beta);
            CHECK((oracle.coeffs().head(k) - solver.coeffs().head(k)).cwiseAbs().maxCoeff() <= 1e-6);
        }
    }
    CHECK(cases == 25);
}

TEST_CASE("brute_force_max_X1: radius too small and argument checks") {
    const BasisPtr b = basis(1);
    const FucikParams p(b, b->lambda(1) + 0.5 * b->gap(), 3.0 * b->lambda(2));
    const Field v = 50.0 * Field::eigenfunction(b, 2) + 20.0 * Field::eigenfunction(b, 3);
    CHECK_THROWS_AS(brute_force_max_X1(p, v, 0.1, 0.01), RadiusTooSmall);
    CHECK_THROWS_AS(brute_force_max_X1(p, Field::eigenfunction(b, 1), 1.0, 0.1), InvalidArgument);
    CHECK_THROWS_AS(brute_force_max_X1(p, v, 1.0, 2.0), InvalidArgument);
    CHECK_THROWS_AS(brute_force_max_X1(FucikParams(basis(3), 20.0, 60.0), Field::zero(basis(3)), 1.0, 0.1),
                    InvalidArgument);
}

TEST_CASE("brute_force_sphere_min: diagonal value") {
    for (int k : {1, 2}) {
        const BasisPtr b = basis(k);
        const double a = b->lambda_k() + 0.4 * b->gap();
        const SphereEstimate e = brute_force_sphere_min(FucikParams(b, a, a), 16);
        CHECK(e.angle == 0.0);
        CHECK(e.m_estimate == doctest::Approx(0.5 * (b->lambda_k1() - a)).epsilon(1e-12));
    }
}

TEST_CASE("brute_force_sphere_min: bounds the solver from above and refines") {
    for (int k : {1, 2}) {
        const BasisPtr b = basis(k);
        const FucikParams p(b, b->lambda_k() + 0.5 * b->gap(), 1.6 * b->lambda_k1());
        const Tolerances tol = Tolerances::defaults(*b);
        const double m = minimize_sphere(p).m_value;
        const SphereEstimate coarse = brute_force_sphere_min(p, 256);
        const SphereEstimate fine = brute_force_sphere_min(p, 512);
        CAPTURE(k);
        CHECK(coarse.m_estimate >= m - tol.m);
        CHECK(fine.m_estimate >= m - tol.m);
        CHECK(std::abs(fine.m_estimate - coarse.m_estimate) < 1e-4);
        CHECK(std::abs(fine.v_estimate.l2_norm() - 1.0) <= 1e-12);
    }
}

// ---------------------------------------------------------------------------
// End to end

TEST_CASE("local operator: traced curve agrees with the classical curve") {
    for (int k : {1, 2}) {
        const BasisPtr b = testsupport::local_basis(0.0, pi, 128, k);
        TraceOptions o;
        o.window_lo = 0.1;
        o.n_samples = k == 1 ? 9 : 5;
        const CurveBranch branch = trace_curve(b, o);
        std::vector<double> alphas;
        for (const CurveSample& s : branch.samples) {
            REQUIRE(s.ok);
            alphas.push_back(s.alpha);
        }
        const auto exact = classical_curve(k, alphas);
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            CAPTURE(k);
            CAPTURE(alphas[i]);
            CHECK(std::abs(branch.samples[i].beta - exact[i].beta) <= 0.01 * exact[i].beta);
        }
    }
}
