#pragma once

// Shared fixtures and independent reference computations for the test suites.

#include "fucik/eigen_basis.hpp"
#include "fucik/field.hpp"
#include "fucik/kernel.hpp"
#include "fucik/operator.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <random>
#include <vector>

namespace testsupport {

inline bool close_rel(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

/// Cached decompositions; building them dominates test time.
inline fucik::BasisPtr fractional_basis(double s, double a, double b, int n_el, int k, double scale = 1.0) {
    static std::map<std::tuple<double, double, double, int, double>, std::shared_ptr<const fucik::GalerkinOperator>> cache;
    const auto key = std::make_tuple(s, a, b, n_el, scale);
    auto it = cache.find(key);
    if (it == cache.end()) {
        auto op = std::make_shared<const fucik::GalerkinOperator>(
            fucik::assemble(fucik::Kernel::fractional(s, scale), fucik::Mesh1D(a, b, n_el)));
        it = cache.emplace(key, op).first;
    }
    static std::map<std::pair<const fucik::GalerkinOperator*, int>, fucik::BasisPtr> bases;
    const auto bkey = std::make_pair(it->second.get(), k);
    auto bt = bases.find(bkey);
    if (bt == bases.end()) {
        fucik::BasisPtr base;
        for (const auto& [kk, bp] : bases)
            if (kk.first == it->second.get()) base = bp;
        fucik::BasisPtr made = base ? fucik::with_split(*base, k) : fucik::eigenpairs(it->second, k);
        bt = bases.emplace(bkey, made).first;
    }
    return bt->second;
}

inline fucik::BasisPtr local_basis(double a, double b, int n_el, int k) {
    static std::map<std::tuple<double, double, int, int>, fucik::BasisPtr> cache;
    const auto key = std::make_tuple(a, b, n_el, k);
    auto it = cache.find(key);
    if (it == cache.end()) {
        auto op = std::make_shared<const fucik::GalerkinOperator>(
            fucik::assemble(fucik::Kernel::local(), fucik::Mesh1D(a, b, n_el)));
        it = cache.emplace(key, fucik::eigenpairs(op, k)).first;
    }
    return it->second;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = nd(rng);
    return v;
}

/// Random X2 element, coefficients decaying like 1/lambda_j so the field is smooth.
inline Eigen::VectorXd random_x2(std::mt19937_64& rng, const fucik::EigenBasis& basis) {
    const int k = basis.k();
    Eigen::VectorXd v = random_vector(rng, basis.dim() - k);
    for (int j = 0; j < v.size(); ++j) v(j) *= basis.lambda(k + 1) / basis.lambda(k + 1 + j);
    return v;
}

inline fucik::Field x2_field(const fucik::BasisPtr& basis, const Eigen::VectorXd& tail) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(basis->dim());
    c.tail(tail.size()) = tail;
    return fucik::Field(basis, fucik::Coeffs{std::move(c)});
}

inline fucik::Field x1_field(const fucik::BasisPtr& basis, const Eigen::VectorXd& head) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(basis->dim());
    c.head(head.size()) = head;
    return fucik::Field(basis, fucik::Coeffs{std::move(c)});
}

inline fucik::Field random_x2_field(std::mt19937_64& rng, const fucik::BasisPtr& basis) {
    return x2_field(basis, random_x2(rng, *basis));
}

/// Energy norm of the X1 part of u.
inline double energy_norm_x1(const fucik::Field& u) {
    const int k = u.eigen().k();
    return std::sqrt(u.coeffs().head(k).cwiseAbs2().dot(u.eigen().eigenvalues().head(k)));
}

/// Minimiser of a unimodal function on [lo, hi] by golden-section search.
template <class F>
double golden_section(F f, double lo, double hi, int iterations = 200) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iterations && b - a > 1e-15 * (1.0 + std::abs(a)); ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// ---------------------------------------------------------------------------
// Toeplitz symbol of the fractional stiffness on the unit mesh.
//
// For hats on the integer lattice the bilinear form over the whole plane depends
// only on the offset d:
//   a(d) = 2 int_0^inf r^(-1-2s) [2 B(d) - B(r+d) - B(r-d)] dr,
// where B is the autocorrelation of the unit hat (the cubic B-spline). The
// bracket is a piecewise cubic in r; each polynomial piece is integrated
// against r^gamma exactly.
// ---------------------------------------------------------------------------

using Cubic = std::array<double, 4>; // c0 + c1 r + c2 r^2 + c3 r^3

inline double hat_autocorrelation(double tau) {
    const double t = std::abs(tau);
    if (t <= 1.0) return 2.0 / 3.0 - t * t + 0.5 * t * t * t;
    if (t <= 2.0) return (2.0 - t) * (2.0 - t) * (2.0 - t) / 6.0;
    return 0.0;
}

// Polynomial in r of B(sigma * r + shift) on an r-interval where the argument
// stays in one piece of B (piece chosen at r_mid).
inline Cubic b_piece(double sigma, double shift, double r_mid) {
    const double tau = sigma * r_mid + shift;
    const double t = std::abs(tau);
    // Piece in terms of x = |tau| = e * (sigma r + shift), e = sign(tau).
    const double e = tau >= 0.0 ? 1.0 : -1.0;
    const double p = e * sigma; // x = p r + q
    const double q = e * shift;
    std::array<double, 4> in_x{}; // coefficients in x
    if (t <= 1.0) in_x = {2.0 / 3.0, 0.0, -1.0, 0.5};
    else if (t <= 2.0) in_x = {8.0 / 6.0, -2.0, 1.0, -1.0 / 6.0}; // (2-x)^3/6
    else return {0.0, 0.0, 0.0, 0.0};
    // Substitute x = p r + q.
    Cubic out{0.0, 0.0, 0.0, 0.0};
    const double binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
    for (int n = 0; n < 4; ++n)
        for (int j = 0; j <= n; ++j)
            out[j] += in_x[n] * binom[n][j] * std::pow(p, j) * std::pow(q, n - j);
    return out;
}

inline double toeplitz_symbol(double s, int d) {
    const double gamma = -1.0 - 2.0 * s;
    const double b_d = hat_autocorrelation(d);
    std::vector<double> breaks = {0.0};
    for (int j = 1; j <= d + 2; ++j) breaks.push_back(j);
    double total = 0.0;
    for (std::size_t seg = 0; seg + 1 < breaks.size(); ++seg) {
        const double r0 = breaks[seg];
        const double r1 = breaks[seg + 1];
        const double mid = 0.5 * (r0 + r1);
        const Cubic plus = b_piece(1.0, d, mid);
        const Cubic minus = b_piece(1.0, -static_cast<double>(d), mid);
        Cubic bracket{2.0 * b_d - plus[0] - minus[0], -plus[1] - minus[1], -plus[2] - minus[2],
                      -plus[3] - minus[3]};
        if (seg == 0) {
            // B is C^2, so the bracket vanishes to second order at r = 0.
            bracket[0] = 0.0;
            bracket[1] = 0.0;
        }
        for (int j = 0; j < 4; ++j) {
            if (bracket[j] == 0.0) continue;
            const double e = gamma + j + 1.0;
            if (std::abs(e) < 1e-12) {
                total += bracket[j] * std::log(r1 / r0);
                continue;
            }
            total += bracket[j] * (std::pow(r1, e) - (r0 == 0.0 ? 0.0 : std::pow(r0, e))) / e;
        }
    }
    // Beyond r = d + 2 both shifted copies vanish.
    const double r_end = d + 2.0;
    total += 2.0 * b_d * std::pow(r_end, gamma + 1.0) / (-(gamma + 1.0));
    return 2.0 * total;
}

// ---------------------------------------------------------------------------
// Point-collocation discretisation of
//   L u(x) = 2 int_0^inf (2u(x) - u(x+r) - u(x-r)) r^(-1-2s) dr
// at the interior nodes, with u the piecewise-linear interpolant (zero outside).
// The innermost panel uses the second-difference (quadratic) model.
// ---------------------------------------------------------------------------
inline double collocation_lambda1(double s, double a, double b, int n_el) {
    const double h = (b - a) / n_el;
    const int n = n_el - 1;
    const double gamma = -1.0 - 2.0 * s;
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    const auto value_index = [&](int node) { return (node >= 1 && node <= n) ? node - 1 : -1; };
    // Weights of a linear function on [j h, (j+1) h] against r^gamma.
    const auto seg_int = [&](int j, int pw) {
        const double e = gamma + pw + 1.0;
        if (std::abs(e) < 1e-12) return std::log((j + 1.0) / j);
        return (std::pow((j + 1.0) * h, e) - std::pow(j * h, e)) / e;
    };
    for (int i = 1; i <= n; ++i) {
        const int row = i - 1;
        // r in [0, h]: D(r) ~ D(h) (r/h)^2.
        {
            const double w = std::pow(h, gamma + 3.0) / (gamma + 3.0) / (h * h);
            l(row, row) += 2.0 * w;
            for (int nb : {i - 1, i + 1}) {
                const int c = value_index(nb);
                if (c >= 0) l(row, c) -= w;
            }
        }
        // r in [j h, (j+1) h], j >= 1 up to the far end of the interval.
        const int j_max = n_el;
        for (int j = 1; j < j_max; ++j) {
            // Linear in r: D(r) = D_j (j+1 - r/h) + D_{j+1} (r/h - j).
            const double w0 = (j + 1.0) * seg_int(j, 0) - seg_int(j, 1) / h;
            const double w1 = seg_int(j, 1) / h - j * seg_int(j, 0);
            for (int side = 0; side < 2; ++side) {
                const int jj = j + side;
                const double w = side == 0 ? w0 : w1;
                l(row, row) += 2.0 * w;
                for (int nb : {i - jj, i + jj}) {
                    const int c = value_index(nb);
                    if (c >= 0) l(row, c) -= w;
                }
            }
        }
        // Tail r >= n_el h: only 2u(x) survives.
        l(row, row) += 2.0 * std::pow(j_max * h, gamma + 1.0) / (2.0 * s);
    }
    l *= 2.0;
    // The collocation matrix is symmetric by construction.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (l + l.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

} // namespace testsupport
