#include "fucik/oracle.hpp"

#include "fucik/errors.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <optional>

namespace fucik {

ShootingResult shoot(double alpha, double beta, double length, int slope_sign) {
    if (!(alpha > 0.0) || !(beta > 0.0) || !(length > 0.0))
        throw InvalidArgument("shooting needs alpha > 0, beta > 0 and length > 0");
    ShootingResult r{alpha, beta, 0, 0.0};
    // Every arc starts at a zero with |u'| = 1: u = sign sin(w (x - x0)) / w on [x0, x0 + pi / w].
    double x = 0.0;
    int sign = slope_sign >= 0 ? 1 : -1;
    for (;;) {
        const double w = std::sqrt(sign > 0 ? alpha : beta);
        const double end = x + std::numbers::pi / w;
        if (end >= length) {
            r.boundary_mismatch = sign * std::sin(w * (length - x)) / w;
            return r;
        }
        x = end;
        ++r.zeros;
        sign = -sign;
    }
}

namespace {

// Smallest beta at which the shot solution gains its (k+1)-th interior zero; there
// u(length) = 0.
ShootingResult curve_point(int k, double alpha, int slope_sign, double length) {
    const auto zeros = [&](double beta) { return shoot(alpha, beta, length, slope_sign).zeros; };
    double hi = 1.0;
    while (zeros(hi) <= k) {
        hi *= 2.0;
        if (hi > 1e15) throw NoCrossing("no classical crossing for alpha = " + format_number(alpha));
    }
    double lo = hi;
    while (zeros(lo) > k) {
        lo *= 0.5;
        if (lo < 1e-15) throw NoCrossing("no classical crossing for alpha = " + format_number(alpha));
    }
    // Arc ends move left as beta grows, so the zero count is nondecreasing in beta.
    while (hi - lo > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (zeros(mid) > k ? hi : lo) = mid;
    }
    // Report the point with k interior zeros, closest to the crossing.
    ShootingResult out = shoot(alpha, lo, length, slope_sign);
    out.beta = lo;
    return out;
}

} // namespace

std::vector<ShootingResult> classical_curve(int k, const std::vector<double>& alpha_grid, ShootingStart start,
                                            double length) {
    if (k < 1) throw InvalidArgument("classical curve needs k >= 1");
    std::vector<ShootingResult> out;
    out.reserve(alpha_grid.size());
    for (double alpha : alpha_grid) {
        if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be positive and finite");
        if (start == ShootingStart::Positive) {
            out.push_back(curve_point(k, alpha, 1, length));
        } else if (start == ShootingStart::Negative) {
            out.push_back(curve_point(k, alpha, -1, length));
        } else {
            std::optional<ShootingResult> best;
            for (int s : {1, -1}) {
                try {
                    ShootingResult r = curve_point(k, alpha, s, length);
                    if (!best || r.beta < best->beta) best = r;
                } catch (const NoCrossing&) {
                }
            }
            if (!best) throw NoCrossing("no classical crossing for alpha = " + format_number(alpha));
            out.push_back(*best);
        }
    }
    return out;
}

namespace {

// J(x + v) evaluated directly from sampled nodal values, x in X1 coordinates.
class X1Objective {
public:
    X1Objective(const FucikParams& params, const Field& v)
        : params_(params), basis_(params.eigen()), k_(params.k()), v_nodal_(v.nodal()),
          v_quad_(0.5 * v.coeffs().tail(basis_.dim() - k_).cwiseAbs2().dot(basis_.eigenvalues().tail(basis_.dim() - k_))) {}

    double operator()(const Eigen::VectorXd& x) const {
        Eigen::VectorXd nodal = v_nodal_;
        for (int i = 0; i < k_; ++i) nodal += x(i) * basis_.vectors().col(i);
        const SampleGrid& g = basis_.grid();
        const Eigen::VectorXd s = g.sample(nodal);
        double pos = 0.0, neg = 0.0;
        for (Eigen::Index p = 0; p < s.size(); ++p) (s(p) > 0.0 ? pos : neg) += g.weights()(p) * s(p) * s(p);
        double quad = v_quad_;
        for (int i = 0; i < k_; ++i) quad += 0.5 * basis_.lambda(i + 1) * x(i) * x(i);
        return quad - 0.5 * (params_.alpha() * pos + params_.beta() * neg);
    }

private:
    const FucikParams& params_;
    const EigenBasis& basis_;
    int k_;
    Eigen::VectorXd v_nodal_;
    double v_quad_;
};

double golden_max(const std::function<double(double)>& f, double lo, double hi) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < 200 && b - a > 1e-14 * (1.0 + std::abs(a) + std::abs(b)); ++i) {
        if (fc > fd) {
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

} // namespace

Field brute_force_max_X1(const FucikParams& params, const Field& v, double grid_radius, double grid_step) {
    const int k = params.k();
    if (k > 2) throw InvalidArgument("brute-force X1 search supports k <= 2");
    if (!(grid_radius > 0.0) || !(grid_step > 0.0) || grid_step > grid_radius)
        throw InvalidArgument("brute-force X1 search needs 0 < grid_step <= grid_radius");
    if (v.basis() != params.basis()) throw InvalidArgument("v must live on the basis of the parameters");
    if (v.coeffs().head(k).cwiseAbs().maxCoeff() != 0.0) throw InvalidArgument("v must lie in X2");
    const X1Objective obj(params, v);
    const int n = static_cast<int>(std::floor(grid_radius / grid_step + 1e-9));
    Eigen::VectorXd best = Eigen::VectorXd::Zero(k), x(k);
    double best_value = -std::numeric_limits<double>::infinity();
    Eigen::VectorXi best_index = Eigen::VectorXi::Zero(k), index(k);
    const auto visit = [&] {
        for (int i = 0; i < k; ++i) x(i) = index(i) * grid_step;
        const double val = obj(x);
        if (val > best_value) {
            best_value = val;
            best = x;
            best_index = index;
        }
    };
    if (k == 1) {
        for (int i = -n; i <= n; ++i) {
            index(0) = i;
            visit();
        }
    } else {
        for (int i = -n; i <= n; ++i)
            for (int j = -n; j <= n; ++j) {
                index << i, j;
                visit();
            }
    }
    if (best_index.cwiseAbs().maxCoeff() == n)
        throw RadiusTooSmall("X1 argmax lies on the grid boundary at radius " + format_number(grid_radius));

    // The objective is concave, so cyclic one-dimensional maximisation converges.
    double width = grid_step;
    for (int sweep = 0; sweep < 500; ++sweep) {
        const Eigen::VectorXd before = best;
        for (int i = 0; i < k; ++i) {
            Eigen::VectorXd y = best;
            best(i) = golden_max(
                [&](double t) {
                    y(i) = t;
                    return obj(y);
                },
                best(i) - width, best(i) + width);
        }
        const double move = (best - before).cwiseAbs().maxCoeff();
        if (move < 1e-13 * (1.0 + best.cwiseAbs().maxCoeff())) break;
        width = std::max(4.0 * move, 1e-10 * (1.0 + best.cwiseAbs().maxCoeff()));
    }
    Eigen::VectorXd c = Eigen::VectorXd::Zero(params.eigen().dim());
    c.head(k) = best;
    return Field(params.basis(), Coeffs{std::move(c)});
}

SphereEstimate brute_force_sphere_min(const FucikParams& params, int n_angles) {
    if (n_angles < 1) throw InvalidArgument("n_angles must be positive");
    const EigenBasis& b = params.eigen();
    const int k = params.k();
    if (b.dim() < k + 2) throw InvalidArgument("sphere oracle needs two X2 modes");
    SphereEstimate out;
    out.m_estimate = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_angles; ++i) {
        const double angle = 2.0 * std::numbers::pi * i / n_angles;
        Eigen::VectorXd c = Eigen::VectorXd::Zero(b.dim());
        c(k) = std::cos(angle);
        c(k + 1) = std::sin(angle);
        const Field v(params.basis(), Coeffs{std::move(c)});
        double radius = 1.0;
        Field u;
        for (;;) {
            try {
                u = brute_force_max_X1(params, v, radius, radius / 20.0);
                break;
            } catch (const RadiusTooSmall&) {
                radius *= 4.0;
                if (radius > 1e12) throw;
            }
        }
        const double value = X1Objective(params, v)(u.coeffs().head(k));
        // Earliest angle wins ties up to rounding.
        if (value < out.m_estimate - 1e-14 * (1.0 + std::abs(value))) {
            out.m_estimate = value;
            out.v_estimate = v;
            out.angle = angle;
        }
    }
    return out;
}

} // namespace fucik
