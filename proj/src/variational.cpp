#include "fucik/variational.hpp"

#include "fucik/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace fucik {

void JumpingPotential::accumulate(const Eigen::VectorXd& samples, int order, PotentialEval& out) const {
    const Eigen::VectorXd& w = grid_->weights();
    const Eigen::VectorXd pos = samples.cwiseMax(0.0);
    const Eigen::VectorXd neg = (-samples).cwiseMax(0.0);
    out.value -= 0.5 * (alpha_ * w.dot(pos.cwiseAbs2()) + beta_ * w.dot(neg.cwiseAbs2()));
    if (order >= 1) out.gradient -= grid_->project(alpha_ * pos - beta_ * neg);
    if (order >= 2) {
        Eigen::VectorXd rho(samples.size());
        for (Eigen::Index p = 0; p < samples.size(); ++p) rho(p) = samples(p) >= 0.0 ? -alpha_ : -beta_;
        out.hessian += grid_->weighted_mass(rho);
    }
}

PotentialEval JumpingPotential::evaluate(const Eigen::VectorXd& nodal, int order) const {
    PotentialEval out;
    const Eigen::Index n = nodal.size();
    if (order >= 1) out.gradient = Eigen::VectorXd::Zero(n);
    if (order >= 2) out.hessian = Tridiagonal(n);
    accumulate(grid_->sample(nodal), order, out);
    return out;
}

std::pair<double, double> sign_masses(const SampleGrid& grid, const Eigen::VectorXd& nodal) {
    const Eigen::VectorXd s = grid.sample(nodal);
    return {grid.integrate(s.cwiseMax(0.0).cwiseAbs2()), grid.integrate((-s).cwiseMax(0.0).cwiseAbs2())};
}

Evaluated evaluate_functional(const EigenBasis& basis, const Potential& p, Eigen::VectorXd coeffs, int order) {
    if (coeffs.size() != basis.dim()) throw DimensionMismatch(basis.dim(), coeffs.size());
    Evaluated e;
    e.nodal = basis.vectors() * coeffs;
    PotentialEval pe = p.evaluate(e.nodal, order);
    const Eigen::VectorXd lc = basis.eigenvalues().cwiseProduct(coeffs);
    e.value = 0.5 * coeffs.dot(lc) + pe.value;
    if (order >= 1) e.gradient = lc + basis.vectors().transpose() * pe.gradient;
    if (order >= 2) e.curvature = std::move(pe.hessian);
    e.coeffs = std::move(coeffs);
    return e;
}

Eigen::MatrixXd full_hessian(const EigenBasis& basis, const Tridiagonal& curvature) {
    const Eigen::MatrixXd& phi = basis.vectors();
    Eigen::MatrixXd h = phi.transpose() * curvature.apply(phi);
    h.diagonal() += basis.eigenvalues();
    return 0.5 * (h + h.transpose());
}

HessianBlocks hessian_blocks(const EigenBasis& basis, const Tridiagonal& curvature) {
    const Eigen::MatrixXd h = full_hessian(basis, curvature);
    const int k = basis.k();
    const int m = basis.dim() - k;
    return {h.topLeftCorner(k, k), h.bottomLeftCorner(m, k), h.bottomRightCorner(m, m)};
}

namespace {

Eigen::MatrixXd x1_hessian(const EigenBasis& basis, const Tridiagonal& curvature) {
    const auto phi1 = basis.x1_vectors();
    Eigen::MatrixXd h = phi1.transpose() * curvature.apply(phi1);
    h.diagonal() += basis.eigenvalues().head(basis.k());
    return 0.5 * (h + h.transpose());
}

// Ascent direction solving (-H + mu I) d = g with mu making -H + mu I positive definite.
Eigen::VectorXd ascent_direction(const Eigen::MatrixXd& h, const Eigen::VectorXd& g, double scale) {
    const Eigen::MatrixXd neg = -h;
    Eigen::LLT<Eigen::MatrixXd> llt(neg);
    if (llt.info() == Eigen::Success) return llt.solve(g);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(neg);
    const double mu = -es.eigenvalues().minCoeff() + 1e-3 * scale;
    Eigen::MatrixXd shifted = neg;
    shifted.diagonal().array() += mu;
    return shifted.llt().solve(g);
}

} // namespace

X1Maximum maximize_x1(const EigenBasis& basis, const Potential& p, const Eigen::VectorXd& v_coeffs,
                      double tol_grad, const Eigen::VectorXd* warm_start, int max_iter) {
    const int k = basis.k();
    const int n = basis.dim();
    if (v_coeffs.size() != n - k) throw DimensionMismatch(n - k, v_coeffs.size());
    const Eigen::VectorXd lambda1 = basis.eigenvalues().head(k);

    const auto at = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd c(n);
        c.head(k) = x;
        c.tail(n - k) = v_coeffs;
        return evaluate_functional(basis, p, std::move(c), 2);
    };

    Eigen::VectorXd x = Eigen::VectorXd::Zero(k);
    if (warm_start) {
        if (warm_start->size() != k) throw DimensionMismatch(k, warm_start->size());
        x = *warm_start;
    }
    X1Maximum out;
    out.delta_eff = std::numeric_limits<double>::infinity();
    Evaluated cur = at(x);
    bool polished = false;

    const auto newton_step = [&](const Evaluated& e) {
        return ascent_direction(x1_hessian(basis, e.curvature), e.gradient.head(k), basis.lambda_k1());
    };
    const auto record_pair = [&](const Evaluated& a, const Evaluated& b) {
        const Eigen::VectorXd dx = b.coeffs.head(k) - a.coeffs.head(k);
        const double den = dx.dot(lambda1.cwiseProduct(dx));
        if (den <= 0.0) return;
        const double num = (b.gradient.head(k) - a.gradient.head(k)).dot(dx);
        out.delta_eff = std::min(out.delta_eff, -num / den);
    };

    int it = 0;
    for (; it < max_iter; ++it) {
        const double res = cur.gradient.head(k).norm();
        if (res <= tol_grad) {
            if (polished || res == 0.0) break;
            // One extra full Newton step: the functional is piecewise quadratic, so
            // this usually lands on the exact maximiser.
            polished = true;
            Evaluated trial = at(cur.coeffs.head(k) + newton_step(cur));
            if (trial.gradient.head(k).norm() < res && trial.value >= cur.value - 1e-14 * (1.0 + std::abs(cur.value))) {
                record_pair(cur, trial);
                cur = std::move(trial);
            }
            break;
        }
        const Eigen::VectorXd d = newton_step(cur);
        const Eigen::VectorXd x0 = cur.coeffs.head(k);
        const double slope = cur.gradient.head(k).dot(d);
        const double slack = 1e-15 * (1.0 + std::abs(cur.value));
        bool accepted = false;
        // The restriction to the search line is concave and piecewise quadratic:
        // take the full step unless it overshoots, else locate the zero of the
        // directional derivative by Illinois regula falsi.
        {
            Evaluated trial = at(x0 + d);
            double d1 = trial.gradient.head(k).dot(d);
            if (d1 < 0.0) {
                double ta = 0.0, fa = slope, tb = 1.0, fb = d1;
                int side = 0;
                for (int ls = 0; ls < 100; ++ls) {
                    const double t = (ta * fb - tb * fa) / (fb - fa);
                    trial = at(x0 + t * d);
                    d1 = trial.gradient.head(k).dot(d);
                    if (std::abs(d1) <= 1e-3 * tol_grad * d.norm() || tb - ta <= 1e-15 * tb) break;
                    if (d1 > 0.0) {
                        ta = t;
                        fa = d1;
                        if (side == 1) fb *= 0.5;
                        side = 1;
                    } else {
                        tb = t;
                        fb = d1;
                        if (side == -1) fa *= 0.5;
                        side = -1;
                    }
                }
            }
            // Near the maximiser the value gain drops below its rounding error, so
            // a smaller gradient also counts as progress.
            if (trial.value >= cur.value - slack || trial.gradient.head(k).norm() < 0.5 * res) {
                record_pair(cur, trial);
                cur = std::move(trial);
                accepted = true;
            }
        }
        double t = 0.5;
        for (int ls = 0; ls < 60 && !accepted; ++ls, t *= 0.5) {
            const Eigen::VectorXd xt = x0 + t * d;
            if (xt == x0) break;
            Evaluated trial = at(xt);
            if (trial.value >= cur.value + 1e-4 * t * slope - slack) {
                record_pair(cur, trial);
                cur = std::move(trial);
                accepted = true;
            }
        }
        if (!accepted) break;
    }
    out.residual = cur.gradient.head(k).norm();
    out.iterations = it;
    if (!(out.residual <= tol_grad)) throw MaxIterations("X1 maximisation", cur.coeffs.head(k), out.residual, it);
    out.point = std::move(cur);
    return out;
}

} // namespace fucik
