#include "fucik/fucik.hpp"

#include "fucik/errors.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace fucik {

Tolerances Tolerances::defaults(const EigenBasis& basis) {
    const double l = basis.lambda_k1();
    return {1e-9 * (1.0 + l), 1e-8 * l, 1e-6 * l};
}

FucikParams::FucikParams(BasisPtr basis, double alpha, double beta)
    : basis_(std::move(basis)), alpha_(alpha), beta_(beta) {
    if (!basis_) throw InvalidArgument("Fucik parameters need a basis");
    if (!std::isfinite(alpha) || !std::isfinite(beta)) throw InvalidArgument("alpha and beta must be finite");
    if (!(alpha > basis_->lambda_k() && alpha <= basis_->lambda_k1()))
        throw InvalidArgument("alpha must lie in (lambda_k, lambda_{k+1}]");
    if (beta < alpha) throw InvalidArgument("beta < alpha: use swap()");
}

double eval_J(const FucikParams& params, const Field& u) {
    const JumpingPotential p = params.potential();
    return evaluate_functional(params.eigen(), p, u.coeffs(), 0).value;
}

Field grad_J(const FucikParams& params, const Field& u) {
    const JumpingPotential p = params.potential();
    return Field(params.basis(), Coeffs{evaluate_functional(params.eigen(), p, u.coeffs(), 1).gradient});
}

double fucik_residual(const BasisPtr& basis, double alpha, double beta, const Field& w) {
    const JumpingPotential p(basis->grid(), alpha, beta);
    return evaluate_functional(*basis, p, w.coeffs(), 1).gradient.norm();
}

namespace {

Eigen::VectorXd x2_part(const FucikParams& params, const Field& v) {
    const int k = params.k();
    const double scale = 1.0 + v.l2_norm();
    if (v.coeffs().head(k).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw InvalidArgument("argument must lie in X2");
    return v.coeffs().tail(v.dim() - k);
}

Field x1_field(const FucikParams& params, const Eigen::VectorXd& coeffs) {
    Eigen::VectorXd c = coeffs;
    c.tail(c.size() - params.k()).setZero();
    return Field(params.basis(), Coeffs{std::move(c)});
}

} // namespace

X1Result maximize_X1_report(const FucikParams& params, const Field& v, const Tolerances& tol) {
    const JumpingPotential p = params.potential();
    const X1Maximum r = maximize_x1(params.eigen(), p, x2_part(params, v), tol.grad);
    return {x1_field(params, r.point.coeffs), r.iterations, r.residual, r.delta_eff};
}

Field maximize_X1(const FucikParams& params, const Field& v) {
    return maximize_X1_report(params, v, Tolerances::defaults(params.eigen())).u;
}

double eval_J_tilde(const FucikParams& params, const Field& v) {
    const JumpingPotential p = params.potential();
    return maximize_x1(params.eigen(), p, x2_part(params, v), Tolerances::defaults(params.eigen()).grad).point.value;
}

Field grad_J_tilde(const FucikParams& params, const Field& v) {
    const JumpingPotential p = params.potential();
    Eigen::VectorXd g =
        maximize_x1(params.eigen(), p, x2_part(params, v), Tolerances::defaults(params.eigen()).grad).point.gradient;
    g.head(params.k()).setZero();
    return Field(params.basis(), Coeffs{std::move(g)});
}

namespace {

struct SphereState {
    Eigen::VectorXd v; // X2 coefficients, unit norm
    X1Maximum red;
    double value() const { return red.point.value; }
};

struct SphereRun {
    SphereState state;
    double tangent_grad = 0.0;
    int iterations = 0;
    bool converged = false;
};

class SphereSolver {
public:
    SphereSolver(const FucikParams& params, const Tolerances& tol, int max_iter)
        : params_(params), basis_(params.eigen()), pot_(params.potential()), tol_(tol), max_iter_(max_iter),
          k_(basis_.k()), m_(basis_.dim() - basis_.k()) {}

    SphereRun run(Eigen::VectorXd v0) const {
        SphereRun out;
        out.state = at(v0 / v0.norm(), nullptr);
        for (int it = 0; it < max_iter_; ++it) {
            const SphereState& cur = out.state;
            const Eigen::VectorXd g = cur.red.point.gradient.tail(m_);
            const Eigen::VectorXd gt = g - cur.v.dot(g) * cur.v;
            out.tangent_grad = gt.norm();
            out.iterations = it;
            if (out.tangent_grad <= tol_.grad) {
                out.converged = true;
                return out;
            }
            bool moved = false;
            for (int attempt = 0; attempt < 2 && !moved; ++attempt) {
                const Eigen::VectorXd d = attempt == 0 ? newton_direction(cur, g, gt) : gradient_direction(cur, gt);
                if (d.size() == 0) continue;
                const double slope = gt.dot(d);
                if (!(slope < 0.0)) continue;
                double t = 1.0;
                for (int ls = 0; ls < 50; ++ls, t *= 0.5) {
                    const Eigen::VectorXd cand = cur.v + t * d;
                    const Eigen::VectorXd warm = cur.red.point.coeffs.head(k_);
                    SphereState trial = at(cand / cand.norm(), &warm);
                    if (trial.value() <= cur.value() + 1e-4 * t * slope + 1e-15 * (1.0 + std::abs(cur.value()))) {
                        out.state = std::move(trial);
                        moved = true;
                        break;
                    }
                }
            }
            if (!moved) break;
        }
        const Eigen::VectorXd g = out.state.red.point.gradient.tail(m_);
        out.tangent_grad = (g - out.state.v.dot(g) * out.state.v).norm();
        out.converged = out.tangent_grad <= tol_.grad;
        return out;
    }

    SphereState at(Eigen::VectorXd v, const Eigen::VectorXd* warm) const {
        SphereState s;
        s.red = maximize_x1(basis_, pot_, v, tol_.grad, warm);
        s.v = std::move(v);
        return s;
    }

private:
    // Riemannian Newton step on the tangent space, using the Schur complement of
    // the generalised Hessian as the Hessian of J~.
    Eigen::VectorXd newton_direction(const SphereState& s, const Eigen::VectorXd& g, const Eigen::VectorXd& gt) const {
        if (m_ < 2) return {};
        const HessianBlocks hb = hessian_blocks(basis_, s.red.point.curvature);
        Eigen::LLT<Eigen::MatrixXd> neg11(-hb.h11);
        if (neg11.info() != Eigen::Success) return {};
        Eigen::MatrixXd hr = hb.h22 + hb.h21 * neg11.solve(hb.h21.transpose());
        hr.diagonal().array() -= s.v.dot(g);

        // Householder reflector P with P v = -sign(v_0) e_0; columns 1.. of P span
        // the tangent space.
        Eigen::VectorXd u = s.v;
        u(0) += (s.v(0) >= 0.0 ? 1.0 : -1.0);
        const double uu = u.squaredNorm();
        const Eigen::RowVectorXd uth = u.transpose() * hr;
        hr.noalias() -= (2.0 / uu) * u * uth;
        const Eigen::VectorXd hu = hr * u;
        hr.noalias() -= (2.0 / uu) * hu * u.transpose();
        const Eigen::VectorXd pg = gt - (2.0 * u.dot(gt) / uu) * u;

        const Eigen::MatrixXd ht = 0.5 * (hr.bottomRightCorner(m_ - 1, m_ - 1) +
                                         hr.bottomRightCorner(m_ - 1, m_ - 1).transpose());
        Eigen::LLT<Eigen::MatrixXd> llt(ht);
        if (llt.info() != Eigen::Success) return {};
        Eigen::VectorXd dq = Eigen::VectorXd::Zero(m_);
        dq.tail(m_ - 1) = -llt.solve(pg.tail(m_ - 1));
        return dq - (2.0 * u.dot(dq) / uu) * u;
    }

    Eigen::VectorXd gradient_direction(const SphereState& s, const Eigen::VectorXd& gt) const {
        const Eigen::VectorXd pg = gt.cwiseQuotient(basis_.eigenvalues().tail(m_)) * basis_.lambda_k1();
        return -(pg - s.v.dot(pg) * s.v);
    }

    const FucikParams& params_;
    const EigenBasis& basis_;
    JumpingPotential pot_;
    Tolerances tol_;
    int max_iter_;
    int k_;
    int m_;
};

std::vector<std::pair<std::string, Eigen::VectorXd>> sphere_starts(const EigenBasis& basis, int count,
                                                                   std::uint64_t seed) {
    const int k = basis.k();
    const int m = basis.dim() - k;
    std::vector<std::pair<std::string, Eigen::VectorXd>> out;
    const auto unit = [m](int j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
        e(j) = 1.0;
        return e;
    };
    const std::string n1 = "phi_" + std::to_string(k + 1);
    const std::string n2 = "phi_" + std::to_string(k + 2);
    if (count >= 1) out.emplace_back("+" + n1, unit(0));
    if (count >= 2) out.emplace_back("-" + n1, -unit(0));
    if (m >= 2 && count >= 3) out.emplace_back("+" + n2, unit(1));
    if (m >= 2 && count >= 4) out.emplace_back("-" + n2, -unit(1));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int r = 1; static_cast<int>(out.size()) < count; ++r) {
        Eigen::VectorXd v(m);
        for (int j = 0; j < m; ++j) v(j) = nd(rng) * basis.lambda_k1() / basis.lambda(k + 1 + j);
        out.emplace_back("random#" + std::to_string(r), v / v.norm());
    }
    return out;
}

} // namespace

FucikPoint minimize_sphere(const FucikParams& params, const SphereOptions& options) {
    const EigenBasis& basis = params.eigen();
    const Tolerances tol = options.tol.value_or(Tolerances::defaults(basis));
    const int k = basis.k();
    const int n = basis.dim();
    if (options.starts < 1) throw InvalidArgument("minimize_sphere needs at least one start");
    const SphereSolver solver(params, tol, options.max_iterations);

    std::vector<SphereRun> runs;
    FucikPoint point;
    point.alpha = params.alpha();
    point.beta = params.beta();
    for (auto& [label, v0] : sphere_starts(basis, options.starts, options.seed)) {
        SphereRun r = solver.run(v0);
        point.starts.push_back({label, r.state.value(), r.tangent_grad, r.iterations, r.converged});
        runs.push_back(std::move(r));
    }

    double best_value = std::numeric_limits<double>::infinity();
    for (const SphereRun& r : runs)
        if (r.converged) best_value = std::min(best_value, r.state.value());
    if (!std::isfinite(best_value)) {
        const auto worst = std::min_element(runs.begin(), runs.end(), [](const SphereRun& a, const SphereRun& b) {
            return a.tangent_grad < b.tangent_grad;
        });
        throw MaxIterations("sphere minimisation", worst->state.v, worst->tangent_grad, worst->iterations);
    }

    // Among minima within tol.m of the best: smallest int (w-)^2, then start order.
    std::size_t chosen = runs.size();
    double chosen_qm = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (!runs[i].converged || runs[i].state.value() > best_value + tol.m) continue;
        const double qm = sign_masses(basis.grid(), runs[i].state.red.point.nodal).second;
        if (qm < chosen_qm - 1e-12 * (1.0 + qm)) {
            chosen = i;
            chosen_qm = qm;
        }
        const Eigen::VectorXd& vi = runs[i].state.v;
        bool seen = false;
        for (const Field& f : point.distinct_minima)
            if ((f.coeffs().tail(n - k) - vi).norm() <= 1e-6) seen = true;
        if (!seen) {
            Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
            c.tail(n - k) = vi;
            point.distinct_minima.emplace_back(params.basis(), Coeffs{std::move(c)});
        }
    }

    const SphereRun& best = runs[chosen];
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    c.tail(n - k) = best.state.v;
    point.minimizer = Field(params.basis(), Coeffs{std::move(c)});
    point.m_value = best.state.value();
    point.tangent_grad = best.tangent_grad;
    point.iterations = best.iterations;
    if (std::abs(point.m_value) <= tol.m)
        point.eigenfunction = Field(params.basis(), Coeffs{best.state.red.point.coeffs});
    return point;
}

namespace {

struct MSample {
    double beta;
    FucikPoint point;
    double m() const { return point.m_value; }
};

} // namespace

BetaResult beta_of_alpha(double alpha, const BasisPtr& basis, const SphereOptions& options) {
    if (!basis) throw InvalidArgument("beta_of_alpha needs a basis");
    const Tolerances tol = options.tol.value_or(Tolerances::defaults(*basis));
    const double lk = basis->lambda_k();
    const double lk1 = basis->lambda_k1();
    const double beta_max = 50.0 * lk1;
    BetaResult result;

    const auto sample = [&](double beta) {
        ++result.m_evaluations;
        return MSample{beta, minimize_sphere(FucikParams(basis, alpha, beta), options)};
    };
    const auto finish = [&](MSample s, double lo, double hi) {
        result.status = BetaStatus::Found;
        result.bracket_lo = lo;
        result.bracket_hi = hi;
        if (!s.point.eigenfunction) {
            Field v = s.point.minimizer;
            const FucikParams p(basis, alpha, s.beta);
            s.point.eigenfunction = maximize_X1(p, v) + v;
        }
        result.point = std::move(s.point);
        return result;
    };

    MSample lo = sample(lk1);
    if (lo.m() <= tol.m) return finish(std::move(lo), lk1, lk1);

    double width = lk1 - lk;
    MSample hi = lo;
    for (;;) {
        const double b = std::min(lo.beta + width, beta_max);
        hi = sample(b);
        if (hi.m() < 0.0) break;
        if (b >= beta_max) {
            result.status = BetaStatus::NoRoot;
            result.bracket_lo = lo.beta;
            result.bracket_hi = beta_max;
            result.point = std::move(hi.point);
            return result;
        }
        lo = std::move(hi);
        width *= 2.0;
    }

    // Safeguarded Newton on beta, using dm/dbeta = -1/2 int (w-)^2 at the minimiser.
    const auto slope = [&](const MSample& s) {
        const FucikParams p(basis, alpha, s.beta);
        const Field w = maximize_X1(p, s.point.minimizer) + s.point.minimizer;
        return -0.5 * sign_masses(basis->grid(), w.nodal()).second;
    };
    MSample cur = std::abs(lo.m()) < std::abs(hi.m()) ? lo : hi;
    for (int it = 0; it < 80; ++it) {
        if (std::abs(cur.m()) <= tol.m) {
            // Certify the root with a bracket of width below tol.beta.
            const double a = std::max(lo.beta, cur.beta - 0.4 * tol.beta);
            const double b = std::min(hi.beta, cur.beta + 0.4 * tol.beta);
            MSample sa = a == lo.beta ? lo : sample(a);
            MSample sb = b == hi.beta ? hi : sample(b);
            if (sa.m() > 0.0 && sb.m() < 0.0) return finish(std::move(cur), a, b);
            if (sa.m() > 0.0) lo = std::move(sa);
            if (sb.m() < 0.0) hi = std::move(sb);
        }
        double next = std::numeric_limits<double>::quiet_NaN();
        const double d = slope(cur);
        if (d < 0.0) next = cur.beta - cur.m() / d;
        if (!(next > lo.beta && next < hi.beta)) next = 0.5 * (lo.beta + hi.beta);
        if (hi.beta - lo.beta <= 0.5 * tol.beta) next = 0.5 * (lo.beta + hi.beta);
        MSample s = sample(next);
        // The bracket ends keep strict signs; an exact zero only becomes the current point.
        if (s.m() > 0.0) lo = s;
        else if (s.m() < 0.0) hi = s;
        cur = std::move(s);
        if (hi.beta - lo.beta <= 1e-15 * hi.beta) break;
    }
    throw BracketExhausted(hi.beta, hi.m());
}

std::vector<double> chebyshev_nodes(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = std::cos((2.0 * (n - 1 - i) + 1.0) * std::numbers::pi / (2.0 * n));
        out[static_cast<std::size_t>(i)] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * t;
    }
    return out;
}

CurveBranch trace_curve(const BasisPtr& basis, const TraceOptions& options) {
    if (!basis) throw InvalidArgument("trace_curve needs a basis");
    if (options.n_samples < 3) throw InvalidArgument("trace_curve needs at least 3 samples");
    if (!(options.window_lo >= 0.0 && options.window_lo < options.window_hi && options.window_hi <= 1.0))
        throw InvalidArgument("alpha window must satisfy 0 <= lo < hi <= 1");
    CurveBranch branch;
    branch.k = basis->k();
    branch.tol = options.sphere.tol.value_or(Tolerances::defaults(*basis));
    const double lk = basis->lambda_k();
    const double gap = basis->gap();
    for (double alpha : chebyshev_nodes(lk + options.window_lo * gap, lk + options.window_hi * gap, options.n_samples)) {
        CurveSample cs;
        cs.alpha = alpha;
        try {
            BetaResult r = beta_of_alpha(alpha, basis, options.sphere);
            cs.iterations = r.m_evaluations;
            if (r.status == BetaStatus::NoRoot) {
                cs.ok = false;
                cs.beta = std::numeric_limits<double>::quiet_NaN();
                cs.m_residual = r.point.m_value;
                cs.failure = "no root below beta_max";
            } else {
                cs.beta = r.point.beta;
                cs.m_residual = r.point.m_value;
                if (options.keep_points) cs.point = std::move(r.point);
            }
        } catch (const Error& e) {
            cs.ok = false;
            cs.beta = std::numeric_limits<double>::quiet_NaN();
            cs.failure = e.what();
        }
        branch.samples.push_back(std::move(cs));
    }

    const CurveSample* prev = nullptr;
    for (CurveSample& cs : branch.samples) {
        if (!cs.ok) continue;
        if (!(cs.beta > basis->lambda_k1()) && cs.alpha < basis->lambda_k1()) {
            cs.ok = false;
            cs.failure = "beta not above lambda_{k+1}";
            continue;
        }
        if (prev) {
            if (!(cs.beta < prev->beta)) {
                cs.ok = false;
                cs.failure = "beta not decreasing";
                continue;
            }
            branch.lipschitz = std::max(branch.lipschitz, std::abs((cs.beta - prev->beta) / (cs.alpha - prev->alpha)));
        }
        prev = &cs;
    }
    return branch;
}

FucikPoint swap(const FucikPoint& point) {
    FucikPoint out = point;
    std::swap(out.alpha, out.beta);
    if (!out.minimizer.empty()) out.minimizer = -out.minimizer;
    if (out.eigenfunction) out.eigenfunction = -*out.eigenfunction;
    for (Field& f : out.distinct_minima) f = -f;
    return out;
}

CurveBranch swap(const CurveBranch& branch) {
    CurveBranch out = branch;
    out.swapped = !branch.swapped;
    for (CurveSample& s : out.samples) {
        std::swap(s.alpha, s.beta);
        if (s.point) s.point = swap(*s.point);
    }
    std::stable_sort(out.samples.begin(), out.samples.end(),
                     [](const CurveSample& a, const CurveSample& b) {
                         if (std::isnan(a.alpha)) return false;
                         return std::isnan(b.alpha) || a.alpha < b.alpha;
                     });
    return out;
}

} // namespace fucik
