#include "fucik/semilinear.hpp"

#include "fucik/errors.hpp"

#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <array>
#include <cstdint>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <unordered_map>

namespace fucik {

// ---------------------------------------------------------------------------
// Antiderivatives

namespace {

double simpson_step(const Nonlinearity::Fn& f, double a, double fa, double m, double fm, double b, double fb,
                    double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_step(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const Nonlinearity::Fn& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    return simpson_step(f, a, fa, m, fm, b, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50);
}

constexpr double panel_tol = 1e-12;
constexpr std::size_t point_cache_limit = 1u << 18;
constexpr std::size_t block_cache_limit = 1u << 18;
// Unit cells up to 2^unit_levels; wider octaves beyond that are single panels.
constexpr int unit_levels = 20;
constexpr int cached_level = 6;

} // namespace

// F(t) sums aligned dyadic blocks of unit cells [n, n+1] on [0, floor|t|] plus the
// sub-unit remainder. A block is always the sum of its two halves, so its value is
// a pure function of its position and the result does not depend on query order.
// Beyond 2^20 each octave [2^i, 2^(i+1)] is one adaptive panel.
struct Nonlinearity::Cache {
    std::mutex mutex;
    std::map<std::tuple<int, int, std::int64_t>, double> blocks; // (sign, level, index)
    std::map<std::pair<int, int>, double> panels;                // (sign, octave)
    std::unordered_map<double, double> points;
};

double Nonlinearity::df(double t) const {
    if (df_) return df_(t);
    const double h = 1e-6 * (1.0 + std::abs(t));
    return (f_(t + h) - f_(t - h)) / (2.0 * h);
}

double Nonlinearity::F(double t) const {
    if (F_) return F_(t);
    if (t == 0.0) return 0.0;
    {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        const auto it = cache_->points.find(t);
        if (it != cache_->points.end()) return it->second;
    }
    const int sign = t > 0.0 ? 1 : -1;
    const double at = std::abs(t);
    const double tol = panel_tol * (1.0 + bound_);
    const auto block = [&](auto&& self, int level, std::int64_t index) -> double {
        if (level == 0) {
            const double lo = static_cast<double>(index);
            return adaptive_simpson(f_, sign * lo, sign * (lo + 1.0), tol);
        }
        const auto key = std::make_tuple(sign, level, index);
        if (level >= cached_level) {
            std::lock_guard<std::mutex> lock(cache_->mutex);
            const auto it = cache_->blocks.find(key);
            if (it != cache_->blocks.end()) return it->second;
        }
        const double v = self(self, level - 1, 2 * index) + self(self, level - 1, 2 * index + 1);
        if (level >= cached_level) {
            std::lock_guard<std::mutex> lock(cache_->mutex);
            if (cache_->blocks.size() >= block_cache_limit) cache_->blocks.clear();
            cache_->blocks.emplace(key, v);
        }
        return v;
    };
    const auto panel = [&](int i) {
        {
            std::lock_guard<std::mutex> lock(cache_->mutex);
            const auto it = cache_->panels.find({sign, i});
            if (it != cache_->panels.end()) return it->second;
        }
        const double lo = std::ldexp(1.0, i);
        const double hi = std::ldexp(1.0, i + 1);
        const double v = adaptive_simpson(f_, sign * lo, sign * hi, tol * (hi - lo));
        std::lock_guard<std::mutex> lock(cache_->mutex);
        cache_->panels.emplace(std::make_pair(sign, i), v);
        return v;
    };
    double value = 0.0;
    const double unit_end = std::ldexp(1.0, unit_levels);
    if (at <= unit_end) {
        const auto whole = static_cast<std::int64_t>(std::floor(at));
        std::int64_t pos = 0;
        for (int level = unit_levels; level >= 0; --level) {
            const std::int64_t size = std::int64_t{1} << level;
            if (whole & size) {
                value += block(block, level, pos >> level);
                pos += size;
            }
        }
        const double base = static_cast<double>(whole);
        value += adaptive_simpson(f_, sign * base, t, tol * (at - base));
    } else {
        value = block(block, unit_levels, 0);
        const int top = std::ilogb(at);
        for (int i = unit_levels; i < top; ++i) value += panel(i);
        const double base = std::ldexp(1.0, top);
        value += adaptive_simpson(f_, sign * base, t, tol * (at - base));
    }
    std::lock_guard<std::mutex> lock(cache_->mutex);
    if (cache_->points.size() >= point_cache_limit) cache_->points.clear();
    cache_->points.emplace(t, value);
    return value;
}

// ---------------------------------------------------------------------------
// Builtins

Nonlinearity Nonlinearity::zero() {
    Nonlinearity n;
    n.name_ = "zero";
    n.f_ = [](double) { return 0.0; };
    n.df_ = [](double) { return 0.0; };
    n.F_ = [](double) { return 0.0; };
    n.f_left_ = 0.0;
    n.f_right_ = 0.0;
    n.cache_ = std::make_shared<Cache>();
    return n;
}

Nonlinearity Nonlinearity::tanh() {
    Nonlinearity n;
    n.name_ = "tanh";
    n.f_ = [](double t) { return std::tanh(t); };
    n.df_ = [](double t) {
        const double c = std::cosh(t);
        return std::isfinite(c) ? 1.0 / (c * c) : 0.0;
    };
    n.F_ = [](double t) {
        const double a = std::abs(t);
        return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
    };
    n.bound_ = 1.0;
    n.f_left_ = -1.0;
    n.f_right_ = 1.0;
    n.cache_ = std::make_shared<Cache>();
    return n;
}

Nonlinearity Nonlinearity::atan_scaled(double amplitude, double rate) {
    if (!std::isfinite(amplitude) || !(rate > 0.0) || !std::isfinite(rate))
        throw InvalidArgument("atan_scaled needs a finite amplitude and a positive rate");
    Nonlinearity n;
    n.name_ = "atan_scaled";
    n.params_ = {amplitude, rate};
    const double c = amplitude * 2.0 / std::numbers::pi;
    n.f_ = [c, rate](double t) { return c * std::atan(rate * t); };
    n.df_ = [c, rate](double t) { return c * rate / (1.0 + rate * rate * t * t); };
    n.F_ = [c, rate](double t) {
        const double rt = rate * t;
        return c * (t * std::atan(rt) - 0.5 * std::log1p(rt * rt) / rate);
    };
    n.bound_ = std::abs(amplitude);
    n.f_left_ = -amplitude;
    n.f_right_ = amplitude;
    n.cache_ = std::make_shared<Cache>();
    return n;
}

Nonlinearity Nonlinearity::bounded_poly_clip(std::vector<double> coeffs, double clip) {
    if (coeffs.empty()) throw InvalidArgument("bounded_poly_clip needs at least one coefficient");
    if (!(clip > 0.0) || !std::isfinite(clip)) throw InvalidArgument("bounded_poly_clip needs a positive clip");
    for (double c : coeffs)
        if (!std::isfinite(c)) throw InvalidArgument("bounded_poly_clip coefficients must be finite");
    Nonlinearity n;
    n.name_ = "bounded_poly_clip";
    n.params_ = coeffs;
    n.params_.push_back(clip);
    const auto poly = [coeffs](double t) {
        double v = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * t + *it;
        return v;
    };
    n.f_ = [poly, clip](double t) { return std::clamp(poly(t), -clip, clip); };
    n.df_ = [poly, coeffs, clip](double t) {
        if (std::abs(poly(t)) >= clip) return 0.0;
        double v = 0.0;
        for (std::size_t i = coeffs.size() - 1; i >= 1; --i) v = v * t + static_cast<double>(i) * coeffs[i];
        return v;
    };
    n.bound_ = clip;
    int degree = static_cast<int>(coeffs.size()) - 1;
    while (degree > 0 && coeffs[static_cast<std::size_t>(degree)] == 0.0) --degree;
    const double lead = coeffs[static_cast<std::size_t>(degree)];
    if (degree == 0) {
        n.f_left_ = n.f_right_ = std::clamp(lead, -clip, clip);
    } else {
        const double sr = lead > 0.0 ? 1.0 : -1.0;
        n.f_right_ = sr * clip;
        n.f_left_ = (degree % 2 == 0 ? sr : -sr) * clip;
    }
    n.cache_ = std::make_shared<Cache>();
    return n;
}

Nonlinearity Nonlinearity::table(std::vector<double> t, std::vector<double> f) {
    if (t.size() != f.size() || t.size() < 2) throw InvalidArgument("table needs matching abscissae and values, at least two");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(t[i]) || !std::isfinite(f[i])) throw InvalidArgument("table entries must be finite");
        if (i > 0 && !(t[i] > t[i - 1])) throw InvalidArgument("table abscissae must increase strictly");
    }
    Nonlinearity n;
    n.name_ = "table";
    n.params_ = t;
    n.params_.insert(n.params_.end(), f.begin(), f.end());
    // Cumulative integral from t[0] at each knot.
    std::vector<double> cum(t.size(), 0.0);
    for (std::size_t i = 1; i < t.size(); ++i) cum[i] = cum[i - 1] + 0.5 * (f[i] + f[i - 1]) * (t[i] - t[i - 1]);
    const auto segment = [t](double x) {
        const auto it = std::upper_bound(t.begin(), t.end(), x);
        return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - t.begin() - 1, 0, static_cast<std::ptrdiff_t>(t.size()) - 2));
    };
    const auto value = [t, f, segment](double x) {
        if (x <= t.front()) return f.front();
        if (x >= t.back()) return f.back();
        const std::size_t i = segment(x);
        const double w = (x - t[i]) / (t[i + 1] - t[i]);
        return f[i] + w * (f[i + 1] - f[i]);
    };
    const auto integral = [t, f, cum, segment, value](double x) {
        if (x <= t.front()) return f.front() * (x - t.front());
        if (x >= t.back()) return cum.back() + f.back() * (x - t.back());
        const std::size_t i = segment(x);
        return cum[i] + 0.5 * (f[i] + value(x)) * (x - t[i]);
    };
    const double at_zero = integral(0.0);
    n.f_ = value;
    n.df_ = [t, f, segment](double x) {
        if (x < t.front() || x > t.back()) return 0.0;
        const std::size_t i = segment(x);
        return (f[i + 1] - f[i]) / (t[i + 1] - t[i]);
    };
    n.F_ = [integral, at_zero](double x) { return integral(x) - at_zero; };
    n.bound_ = 0.0;
    for (double v : f) n.bound_ = std::max(n.bound_, std::abs(v));
    n.f_left_ = f.front();
    n.f_right_ = f.back();
    n.cache_ = std::make_shared<Cache>();
    return n;
}

Nonlinearity Nonlinearity::from_function(Fn f, double bound, std::optional<double> f_left,
                                         std::optional<double> f_right, Fn antiderivative, Fn derivative,
                                         std::string name) {
    if (!f) throw InvalidArgument("from_function needs a callable");
    if (!(bound >= 0.0) || !std::isfinite(bound)) throw InvalidArgument("bound must be finite and nonnegative");
    Nonlinearity n;
    n.name_ = std::move(name);
    n.f_ = std::move(f);
    n.F_ = std::move(antiderivative);
    n.df_ = std::move(derivative);
    n.bound_ = bound;
    n.f_left_ = f_left;
    n.f_right_ = f_right;
    n.cache_ = std::make_shared<Cache>();
    return n;
}

Nonlinearity Nonlinearity::with_limits(std::optional<double> f_left, std::optional<double> f_right) const {
    if ((f_left && !std::isfinite(*f_left)) || (f_right && !std::isfinite(*f_right)))
        throw InvalidArgument("limits must be finite");
    Nonlinearity n = *this;
    n.f_left_ = f_left;
    n.f_right_ = f_right;
    return n;
}

NonlinearityCheck check_nonlinearity(const Nonlinearity& f, int count, double range) {
    if (count < 4 || !(range > 1e-3)) throw InvalidArgument("probe grid needs at least 4 points and range > 1e-3");
    NonlinearityCheck out;
    out.vanishes_at_zero = std::abs(f.F(0.0)) <= 1e-14;
    const int half = count / 2;
    const double lo = std::log10(1e-3), hi = std::log10(range);
    const double bound = f.bound();
    for (int i = 0; i < half; ++i) {
        const double mag = std::pow(10.0, lo + (hi - lo) * i / std::max(1, half - 1));
        for (double t : {mag, -mag}) {
            const double v = f.f(t);
            const double excess = std::abs(v) - bound;
            out.worst_bound_excess = std::max(out.worst_bound_excess, excess);
            if (excess > 1e-12 * (1.0 + bound)) out.bounded = false;
            const double Ft = f.F(t);
            if (std::abs(Ft) > bound * std::abs(t) * (1.0 + 1e-9) + 1e-12) out.linear_growth = false;
            const double h = 1e-6 * (1.0 + std::abs(t));
            const double fd = (f.F(t + h) - f.F(t - h)) / (2.0 * h);
            const double err = std::abs(fd - v);
            out.worst_derivative_error = std::max(out.worst_derivative_error, err);
            if (err > 1e-4 * (1.0 + bound)) out.derivative_matches = false;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Problem and classification

std::string to_string(Regime r) {
    switch (r) {
    case Regime::Nonresonance: return "nonresonance";
    case Regime::Resonance: return "resonance";
    case Regime::OutOfScope: return "out_of_scope";
    }
    return "unknown";
}

std::string to_string(SaddleStatus s) {
    switch (s) {
    case SaddleStatus::Converged: return "converged";
    case SaddleStatus::MaxIterations: return "max_iterations";
    case SaddleStatus::DivergingRay: return "diverging_ray";
    }
    return "unknown";
}

SemilinearProblem::SemilinearProblem(FucikParams params_, Nonlinearity f, Field h_)
    : params(std::move(params_)), nonlinearity(std::move(f)), h(std::move(h_)) {
    if (h.empty()) h = Field::zero(params.basis());
    if (h.basis() != params.basis()) throw InvalidArgument("forcing h must live on the problem's basis");
}

double SemilinearProblem::tol_res() const { return 1e-8 * (1.0 + h.l2_norm() + nonlinearity.bound()); }

Classification classify(const FucikParams& params, const SphereOptions& options) {
    const Tolerances tol = options.tol.value_or(Tolerances::defaults(params.eigen()));
    Classification c;
    const BetaResult r = beta_of_alpha(params.alpha(), params.basis(), options);
    if (r.status == BetaStatus::NoRoot) {
        c.beta_curve = std::numeric_limits<double>::infinity();
        c.regime = params.beta() >= params.alpha() ? Regime::Nonresonance : Regime::OutOfScope;
        return c;
    }
    c.beta_curve = r.point.beta;
    c.curve_point = r.point;
    if (params.beta() < params.alpha()) c.regime = Regime::OutOfScope;
    else if (std::abs(params.beta() - c.beta_curve) <= tol.beta) c.regime = Regime::Resonance;
    else if (params.beta() < c.beta_curve) c.regime = Regime::Nonresonance;
    else c.regime = Regime::OutOfScope;
    return c;
}

Classification classify(const SemilinearProblem& problem, const SphereOptions& options) {
    return classify(problem.params, options);
}

// ---------------------------------------------------------------------------
// Energy

SemilinearPotential::SemilinearPotential(const SemilinearProblem& problem)
    : grid_(&problem.params.eigen().grid()), jump_(problem.params.potential()), f_(&problem.nonlinearity),
      mass_h_(problem.params.eigen().op().mass() * problem.h.nodal()) {}

PotentialEval SemilinearPotential::evaluate(const Eigen::VectorXd& nodal, int order) const {
    PotentialEval out;
    const Eigen::Index n = nodal.size();
    if (order >= 1) out.gradient = -mass_h_;
    if (order >= 2) out.hessian = Tridiagonal(n);
    out.value = -mass_h_.dot(nodal);
    const Eigen::VectorXd s = grid_->sample(nodal);
    jump_.accumulate(s, order, out);
    if (f_->identically_zero()) return out;
    const Eigen::Index p = s.size();
    Eigen::VectorXd big_f(p), small_f(p), slope(p);
    for (Eigen::Index i = 0; i < p; ++i) {
        big_f(i) = f_->F(s(i));
        if (order >= 1) small_f(i) = f_->f(s(i));
        if (order >= 2) slope(i) = -f_->df(s(i));
    }
    out.value -= grid_->integrate(big_f);
    if (order >= 1) out.gradient -= grid_->project(small_f);
    if (order >= 2) out.hessian += grid_->weighted_mass(slope);
    return out;
}

double eval_E(const SemilinearProblem& problem, const Field& u) {
    const SemilinearPotential p(problem);
    return evaluate_functional(problem.params.eigen(), p, u.coeffs(), 0).value;
}

Field grad_E(const SemilinearProblem& problem, const Field& u) {
    const SemilinearPotential p(problem);
    return Field(problem.basis(), Coeffs{evaluate_functional(problem.params.eigen(), p, u.coeffs(), 1).gradient});
}

ResidualReport residual_report(const SemilinearProblem& problem, const Field& u) {
    const EigenBasis& basis = problem.params.eigen();
    const SemilinearPotential p(problem);
    const Eigen::VectorXd r = basis.op().stiffness() * u.nodal() + p.evaluate(u.nodal(), 1).gradient;
    ResidualReport out;
    out.per_index = basis.vectors().transpose() * r;
    out.max = out.per_index.cwiseAbs().maxCoeff();
    return out;
}

// ---------------------------------------------------------------------------
// Landesman-Lazer check

std::vector<Field> fucik_eigenset(const FucikPoint& point) {
    std::vector<Field> out;
    const auto add = [&](const Field& w) {
        const double n = w.l2_norm();
        if (!(n > 0.0)) return;
        const Field u = w * (1.0 / n);
        for (const Field& e : out)
            if ((e - u).l2_norm() <= 1e-6) return;
        out.push_back(u);
    };
    if (point.eigenfunction) add(*point.eigenfunction);
    if (point.minimizer.empty()) return out;
    const FucikParams p(point.minimizer.basis(), point.alpha, point.beta);
    add(maximize_X1(p, point.minimizer) + point.minimizer);
    for (const Field& v : point.distinct_minima) add(maximize_X1(p, v) + v);
    return out;
}

GLLReport check_gll(const SemilinearProblem& problem, const std::vector<Field>& eigenset) {
    const Nonlinearity& f = problem.nonlinearity;
    if (!f.has_limits()) throw MissingLimits("check_gll needs both limits f_l and f_r of the nonlinearity");
    const double fl = *f.f_left(), fr = *f.f_right();
    const SampleGrid& grid = problem.params.eigen().grid();
    GLLReport rep;
    rep.satisfied = !eigenset.empty();
    for (const Field& v : eigenset) {
        const Eigen::VectorXd s = grid.sample(v.nodal());
        const double vp = grid.integrate(s.cwiseMax(0.0));
        const double vm = grid.integrate((-s).cwiseMax(0.0));
        const double hv = problem.h.dot(v);
        GLLEntry e;
        e.ray = fr * vp - fl * vm + hv;
        const double scale = std::abs(fr) * vp + std::abs(fl) * vm + std::abs(hv);
        const auto g = [&](double t) {
            Eigen::VectorXd big(s.size());
            for (Eigen::Index i = 0; i < s.size(); ++i) big(i) = f.F(t * s(i));
            return grid.integrate(big) + t * hv;
        };
        const std::array<double, 3> ts{1e2, 1e3, 1e4};
        double prev = g(ts[0]);
        for (std::size_t i = 1; i < ts.size(); ++i) {
            const double cur = g(ts[i]);
            RaySlope rs;
            rs.t = ts[i];
            rs.slope = (cur - prev) / (ts[i] - ts[i - 1]);
            rs.agrees = std::abs(rs.slope - e.ray) <= 0.02 * scale;
            if (!rs.agrees) rep.slopes_consistent = false;
            e.slopes.push_back(rs);
            prev = cur;
        }
        if (!(e.ray < -tol_gll)) rep.satisfied = false;
        rep.entries.push_back(std::move(e));
    }
    if (problem.params.alpha() == problem.params.beta() && !eigenset.empty()) {
        const Field& phi = eigenset.front();
        const Eigen::VectorXd s = grid.sample(phi.nodal());
        const double pp = grid.integrate(s.cwiseMax(0.0));
        const double pm = grid.integrate((-s).cwiseMax(0.0));
        DiagonalWindow w;
        w.lower = fr * pm - fl * pp;
        w.upper = fl * pm - fr * pp;
        w.value = problem.h.dot(phi);
        w.inside = w.lower < w.value && w.value < w.upper;
        rep.diagonal = w;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Saddle search

namespace {

constexpr double cauchy_tol = 1e-4;
constexpr int cauchy_window = 10;
constexpr double growth_factor = 10.0;

class SaddleSolver {
public:
    SaddleSolver(const SemilinearProblem& problem, const SolveOptions& options)
        : problem_(problem), options_(options), basis_(problem.params.eigen()), pot_(problem), k_(basis_.k()),
          n_(basis_.dim()), m_(n_ - k_), tol_res_(problem.tol_res()) {}

    SaddleResult run() {
        SaddleResult out;
        out.tol_res = tol_res_;
        out.delta_eff = std::numeric_limits<double>::infinity();
        Eigen::VectorXd c = Eigen::VectorXd::Zero(n_);
        bool diverged = false;
        const bool reduced_ok = reduced_descent(c, out, diverged);
        if (diverged) {
            finish(out, c, SaddleStatus::DivergingRay);
            return out;
        }
        if (!reduced_ok) {
            finish(out, c, SaddleStatus::MaxIterations);
            return out;
        }
        const bool ok = newton(c, out);
        finish(out, c, ok ? SaddleStatus::Converged : SaddleStatus::MaxIterations);
        if (out.status == SaddleStatus::Converged) {
            out.weak_form_residual = weak_form_check(c);
            if (out.weak_form_residual > tol_res_) out.status = SaddleStatus::MaxIterations;
            out.geometry = saddle_geometry();
        }
        return out;
    }

private:
    Evaluated full(const Eigen::VectorXd& c, int order) const { return evaluate_functional(basis_, pot_, c, order); }

    X1Maximum reduced(const Eigen::VectorXd& v, const Eigen::VectorXd* warm, SaddleResult& out) const {
        X1Maximum r = maximize_x1(basis_, pot_, v, 0.1 * tol_res_, warm);
        out.delta_eff = std::min(out.delta_eff, r.delta_eff);
        return r;
    }

    // Phase 1: minimise E^(v) = max_{X1} E(. + v) over X2 with Levenberg-shifted
    // Newton steps on the Schur complement and Armijo backtracking. The shift
    // shrinks after full steps, so along a flat direction the steps grow
    // geometrically while the stiff modes stay damped.
    bool reduced_descent(Eigen::VectorXd& c, SaddleResult& out, bool& diverged) const {
        const double phase_tol = std::max(tol_res_, 1e-6 * (1.0 + problem_.h.l2_norm() + problem_.nonlinearity.bound()));
        const double lk1 = basis_.lambda_k1();
        Eigen::VectorXd v = Eigen::VectorXd::Zero(m_);
        X1Maximum cur;
        try {
            cur = reduced(v, nullptr, out);
        } catch (const MaxIterations& e) {
            c.head(k_) = e.best;
            return false;
        }
        std::deque<Eigen::VectorXd> dirs;
        std::deque<double> norms;
        double mu = 1e-3 * lk1;
        for (int it = 0; it < options_.max_reduced_iterations; ++it) {
            const Eigen::VectorXd g = cur.point.gradient.tail(m_);
            const double res = cur.point.gradient.norm();
            out.trace.push_back({1, cur.point.value, res});
            ++out.iterations;
            c = cur.point.coeffs;
            if (res <= phase_tol) return true;

            const double norm = c.norm();
            if (norm > 0.0) {
                dirs.push_back(c / norm);
                norms.push_back(norm);
                if (static_cast<int>(dirs.size()) > cauchy_window + 1) {
                    dirs.pop_front();
                    norms.pop_front();
                }
                if (static_cast<int>(dirs.size()) == cauchy_window + 1 && norms.back() >= growth_factor * norms.front()) {
                    double spread = 0.0;
                    for (const Eigen::VectorXd& d : dirs) spread = std::max(spread, (d - dirs.back()).norm());
                    if (spread <= cauchy_tol) {
                        diverged = true;
                        return false;
                    }
                }
            }

            const Eigen::MatrixXd s = reduced_hessian(cur.point.curvature);
            bool moved = false;
            const Eigen::VectorXd warm = cur.point.coeffs.head(k_);
            while (!moved && mu <= 1e12 * lk1) {
                Eigen::MatrixXd shifted = s;
                shifted.diagonal().array() += mu;
                Eigen::LLT<Eigen::MatrixXd> llt(shifted);
                if (llt.info() != Eigen::Success) {
                    mu *= 10.0;
                    continue;
                }
                const Eigen::VectorXd d = -llt.solve(g);
                const double slope = g.dot(d);
                int halvings = 0;
                for (double t = 1.0; halvings < 30; ++halvings, t *= 0.5) {
                    X1Maximum trial;
                    try {
                        trial = reduced(v + t * d, &warm, out);
                    } catch (const MaxIterations&) {
                        continue;
                    }
                    if (trial.point.value <= cur.point.value + 1e-4 * t * slope + 1e-15 * (1.0 + std::abs(cur.point.value))) {
                        v += t * d;
                        cur = std::move(trial);
                        moved = true;
                        break;
                    }
                }
                if (!moved) mu *= 10.0;
                else if (halvings == 0) mu = std::max(0.25 * mu, 1e-14 * lk1);
                else mu *= 4.0;
            }
            if (!moved) return true; // stalled at rounding level; Newton takes over
        }
        c = cur.point.coeffs;
        return false;
    }

    Eigen::MatrixXd reduced_hessian(const Tridiagonal& curvature) const {
        const HessianBlocks hb = hessian_blocks(basis_, curvature);
        Eigen::LLT<Eigen::MatrixXd> neg11(-hb.h11);
        if (neg11.info() != Eigen::Success) return hb.h22;
        Eigen::MatrixXd s = hb.h22 + hb.h21 * neg11.solve(hb.h21.transpose());
        return 0.5 * (s + s.transpose());
    }

    // Phase 2: Newton on the full gradient with backtracking on its norm. Aims
    // two orders below tol_res and settles for tol_res once progress stops.
    bool newton(Eigen::VectorXd& c, SaddleResult& out) const {
        const double target = 0.01 * tol_res_;
        Evaluated cur = full(c, 2);
        for (int it = 0; it < options_.max_newton_iterations; ++it) {
            const double res = cur.gradient.norm();
            out.trace.push_back({2, cur.value, res});
            ++out.iterations;
            c = cur.coeffs;
            if (res <= target) return true;
            const Eigen::MatrixXd h = full_hessian(basis_, cur.curvature);
            Eigen::VectorXd step = Eigen::PartialPivLU<Eigen::MatrixXd>(h).solve(-cur.gradient);
            if (!step.allFinite() || (h * step + cur.gradient).norm() > 1e-8 * res)
                step = h.completeOrthogonalDecomposition().solve(-cur.gradient);
            bool moved = false;
            double t = 1.0;
            for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
                Evaluated trial = full(cur.coeffs + t * step, 2);
                if (trial.gradient.norm() <= (1.0 - 1e-4 * t) * res) {
                    cur = std::move(trial);
                    moved = true;
                    break;
                }
            }
            if (!moved) return res <= tol_res_;
        }
        c = cur.coeffs;
        return cur.gradient.norm() <= tol_res_;
    }

    void finish(SaddleResult& out, const Eigen::VectorXd& c, SaddleStatus status) const {
        const Evaluated e = full(c, 1);
        out.status = status;
        out.u_star = Field(problem_.basis(), Coeffs{c});
        out.residual = e.gradient.norm();
        out.energy = e.value;
        if (status == SaddleStatus::DivergingRay) out.ray = out.u_star * (1.0 / out.u_star.l2_norm());
    }

    // Nodal weak form: stiffness applied directly, tested on random unit fields.
    double weak_form_check(const Eigen::VectorXd& c) const {
        const Field u(problem_.basis(), Coeffs{c});
        const Eigen::VectorXd r = basis_.op().stiffness() * u.nodal() + pot_.evaluate(u.nodal(), 1).gradient;
        std::mt19937_64 rng(options_.seed);
        std::normal_distribution<double> nd(0.0, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            Eigen::VectorXd t(n_);
            for (int j = 0; j < n_; ++j) t(j) = nd(rng);
            const Field phi(problem_.basis(), Coeffs{t / t.norm()});
            worst = std::max(worst, std::abs(r.dot(phi.nodal())));
        }
        return worst;
    }

    // Smallest R = 2^p with max E over the X1 sphere of radius R (energy norm) below
    // min E over samples of {M(v) + v}.
    SaddleGeometry saddle_geometry() const {
        SaddleGeometry g;
        std::mt19937_64 rng(options_.seed + 1);
        std::normal_distribution<double> nd(0.0, 1.0);
        std::uniform_real_distribution<double> ud(-2.0, 2.0);
        const JumpingPotential jp = problem_.params.potential();
        const double scale = (1.0 + problem_.h.l2_norm() + problem_.nonlinearity.bound()) / basis_.gap();
        g.manifold_min = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 50; ++i) {
            Eigen::VectorXd v(m_);
            for (int j = 0; j < m_; ++j) v(j) = nd(rng) * basis_.lambda_k1() / basis_.lambda(k_ + 1 + j);
            v *= scale * std::pow(10.0, ud(rng)) / v.norm();
            Eigen::VectorXd c(n_);
            try {
                c.head(k_) = maximize_x1(basis_, jp, v, Tolerances::defaults(basis_).grad).point.coeffs.head(k_);
            } catch (const MaxIterations&) {
                continue;
            }
            c.tail(m_) = v;
            g.manifold_min = std::min(g.manifold_min, full(c, 0).value);
        }
        std::vector<Eigen::VectorXd> dirs;
        for (int i = 0; i < 50; ++i) {
            Eigen::VectorXd x(k_);
            for (int j = 0; j < k_; ++j) x(j) = nd(rng);
            dirs.push_back(x / std::sqrt(x.cwiseAbs2().dot(basis_.eigenvalues().head(k_))));
        }
        for (int p = 0; p <= 15; ++p) {
            const double r = std::ldexp(1.0, p);
            double top = -std::numeric_limits<double>::infinity();
            for (const Eigen::VectorXd& x : dirs) {
                Eigen::VectorXd c = Eigen::VectorXd::Zero(n_);
                c.head(k_) = r * x;
                top = std::max(top, full(c, 0).value);
            }
            g.radius = r;
            g.sphere_max = top;
            if (top < g.manifold_min) {
                g.certified = true;
                break;
            }
        }
        return g;
    }

    const SemilinearProblem& problem_;
    const SolveOptions& options_;
    const EigenBasis& basis_;
    SemilinearPotential pot_;
    int k_;
    int n_;
    int m_;
    double tol_res_;
};

} // namespace

SaddleResult solve(const SemilinearProblem& problem, const SolveOptions& options) {
    const Classification cls = problem.classification ? *problem.classification : classify(problem, options.sphere);
    if (!options.force) {
        if (cls.regime == Regime::OutOfScope)
            throw RegimeViolation("beta = " + format_number(problem.params.beta()) +
                                  " lies beyond the curve value beta(alpha) = " + format_number(cls.beta_curve));
        if (cls.regime == Regime::Resonance && !(options.gll && options.gll->satisfied))
            throw RegimeViolation("resonant problem without a satisfied Landesman-Lazer report; pass force to override");
    }
    return SaddleSolver(problem, options).run();
}

} // namespace fucik
