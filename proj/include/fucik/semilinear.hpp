#pragma once

#include "fucik/fucik.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fucik {

/// A bounded continuous f with its antiderivative F(t) = int_0^t f.
///
/// Copies share one antiderivative cache, guarded by a mutex, so a Nonlinearity
/// may be used from several threads.
class Nonlinearity {
public:
    using Fn = std::function<double(double)>;

    static Nonlinearity zero();
    static Nonlinearity tanh();
    /// amplitude * (2/pi) * atan(rate * t); limits -amplitude and +amplitude.
    static Nonlinearity atan_scaled(double amplitude = 1.0, double rate = 1.0);
    /// The polynomial sum_i coeffs[i] t^i clipped to [-clip, clip].
    static Nonlinearity bounded_poly_clip(std::vector<double> coeffs, double clip);
    /// Piecewise-linear interpolation of (t_i, f_i), constant outside the table.
    static Nonlinearity table(std::vector<double> t, std::vector<double> f);
    /// Arbitrary f with a claimed bound. F falls back to adaptive Simpson and f' to
    /// central differences when not supplied.
    static Nonlinearity from_function(Fn f, double bound, std::optional<double> f_left = std::nullopt,
                                      std::optional<double> f_right = std::nullopt, Fn antiderivative = {},
                                      Fn derivative = {}, std::string name = "function");

    /// Same nonlinearity with the declared limits replaced.
    Nonlinearity with_limits(std::optional<double> f_left, std::optional<double> f_right) const;

    const std::string& name() const { return name_; }
    /// Parameters of the builtin form: amplitude/rate, coefficients, or table abscissae then ordinates.
    const std::vector<double>& parameters() const { return params_; }
    double bound() const { return bound_; }
    std::optional<double> f_left() const { return f_left_; }
    std::optional<double> f_right() const { return f_right_; }
    bool has_limits() const { return f_left_.has_value() && f_right_.has_value(); }
    bool identically_zero() const { return name_ == "zero"; }

    double f(double t) const { return f_(t); }
    double df(double t) const;
    double F(double t) const;

private:
    Nonlinearity() = default;
    struct Cache;

    std::string name_;
    std::vector<double> params_;
    Fn f_;
    Fn df_;
    Fn F_;
    double bound_ = 0.0;
    std::optional<double> f_left_;
    std::optional<double> f_right_;
    std::shared_ptr<Cache> cache_;
};

struct NonlinearityCheck {
    bool bounded = true;       ///< |f| <= bound on the probe grid
    bool vanishes_at_zero = true;
    bool derivative_matches = true; ///< F' ~ f by central differences
    bool linear_growth = true;      ///< |F(t)| <= bound |t|
    double worst_bound_excess = 0.0;
    double worst_derivative_error = 0.0;
    bool all() const { return bounded && vanishes_at_zero && derivative_matches && linear_growth; }
};

/// Probes on `count` points spread over [-range, range], log-spaced in |t|.
NonlinearityCheck check_nonlinearity(const Nonlinearity& f, int count = 10000, double range = 1e6);

enum class Regime { Nonresonance, Resonance, OutOfScope };
std::string to_string(Regime r);

struct Classification {
    Regime regime = Regime::Nonresonance;
    double beta_curve = 0.0;               ///< beta(alpha); +inf when no root below beta_max
    std::optional<FucikPoint> curve_point; ///< Fucik point at (alpha, beta(alpha))
};

struct SemilinearProblem {
    SemilinearProblem(FucikParams params, Nonlinearity f, Field h);

    FucikParams params;
    Nonlinearity nonlinearity;
    Field h;
    std::optional<Classification> classification;

    const BasisPtr& basis() const { return params.basis(); }
    /// 1e-8 (1 + |h| + M_f).
    double tol_res() const;
};

/// Compares beta with beta(alpha) at tolerance tol.beta.
Classification classify(const FucikParams& params, const SphereOptions& options = {});
Classification classify(const SemilinearProblem& problem, const SphereOptions& options = {});

/// E(u) = J(u) - int (F(u) + h u).
double eval_E(const SemilinearProblem& problem, const Field& u);
Field grad_E(const SemilinearProblem& problem, const Field& u);

/// Non-quadratic part of E for the variational solvers: the jumping part, -int F(u), and -int h u.
class SemilinearPotential : public Potential {
public:
    explicit SemilinearPotential(const SemilinearProblem& problem);
    PotentialEval evaluate(const Eigen::VectorXd& nodal, int order) const override;

private:
    const SampleGrid* grid_;
    JumpingPotential jump_;
    const Nonlinearity* f_;
    Eigen::VectorXd mass_h_;
};

struct RaySlope {
    double t = 0.0;
    double slope = 0.0; ///< difference quotient of int F(t v) + t h v between consecutive t
    bool agrees = false;
};

struct GLLEntry {
    double ray = 0.0; ///< f_r int v+ - f_l int v- + int h v
    std::vector<RaySlope> slopes;
};

struct DiagonalWindow {
    double lower = 0.0;
    double upper = 0.0;
    double value = 0.0; ///< int h phi
    bool inside = false;
};

struct GLLReport {
    bool satisfied = false;
    bool slopes_consistent = true;
    std::vector<GLLEntry> entries;
    std::optional<DiagonalWindow> diagonal;
    std::size_t eigenset_size() const { return entries.size(); }
};

constexpr double tol_gll = 1e-10;

/// Eigenfunctions M(v) + v for the minimiser and every distinct multistart minimum, L2-normalised.
std::vector<Field> fucik_eigenset(const FucikPoint& point);

/// Ray form of the generalized Landesman-Lazer condition over the given eigenset.
/// Throws MissingLimits when f_l or f_r is not declared.
GLLReport check_gll(const SemilinearProblem& problem, const std::vector<Field>& eigenset);

enum class SaddleStatus { Converged, MaxIterations, DivergingRay };
std::string to_string(SaddleStatus s);

struct TraceEntry {
    int phase = 1;
    double energy = 0.0;
    double residual = 0.0;
};

struct SaddleGeometry {
    bool certified = false;
    double radius = 0.0;      ///< R, a power of two
    double sphere_max = 0.0;  ///< max of E over samples of the X1 sphere of radius R
    double manifold_min = 0.0; ///< min of E over samples of M(v) + v
};

struct SaddleResult {
    SaddleStatus status = SaddleStatus::MaxIterations;
    Field u_star;
    double residual = 0.0;
    double energy = 0.0;
    int iterations = 0;
    std::optional<Field> ray; ///< normalised direction for DivergingRay
    std::vector<TraceEntry> trace;
    double weak_form_residual = 0.0; ///< max over 50 random unit test fields
    double delta_eff = 0.0;          ///< smallest concavity margin seen in the X1 maximisations
    SaddleGeometry geometry;
    double tol_res = 0.0;
};

struct SolveOptions {
    bool force = false; ///< allow resonance without a satisfied GLL report, and out-of-scope parameters
    std::optional<GLLReport> gll;
    std::uint64_t seed = 0;
    int max_reduced_iterations = 2000;
    int max_newton_iterations = 100;
    SphereOptions sphere; ///< used when the problem still needs classification
};

/// Two-phase saddle search: descent on the reduced functional over X2, then Newton on
/// the full gradient. Throws RegimeViolation for resonance without GLL (or out of
/// scope) unless forced.
SaddleResult solve(const SemilinearProblem& problem, const SolveOptions& options = {});

struct ResidualReport {
    Eigen::VectorXd per_index; ///< <E'(u), phi_j>
    double max = 0.0;
};

/// Weak-form residuals against every basis function, computed from the stiffness matrix.
ResidualReport residual_report(const SemilinearProblem& problem, const Field& u);

} // namespace fucik
