#pragma once

#include "fucik/field.hpp"
#include "fucik/variational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fucik {

/// Solver tolerances; defaults scale with lambda_{k+1} so that they are invariant
/// under kernel rescaling.
struct Tolerances {
    double grad = 0.0; ///< stationarity, 1e-9 (1 + lambda_{k+1})
    double m = 0.0;    ///< |m| at a root, 1e-8 lambda_{k+1}
    double beta = 0.0; ///< bracket width, 1e-6 lambda_{k+1}

    static Tolerances defaults(const EigenBasis& basis);
};

/// (alpha, beta) in the strip lambda_k < alpha <= lambda_{k+1} with alpha <= beta.
/// alpha = lambda_{k+1} is admitted as the closed end of the strip.
class FucikParams {
public:
    FucikParams(BasisPtr basis, double alpha, double beta);

    const BasisPtr& basis() const { return basis_; }
    const EigenBasis& eigen() const { return *basis_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    int k() const { return basis_->k(); }
    /// alpha / lambda_k - 1.
    double delta() const { return alpha_ / basis_->lambda_k() - 1.0; }
    JumpingPotential potential() const { return JumpingPotential(basis_->grid(), alpha_, beta_); }

private:
    BasisPtr basis_;
    double alpha_;
    double beta_;
};

/// J(u) = 1/2 (sum lambda_j c_j^2 - alpha int (u+)^2 - beta int (u-)^2).
double eval_J(const FucikParams& params, const Field& u);
/// Coefficients of J'(u): Lambda c - Phi^T (alpha u+ - beta u-) tested against the hats.
Field grad_J(const FucikParams& params, const Field& u);

/// Norm of the J-gradient for arbitrary (alpha, beta), without the strip checks.
/// Used to certify eigenfunctions after a swap.
double fucik_residual(const BasisPtr& basis, double alpha, double beta, const Field& w);

struct X1Result {
    Field u; ///< M(v), in X1
    int iterations = 0;
    double residual = 0.0;
    double delta_eff = 0.0; ///< observed concavity margin on iterate pairs
};

/// M(v) = argmax over X1 of J(. + v).
Field maximize_X1(const FucikParams& params, const Field& v);
X1Result maximize_X1_report(const FucikParams& params, const Field& v, const Tolerances& tol);

/// J(M(v) + v).
double eval_J_tilde(const FucikParams& params, const Field& v);
/// P2 J'(M(v) + v).
Field grad_J_tilde(const FucikParams& params, const Field& v);

struct SphereOptions {
    int starts = 5;          ///< +phi_{k+1}, -phi_{k+1}, +phi_{k+2}, -phi_{k+2}, random...
    std::uint64_t seed = 0;  ///< for the random starts
    int max_iterations = 300;
    std::optional<Tolerances> tol;
};

struct StartOutcome {
    std::string label;
    double value = 0.0;
    double tangent_grad = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct FucikPoint {
    double alpha = 0.0;
    double beta = 0.0;
    double m_value = 0.0;
    Field minimizer;                   ///< v0 in X2, unit L2 norm
    std::optional<Field> eigenfunction; ///< w = M(v0) + v0 when m_value ~ 0
    double tangent_grad = 0.0;
    int iterations = 0;
    std::vector<StartOutcome> starts;
    std::vector<Field> distinct_minima; ///< all starts within tol.m of the best, deduplicated
};

/// m(alpha, beta) = min over the unit sphere of X2 of J~, by multistart Riemannian
/// Newton with a preconditioned-gradient fallback. Throws MaxIterations if no start
/// reaches stationarity.
FucikPoint minimize_sphere(const FucikParams& params, const SphereOptions& options = {});

enum class BetaStatus { Found, NoRoot };

struct BetaResult {
    BetaStatus status = BetaStatus::Found;
    FucikPoint point;        ///< at beta(alpha), or at beta_max for NoRoot
    double bracket_lo = 0.0; ///< m > 0
    double bracket_hi = 0.0; ///< m < 0
    int m_evaluations = 0;
};

/// The unique beta > lambda_{k+1} with m(alpha, beta) = 0. NoRoot when m stays
/// positive up to 50 lambda_{k+1}. Throws BracketExhausted when the refinement
/// cannot produce a certified bracket.
BetaResult beta_of_alpha(double alpha, const BasisPtr& basis, const SphereOptions& options = {});

struct CurveSample {
    double alpha = 0.0;
    double beta = 0.0;
    double m_residual = 0.0;
    int iterations = 0;
    bool ok = true;
    std::string failure; ///< empty when ok
    std::optional<FucikPoint> point;
};

struct CurveBranch {
    int k = 0;
    std::vector<CurveSample> samples; ///< alpha ascending
    Tolerances tol;
    double lipschitz = 0.0; ///< max |d beta / d alpha| between consecutive good samples
    bool swapped = false;
};

struct TraceOptions {
    int n_samples = 9;
    /// Chebyshev nodes are placed on [lambda_k + lo * gap, lambda_k + hi * gap].
    double window_lo = 0.0;
    double window_hi = 1.0;
    SphereOptions sphere;
    bool keep_points = false;
};

/// Chebyshev-spaced alpha samples of the first curve in the strip above lambda_k.
/// Failed samples are kept with an annotation.
CurveBranch trace_curve(const BasisPtr& basis, const TraceOptions& options);

/// Chebyshev nodes of the first kind mapped to [lo, hi], ascending.
std::vector<double> chebyshev_nodes(double lo, double hi, int n);

/// Exchange alpha and beta and negate the eigenfunction.
FucikPoint swap(const FucikPoint& point);
CurveBranch swap(const CurveBranch& branch);

} // namespace fucik
