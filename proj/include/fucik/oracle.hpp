#pragma once

// Reference computations used to cross-check the solvers: exact shooting for the
// classical one-dimensional curves and exhaustive search in low dimension.

#include "fucik/fucik.hpp"

#include <numbers>
#include <vector>

namespace fucik {

struct ShootingResult {
    double alpha = 0.0;
    double beta = 0.0;
    int zeros = 0;                ///< interior zeros of the shot solution
    double boundary_mismatch = 0.0; ///< u at the right endpoint
};

/// Solves -u'' = alpha u+ - beta u- from u(0) = 0, u'(0) = slope_sign by joining
/// exact sine arcs, and reports u(length).
ShootingResult shoot(double alpha, double beta, double length = std::numbers::pi, int slope_sign = 1);

/// Which sign the shot solution starts with. The two agree when k is odd.
enum class ShootingStart { Positive, Negative, Lower };

/// beta on the classical curve through ((k+1)^2, (k+1)^2) for -u'' on (0, length)
/// (scaled by (pi/length)^2), by bisection on beta to 1e-10. Lower takes the smaller
/// beta of the two starts, which is the branch the minimax construction follows.
/// Throws NoCrossing when some alpha has no root.
std::vector<ShootingResult> classical_curve(int k, const std::vector<double>& alpha_grid,
                                            ShootingStart start = ShootingStart::Lower,
                                            double length = std::numbers::pi);

/// Grid search of J(. + v) over X1 coefficients in [-radius, radius]^k followed by
/// cyclic golden-section refinement. k <= 2. Throws RadiusTooSmall when the best
/// grid point lies on the boundary.
Field brute_force_max_X1(const FucikParams& params, const Field& v, double grid_radius, double grid_step);

struct SphereEstimate {
    double m_estimate = 0.0;
    Field v_estimate; ///< cos(angle) phi_{k+1} + sin(angle) phi_{k+2}
    double angle = 0.0;
};

/// min of J~ over n_angles equally spaced points of the unit circle in
/// span{phi_{k+1}, phi_{k+2}}, each evaluated with brute_force_max_X1.
SphereEstimate brute_force_sphere_min(const FucikParams& params, int n_angles);

} // namespace fucik
