#pragma once

#include <functional>
#include <utility>

#include "bivadj/bivariate.hpp"

// Brute-force counterparts of the closed-form adjustment quantities: direct
// sums over the truncated support for discrete marginals and composite
// Gauss-Legendre quadrature for continuous ones. These deliberately avoid the
// closed-form paths they are used to verify; the reproduce command and the
// test suites both rely on them.

namespace bivadj::checks {

/// Composite 20-point Gauss-Legendre quadrature (nodes computed at runtime).
double integrate(const std::function<double(double)>& f, double lo, double hi, int panels = 200);

/// Integration window covering the marginal's mass to ~1e-15.
std::pair<double, double> integration_range(const MarginalSpec& m);

/// E g(X) by direct sum / quadrature.
double bf_center(const AdjustmentSpec& adj, const MarginalSpec& m);

/// E X (g(X) - a) with a = bf_center, by direct sum / quadrature.
double bf_nu(const AdjustmentSpec& adj, const MarginalSpec& m);

/// sup |g - a| over the truncated support or a dense grid.
double bf_bound(const AdjustmentSpec& adj, const MarginalSpec& m, int grid_points = 100000);

/// Correlation by direct sums of x y f(x,y) over the truncated support
/// (discrete marginals only).
double bf_correlation(const BivariateModel& model);

/// max over x of |sum_y f(x,y) - f1(x)| plus the same for the other axis
/// (discrete models; continuous axes integrate by quadrature).
double marginalization_error(const BivariateModel& model);

}  // namespace bivadj::checks
