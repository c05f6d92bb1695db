#pragma once

#include <cstdint>
#include <functional>

#include "lcdiag/prepared.hpp"
#include "lcdiag/series.hpp"

namespace lcdiag {

enum class Verdict { Converges, Diverges, Inconclusive };

struct ConvergenceVerdict {
  Verdict verdict = Verdict::Inconclusive;
  double estimate = 0;         // meaningful when converging
  double growth_exponent = 0;  // fitted local exponent of the increments
  std::uint64_t evaluations = 0;
};

using FiberFn = std::function<double(const std::vector<double>&)>;

/// Truncated integrals I(eps) of a nonnegative integrand over [eps,1]^n
/// for eps = 2^-4 .. 2^-40, via the substitution y = e^-t and tensorized
/// Gauss-Legendre panels (panel count doubles until two successive passes
/// agree to 1e-8 or the evaluation budget 2^22 is spent). The verdict
/// fits the increment decay: geometric -> converges (with extrapolated
/// estimate), ratio at or above 1 -> diverges, near-threshold dead band
/// (local exponent within 0.05 of the boundary) -> inconclusive.
ConvergenceVerdict integrate_ladder(const FiberFn& g, std::size_t n);

/// Quadrature verdict for int |f|^p |mu|^q y^gamma over the fiber at x.
ConvergenceVerdict fiber_integral(const PreparedSum& f, const PreparedSum& mu,
                                  const std::vector<Rat>& gamma, double p,
                                  double q, const std::vector<double>& x);

struct SupEstimate {
  double sup = 0;
  bool bounded = true;  // trend across eps halvings
};

/// Max of |f| over quasi-random samples of [eps, 1-eps]^n, with the
/// bounded/unbounded trend read off sup growth across eps halvings.
SupEstimate sup_estimate_fn(const FiberFn& f, std::size_t n, double eps);
SupEstimate sup_estimate(const PreparedSum& f, const std::vector<double>& x,
                         double eps);

struct TriangleCheck {
  bool holds = false;
  double slack = 0;  // rhs - lhs
  double lhs = 0, rhs = 0;
};

/// Both sides of the product-family triangle bound (branching on
/// M = max{p,q} at 1), by shared-node quadrature over [delta,1]^n.
TriangleCheck check_triangle(const std::vector<FiberFn>& fs,
                             const std::vector<FiberFn>& gs, double p,
                             double q, std::size_t n);

/// Evaluates sum c_{i,k,l} x^{k+l t} (log x)^i over the collapsed table,
/// divided by x^{p+q t} (log x)^r, along the decreasing grid, and returns
/// the Aitken-extrapolated limit from the last three points. Requires
/// t in (0, asym.eps).
double limit_along_curve(const CollapsedTable& table,
                         const LeadingAsym& asym, double t,
                         const std::vector<double>& xgrid = {
                             1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9});

}  // namespace lcdiag
