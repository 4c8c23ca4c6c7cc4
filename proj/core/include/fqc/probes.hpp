// Smooth probe functions and measure/jet pairings.
//
// Three probe families on R^d, all real-valued:
//   gaussian       exp(-pi |x|^2), self-dual under the transform convention
//                  used throughout (kernel exp(-2 pi i <x,y>)).
//   bump           phi(x) = p(|x|) with the fixed roll-off profile
//                  p(t) = 1 for t <= 1, 0 for t >= 2, and in between
//                  p(t) = g(2-t) / (g(2-t) + g(t-1)), g(s) = exp(-1/s).
//                  Smooth, supported in the closed ball of radius 2,
//                  identically 1 on B(0,1), and p(1.5) = 1/2 by symmetry.
//   monomial_bump  psi(x) = phi(x/rho) * x^{j0} / j0!, which satisfies
//                  (D^{j0} psi)(0) = 1 and (D^j psi)(0) = 0 for j != j0
//                  with ||j||_inf within the evaluation budget.
// Probes compose with diagonal affine reparametrizations (scaled_translated),
// staying inside the family.
//
// Derivatives: gaussian uses the closed-form Hermite-type recursion; bump
// kinds use 5-point central stencils per dimension (pitch 1e-3) with one
// Richardson extrapolation step, documented absolute accuracy 1e-6.

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "fqc/geometry.hpp"
#include "fqc/measures.hpp"

namespace fqc {

enum class ProbeKind { gaussian, bump, monomial_bump };

class ProbeFunction {
 public:
  static ProbeFunction gaussian(std::size_t dim);
  static ProbeFunction standard_bump(std::size_t dim);
  static ProbeFunction monomial_bump(const MultiIndex& j0, double rho);

  // x |-> this((x - shift) / scale); composition folds into one affine slot.
  ProbeFunction scaled_translated(double scale, const Point& shift) const;

  std::size_t dim() const { return dim_; }
  ProbeKind kind() const { return kind_; }
  double rho() const { return rho_; }
  const MultiIndex& j0() const { return j0_; }
  double scale() const { return scale_; }
  const Point& shift() const { return shift_; }

  // Highest per-component derivative order supported by derivative_eval.
  int evaluation_budget() const { return budget_; }

  // Support ball (center/radius) in ambient coordinates; radius +inf for the
  // gaussian. Membership, as everywhere, is strict.
  const Point& support_center() const { return shift_; }
  double support_radius() const;

  double value(const Point& x) const;
  double operator()(const Point& x) const { return value(x); }

 private:
  ProbeFunction(std::size_t dim, ProbeKind kind);

  std::size_t dim_;
  ProbeKind kind_;
  double rho_ = 1.0;   // monomial_bump dilation
  MultiIndex j0_;      // monomial_bump exponent
  double scale_ = 1.0;
  Point shift_;
  int budget_ = 4;
};

// Fixed roll-off profile p and its closed-form first derivative (used for
// Lipschitz bounds). Exposed for tests and independent cross-checks.
double bump_profile(double t);
double bump_profile_derivative(double t);
// Grid-scanned sup of |p'| with a safety margin; a true Lipschitz constant
// for the profile (~2.0).
double bump_profile_max_slope();

// D^j probe at x. Componentwise order ||j||_inf must not exceed the
// evaluation budget (std::domain_error otherwise).
double derivative_eval(const ProbeFunction& probe, const MultiIndex& j,
                       const Point& x);

// Axis-aligned evaluation grid for norm estimation.
struct GridBox {
  Point lo;
  Point hi;
  double pitch = 1e-3;
};

struct SchwartzNormBound {
  double value = 0.0;   // grid lower bound for the weighted sup
  double grid_pitch = 0.0;
};

// Grid lower bound for N_m(phi) = sup_x max(1,|x|)^m  max_{||k||_inf <= m}
// |D^k phi(x)|, reported together with the grid pitch.
SchwartzNormBound schwartz_norm(const ProbeFunction& probe, int m,
                                const GridBox& grid);

// Sum_i m_i * probe((x_i - t)/scale). Finite truncations make this an
// absolutely convergent finite sum; interpretation of the value as a pairing
// with the untruncated object is governed by the convergence guard
// (see fqc/spectral.hpp), which reports tail bounds for decaying probes.
cplx pair_measure(const AtomicMeasure& mu, const ProbeFunction& probe,
                  const Point& t, double scale);

// Jet pairing Sum_atoms Sum_j p_{x,j} (D^j probe)(x - t).
//
// Sign-convention note: coefficients multiply plain derivatives of the probe;
// there is no (-1)^{||j||_1} factor. A pairing written through distributional
// derivatives of point masses differs from this by that alternating sign.
cplx pair_jets(const JetDistribution& f, const ProbeFunction& probe,
               const Point& t);

}  // namespace fqc
