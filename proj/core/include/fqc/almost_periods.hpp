// Certified almost-period search over sampled function families.
//
// Functions are complex-valued, cached on uniform grids with a Lipschitz
// constant; shift candidates are snapped down to integer multiples of the
// grid pitch so shifted grids align exactly and the grid supremum is an
// exact finite max. Off-grid behaviour is covered by the additive correction
// pitch * L, making every reported discrepancy a certified upper bound on
// the true supremum over the sampled window (and only over it: a finite
// window can certify almost-period candidates, never refute one).

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "fqc/geometry.hpp"

namespace fqc {

// A complex function cached on the uniform grid lo, lo+pitch, ..., hi with a
// known Lipschitz constant (|F(t)-F(s)| <= L |t-s|). pitch must be positive;
// prefer dyadic pitches and window endpoints so grids align exactly in FP.
// The stored constant is raised to the observed grid slope when the supplied
// estimate is smaller, keeping the certified corrections sound against the
// data actually cached.
class Sampled1D {
 public:
  Sampled1D(const std::function<cplx(double)>& eval, double lo, double hi,
            double pitch, double lipschitz);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double pitch() const { return pitch_; }
  double lipschitz() const { return lipschitz_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<cplx>& values() const { return values_; }
  double grid_point(std::size_t i) const { return lo_ + double(i) * pitch_; }

 private:
  double lo_, hi_, pitch_, lipschitz_;
  std::vector<cplx> values_;
};

// A complex function on R^d with grid metadata; almost-period searches in
// d >= 2 run along one-dimensional sections through it (default directions:
// coordinate axes; lattice scans are out of scope).
class SampledFunction {
 public:
  SampledFunction(std::function<cplx(const Point&)> eval, std::size_t dim,
                  double lo, double hi, double pitch, double lipschitz);

  std::size_t dim() const { return dim_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double pitch() const { return pitch_; }
  double lipschitz() const { return lipschitz_; }
  cplx value(const Point& x) const { return eval_(x); }

  // Cache u -> F(origin + u * direction) on [lo, hi]. direction must be a
  // unit vector (so the Lipschitz constant transfers unchanged).
  Sampled1D section(const Point& origin, const Point& direction) const;

 private:
  std::function<cplx(const Point&)> eval_;
  std::size_t dim_;
  double lo_, hi_, pitch_, lipschitz_;
};

struct Discrepancy {
  double grid_sup = 0.0;    // exact max over aligned grid pairs
  double correction = 0.0;  // pitch * L (+ snap residual * L if tau off-grid)
  double certified() const { return grid_sup + correction; }
};

// sup_t |F(t + tau) - F(t)| over all t with both samples in the window,
// certified as grid_sup + correction. tau is snapped down to a multiple of
// the pitch; the snap residual is charged to the correction.
Discrepancy discrepancy(const Sampled1D& f, double tau);

struct AlmostPeriod {
  double tau = 0.0;
  double certified = 0.0;  // worst certified discrepancy across the family
};

struct AlmostPeriodSet {
  double epsilon = 0.0;
  double lo = 0.0, hi = 0.0;  // shift window searched
  double step = 0.0;          // scan step after snapping
  Point origin;               // section line, when the caller searched one
  Point direction;
  std::vector<AlmostPeriod> periods;  // sorted ascending in tau
  double relative_dense_radius = kInf;  // max consecutive gap; inf if < 2
};

struct PeriodTraceRow {
  double tau = 0.0;
  double worst_certified = 0.0;
  bool qualified = false;
};

// Scan shifts tau = snap(lo), snap(lo)+step, ... <= hi (step snapped down to
// a positive multiple of the shared pitch) and keep those whose certified
// discrepancy stays below epsilon for EVERY family member. Qualifying shifts
// closer than 2*step merge, keeping the smallest worst-case certified value
// (ties -> smaller tau). Family must be nonempty with equal pitches.
// Pre-condition: step <= epsilon / (4 * max Lipschitz), so the scan cannot
// step over a period between scan points (throws std::invalid_argument).
AlmostPeriodSet find_almost_periods(
    const std::vector<Sampled1D>& family, double epsilon, double lo,
    double hi, double step, std::vector<PeriodTraceRow>* trace = nullptr);

// Largest gap between consecutive periods; +inf when fewer than two.
double relative_dense_radius(const AlmostPeriodSet& aps);
double relative_dense_radius(const std::vector<double>& taus);

}  // namespace fqc
