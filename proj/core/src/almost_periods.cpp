#include "fqc/almost_periods.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace fqc {

Sampled1D::Sampled1D(const std::function<cplx(double)>& eval, double lo,
                     double hi, double pitch, double lipschitz)
    : lo_(lo), hi_(hi), pitch_(pitch), lipschitz_(lipschitz) {
  if (!eval) throw std::invalid_argument("Sampled1D: evaluator is empty");
  if (!(pitch > 0.0) || !std::isfinite(pitch))
    throw std::invalid_argument("Sampled1D: pitch must be positive");
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument("Sampled1D: window must satisfy lo < hi");
  if (!(lipschitz >= 0.0) || !std::isfinite(lipschitz))
    throw std::invalid_argument("Sampled1D: Lipschitz constant must be nonnegative");
  const auto steps = std::size_t(std::floor((hi - lo) / pitch + 1e-9));
  values_.reserve(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i)
    values_.push_back(eval(lo + double(i) * pitch));
  // Raise the constant to the slope the cache actually exhibits, so the
  // off-grid correction stays sound even against an optimistic estimate.
  double max_step2 = 0.0;
  for (std::size_t i = 1; i < values_.size(); ++i)
    max_step2 = std::max(max_step2, std::norm(values_[i] - values_[i - 1]));
  lipschitz_ = std::max(lipschitz_, std::sqrt(max_step2) / pitch_);
}

SampledFunction::SampledFunction(std::function<cplx(const Point&)> eval,
                                 std::size_t dim, double lo, double hi,
                                 double pitch, double lipschitz)
    : eval_(std::move(eval)),
      dim_(dim),
      lo_(lo),
      hi_(hi),
      pitch_(pitch),
      lipschitz_(lipschitz) {
  if (!eval_) throw std::invalid_argument("SampledFunction: evaluator is empty");
  if (dim_ == 0)
    throw std::invalid_argument("SampledFunction: dimension must be positive");
  if (!(pitch_ > 0.0) || !std::isfinite(pitch_))
    throw std::invalid_argument("SampledFunction: pitch must be positive");
  if (!(hi_ > lo_) || !std::isfinite(lo_) || !std::isfinite(hi_))
    throw std::invalid_argument("SampledFunction: window must satisfy lo < hi");
  if (!(lipschitz_ >= 0.0) || !std::isfinite(lipschitz_))
    throw std::invalid_argument(
        "SampledFunction: Lipschitz constant must be nonnegative");
}

Sampled1D SampledFunction::section(const Point& origin,
                                   const Point& direction) const {
  if (origin.size() != dim_ || direction.size() != dim_)
    throw std::invalid_argument("SampledFunction: section dimension mismatch");
  if (std::abs(norm2(direction) - 1.0) > 1e-9)
    throw std::invalid_argument("SampledFunction: direction must be a unit vector");
  auto eval = [this, origin, direction](double u) {
    Point x(dim_);
    for (std::size_t k = 0; k < dim_; ++k)
      x[k] = origin[k] + u * direction[k];
    return eval_(x);
  };
  return Sampled1D(eval, lo_, hi_, pitch_, lipschitz_);
}

Discrepancy discrepancy(const Sampled1D& f, double tau) {
  if (!std::isfinite(tau))
    throw std::invalid_argument("discrepancy: shift must be finite");
  const double pitch = f.pitch();
  const auto shift = long(std::floor(tau / pitch + 1e-12));
  const double residual = tau - double(shift) * pitch;
  const auto n = long(f.size());
  const long i_lo = std::max(0L, -shift);
  const long i_hi = std::min(n, n - shift);  // exclusive
  if (i_lo >= i_hi)
    throw std::invalid_argument("discrepancy: shift exceeds the sampled window");
  double sup2 = 0.0;
  const std::vector<cplx>& v = f.values();
  for (long i = i_lo; i < i_hi; ++i)
    sup2 = std::max(sup2, std::norm(v[std::size_t(i + shift)] - v[std::size_t(i)]));
  Discrepancy d;
  d.grid_sup = std::sqrt(sup2);
  d.correction = (pitch + std::abs(residual)) * f.lipschitz();
  return d;
}

AlmostPeriodSet find_almost_periods(const std::vector<Sampled1D>& family,
                                    double epsilon, double lo, double hi,
                                    double step,
                                    std::vector<PeriodTraceRow>* trace) {
  if (family.empty())
    throw std::invalid_argument("find_almost_periods: family is empty");
  if (!(epsilon > 0.0))
    throw std::invalid_argument("find_almost_periods: epsilon must be positive");
  if (!(step > 0.0))
    throw std::invalid_argument("find_almost_periods: step must be positive");
  if (!(hi >= lo))
    throw std::invalid_argument("find_almost_periods: window must satisfy lo <= hi");
  const double pitch = family.front().pitch();
  double max_lipschitz = 0.0;
  for (const Sampled1D& f : family) {
    if (f.pitch() != pitch)
      throw std::invalid_argument("find_almost_periods: family pitches differ");
    max_lipschitz = std::max(max_lipschitz, f.lipschitz());
  }
  if (max_lipschitz > 0.0 && step > epsilon / (4.0 * max_lipschitz))
    throw std::invalid_argument(
        "find_almost_periods: step too coarse for epsilon (needs step <= "
        "epsilon / (4 max Lipschitz))");

  // Work in grid units: scan shifts are exact pitch multiples, so the snap
  // residual inside discrepancy() vanishes and merges compare integers.
  const long k_step = std::max(1L, long(std::floor(step / pitch + 1e-12)));
  if (max_lipschitz > 0.0 &&
      double(k_step) * pitch > epsilon / (4.0 * max_lipschitz) * (1.0 + 1e-12))
    throw std::invalid_argument(
        "find_almost_periods: grid pitch exceeds the requested step; the "
        "effective scan step would be too coarse for epsilon");
  const long k_lo = long(std::ceil(lo / pitch - 1e-9));
  const long k_hi = long(std::floor(hi / pitch + 1e-9));

  struct Candidate {
    long k;
    double tau;
    double worst;
  };
  std::vector<Candidate> qualified;
  for (long k = k_lo; k <= k_hi; k += k_step) {
    const double tau = double(k) * pitch;
    double worst = 0.0;
    bool ok = true;
    for (const Sampled1D& f : family) {
      // Scan shifts are exact pitch multiples, so the snap residual is zero
      // and the correction is pitch * L exactly.
      const double corr = f.pitch() * f.lipschitz();
      const auto n = long(f.size());
      const long i_lo = std::max(0L, -k);
      const long i_hi = std::min(n, n - k);
      if (i_lo >= i_hi)
        throw std::invalid_argument(
            "find_almost_periods: shift exceeds the sampled window");
      // Without a trace, stop as soon as disqualification is certain: the
      // qualification test (grid_sup + corr < epsilon) fails once
      // grid_sup^2 reaches (epsilon - corr)^2.
      const double headroom = epsilon - corr;
      const double limit2 =
          trace ? kInf : (headroom > 0.0 ? headroom * headroom : 0.0);
      double sup2 = 0.0;
      const std::vector<cplx>& v = f.values();
      for (long i = i_lo; i < i_hi; ++i) {
        sup2 = std::max(
            sup2, std::norm(v[std::size_t(i + k)] - v[std::size_t(i)]));
        if (sup2 >= limit2) break;
      }
      worst = std::max(worst, std::sqrt(sup2) + corr);
      if (!(worst < epsilon)) {
        ok = false;
        if (!trace) break;
      }
    }
    if (trace) trace->push_back(PeriodTraceRow{tau, worst, ok});
    if (ok) qualified.push_back(Candidate{k, tau, worst});
  }

  AlmostPeriodSet result;
  result.epsilon = epsilon;
  result.lo = lo;
  result.hi = hi;
  result.step = double(k_step) * pitch;
  for (std::size_t i = 0; i < qualified.size();) {
    std::size_t best = i;
    std::size_t j = i + 1;
    while (j < qualified.size() &&
           qualified[j].k - qualified[j - 1].k <= 2 * k_step) {
      if (qualified[j].worst < qualified[best].worst) best = j;
      ++j;
    }
    result.periods.push_back(
        AlmostPeriod{qualified[best].tau, qualified[best].worst});
    i = j;
  }
  result.relative_dense_radius = [&] {
    std::vector<double> taus;
    taus.reserve(result.periods.size());
    for (const AlmostPeriod& p : result.periods) taus.push_back(p.tau);
    return relative_dense_radius(taus);
  }();
  return result;
}

double relative_dense_radius(const AlmostPeriodSet& aps) {
  std::vector<double> taus;
  taus.reserve(aps.periods.size());
  for (const AlmostPeriod& p : aps.periods) taus.push_back(p.tau);
  return relative_dense_radius(taus);
}

double relative_dense_radius(const std::vector<double>& taus) {
  if (taus.size() < 2) return kInf;
  std::vector<double> sorted = taus;
  std::sort(sorted.begin(), sorted.end());
  double gap = 0.0;
  for (std::size_t i = 1; i < sorted.size(); ++i)
    gap = std::max(gap, sorted[i] - sorted[i - 1]);
  return gap;
}

}  // namespace fqc
