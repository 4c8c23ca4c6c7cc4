// Discrete spectra, probe transforms, and guarded spectral evaluation.
//
// Transform convention: forward kernel exp(-2 pi i <x,y>), conjugate kernel
// exp(+2 pi i <x,y>). The gaussian exp(-pi|x|^2) is self-dual under both.
//
// For a measure with atomic transform (lines b_n at frequencies s_n), the
// pairing with a translated probe phi_t(x) = phi(x - t) evaluates as the
// spectral series
//     Sum_n b_n * conj-transform(phi)(s_n) * exp(2 pi i <t, s_n>),
// summed in the canonical order |s| increasing, lexicographic on ties, and
// truncated with a reported tail bound. The convergence guard certifies the
// absolute convergence budget from the measure's growth profile and the
// probe's decay order before any series is summed.

#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "fqc/geometry.hpp"
#include "fqc/measures.hpp"
#include "fqc/probes.hpp"

namespace fqc {

struct SpectralLine {
  Point s;
  cplx amplitude;
};

// Finite truncation of a discrete transform: distinct frequencies, no zero
// amplitudes, all lines inside the closed dual truncation ball.
class Spectrum {
 public:
  Spectrum(std::size_t dim, std::vector<SpectralLine> lines,
           double truncation_radius);

  std::size_t dim() const { return dim_; }
  double truncation_radius() const { return truncation_radius_; }
  const std::vector<SpectralLine>& lines() const { return lines_; }
  std::size_t size() const { return lines_.size(); }

  // Reinterpret lines as point masses (for variation/growth machinery and
  // dual-side audits).
  AtomicMeasure as_measure() const;
  static Spectrum from_measure(const AtomicMeasure& m);

 private:
  std::size_t dim_;
  double truncation_radius_;
  std::vector<SpectralLine> lines_;
};

enum class TransformDirection { forward, conjugate };

struct quadrature_error : std::runtime_error {
  quadrature_error(const std::string& msg, double achieved_bound)
      : std::runtime_error(msg), achieved(achieved_bound) {}
  double achieved;  // error bound actually reached
};

// Transform of a probe at frequency y to absolute tolerance `abs_tol`.
// gaussian: closed form. bump: radial quadrature (exact cosine/Bessel kernel
// per dimension). monomial_bump: direct adaptive quadrature over the support
// (iterated per dimension for d >= 2). Non-convergence raises
// quadrature_error carrying the achieved bound.
cplx probe_fourier(const ProbeFunction& probe, const Point& y,
                   TransformDirection dir, double abs_tol = 1e-9);

// Which decay profile the guard certifies: the probe's own values (direct
// pairing against the measure) or its conjugate transform's values (spectral
// series over the lines).
enum class PairingSide { direct, spectral };

struct GuardReport {
  bool pass = false;
  double growth_exponent = 0.0;
  bool superpolynomial = false;
  int envelope_order = 0;        // N: integer growth order certified
  double decay_order = 0.0;      // fitted decay exponent (+inf when compact)
  bool decay_empirical = false;  // true when fitted from samples over |y|<=40
  double envelope_amplitude = 0.0;  // A with |H(y)| <= A (1+|y|)^{-(N+2)}
  double tail_bound = 0.0;       // A*M(1) + A*(N+1) * Int_1^R M(r) r^{-N-2} dr
  std::string reason;            // empty iff pass
  GrowthProfile profile;
};

struct guard_error : std::runtime_error {
  guard_error(const std::string& msg, GuardReport rep)
      : std::runtime_error(msg), report(std::move(rep)) {}
  GuardReport report;
};

// Certifies that pairing the object with the probe has a finite absolute
// budget: the variation growth exponent N is finite (not superpolynomial) and
// the relevant decay order exceeds N + 1. The tail bound is the explicit
// envelope constant above, with the integral evaluated by trapezoid on the
// profile grid. Empirical decay fits sample envelope maxima at non-integer
// jitters of |y| in [1, 40]; beyond that range the fit is an extrapolation
// and is flagged as such in `decay_empirical`.
GuardReport convergence_guard(const AtomicMeasure& mu,
                              const ProbeFunction& probe, PairingSide side);
GuardReport convergence_guard(const Spectrum& spec, const ProbeFunction& probe);

struct SpectralValue {
  cplx value;
  double tail_bound = 0.0;  // guard budget minus accumulated |terms|, >= 0
};

// Truncated spectral series at translate t (canonical summation order,
// compensated summation). The guard must pass; the convenience overload
// computes it and throws guard_error on refusal.
SpectralValue spectral_evaluate(const Spectrum& spec,
                                const ProbeFunction& probe, const Point& t,
                                const GuardReport& guard);
SpectralValue spectral_evaluate(const Spectrum& spec,
                                const ProbeFunction& probe, const Point& t);

struct AmplitudeEstimate {
  cplx value;      // estimate at the largest window
  double radius = 0.0;
  // (R_i, estimate) over doubling windows R/4, R/2, R for trend inspection.
  std::vector<std::pair<double, cplx>> trend;
};

// Averaged exponential sum (2R)^{-d} Sum_{|x|<R} mass * exp(-2 pi i <s,x>):
// the amplitude the transform would carry at frequency s. R must not exceed
// the truncation radius.
AmplitudeEstimate amplitude_estimate(const AtomicMeasure& mu, const Point& s,
                                     double R);

}  // namespace fqc
