// Deterministic generators for the test measures: modulated lattice combs
// (with exact dual lines), a golden-ratio cut-and-project point set, the
// growing-dipole counterexample chain, and structured perturbations.

#pragma once

#include <cstddef>
#include <functional>

#include "fqc/geometry.hpp"
#include "fqc/measures.hpp"
#include "fqc/spectral.hpp"

namespace fqc {

struct CombResult {
  AtomicMeasure measure;
  Spectrum spectrum;
};

// Modulated lattice comb: atoms at a*Z^d inside the open ball |x| < R with
// masses mass * exp(2 pi i <theta, lambda>); its transform is the dual comb
// on a^{-1}*Z^d + theta with constant amplitude mass * a^{-d}, truncated at
// dual_truncation (0 -> same radius R). spacing and truncation must be
// positive; modulation must have length d.
CombResult dirac_comb(std::size_t dim, double spacing, cplx mass,
                      const Point& modulation, double truncation,
                      double dual_truncation = 0.0);

// Golden-ratio cut-and-project set on the line: accept integer pairs
// (n1, n2) when n1 + n2*(1-sqrt(5))/2 lies in the half-open window [w0, w1),
// and emit the physical point n1 + n2*(1+sqrt(5))/2 when |point| < R, unit
// masses, sorted by coordinate. Window length must be positive and at most
// 1 + (1+sqrt(5))/2 (so neighbor gaps stay in the two-length alphabet).
AtomicMeasure model_set(double w0, double w1, double R);

// Growing dipole chain: pairs 2^{n-1} * (delta_{n + 2^{-n}} - delta_{n - 2^{-n}})
// for n = 1..n_max. Total variation through the n-th pair is 2^{n+1} - 2.
// n_max must be in [1, 40] (atom separations stay exactly representable).
AtomicMeasure dipole_chain(int n_max);

// Structured perturbation: each atom (x, m) becomes (x + offset(x), m +
// mass_shift(x)). Either function may be empty (identity / zero shift).
// Throws if perturbed positions collide or leave the truncation ball.
AtomicMeasure perturb(const AtomicMeasure& mu,
                      const std::function<Point(const Point&)>& offset,
                      const std::function<cplx(const Point&)>& mass_shift);

}  // namespace fqc
