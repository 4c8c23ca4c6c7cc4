#include "fqc/generators.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fqc {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Enumerate integer tuples n with |n_k| <= bound_k, invoking fn on each.
template <typename Fn>
void integer_box(const std::vector<long>& bounds, Fn&& fn) {
  const std::size_t d = bounds.size();
  std::vector<long> n(d);
  for (std::size_t k = 0; k < d; ++k) n[k] = -bounds[k];
  for (;;) {
    fn(n);
    std::size_t k = 0;
    while (k < d && n[k] == bounds[k]) {
      n[k] = -bounds[k];
      ++k;
    }
    if (k == d) break;
    ++n[k];
  }
}

}  // namespace

CombResult dirac_comb(std::size_t dim, double spacing, cplx mass,
                      const Point& modulation, double truncation,
                      double dual_truncation) {
  if (dim == 0) throw std::invalid_argument("dirac_comb: dimension must be positive");
  if (!(spacing > 0.0))
    throw std::invalid_argument("dirac_comb: spacing must be positive");
  if (!(truncation > 0.0))
    throw std::invalid_argument("dirac_comb: truncation must be positive");
  if (modulation.size() != dim)
    throw std::invalid_argument("dirac_comb: modulation dimension mismatch");
  const double dual_radius =
      dual_truncation > 0.0 ? dual_truncation : truncation;

  std::vector<Atom> atoms;
  {
    const long bound = long(std::floor(truncation / spacing));
    std::vector<long> bounds(dim, bound);
    integer_box(bounds, [&](const std::vector<long>& n) {
      Point x(dim);
      double phase = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        x[k] = spacing * double(n[k]);
        phase += modulation[k] * x[k];
      }
      if (!(norm2(x) < truncation)) return;
      atoms.push_back(Atom{std::move(x), mass * std::polar(1.0, 2.0 * kPi * phase)});
    });
  }

  std::vector<SpectralLine> lines;
  {
    const cplx amplitude = mass * std::pow(spacing, -double(dim));
    double mod_norm = norm2(modulation);
    const long bound =
        long(std::floor((dual_radius + mod_norm) * spacing)) + 1;
    std::vector<long> bounds(dim, bound);
    integer_box(bounds, [&](const std::vector<long>& n) {
      Point s(dim);
      for (std::size_t k = 0; k < dim; ++k)
        s[k] = double(n[k]) / spacing + modulation[k];
      if (!(norm2(s) < dual_radius)) return;
      lines.push_back(SpectralLine{std::move(s), amplitude});
    });
  }

  return CombResult{AtomicMeasure(dim, std::move(atoms), truncation),
                    Spectrum(dim, std::move(lines), dual_radius)};
}

AtomicMeasure model_set(double w0, double w1, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("model_set: radius must be positive");
  if (!std::isfinite(w0) || !std::isfinite(w1) || w1 < w0)
    throw std::invalid_argument("model_set: window must satisfy w0 <= w1");
  const double tau = 0.5 * (1.0 + std::sqrt(5.0));
  const double tau_conj = 0.5 * (1.0 - std::sqrt(5.0));
  if (w1 - w0 > 1.0 + tau + 1e-12)
    throw std::invalid_argument("model_set: window longer than 1 + tau");

  std::vector<Atom> atoms;
  const long n2_bound =
      long(std::ceil((R + std::abs(w0) + std::abs(w1) + 2.0) / std::sqrt(5.0))) +
      2;
  for (long n2 = -n2_bound; n2 <= n2_bound; ++n2) {
    const double base = double(n2) * tau_conj;
    const long n1_lo = long(std::floor(w0 - base)) - 1;
    const long n1_hi = long(std::ceil(w1 - base)) + 1;
    for (long n1 = n1_lo; n1 <= n1_hi; ++n1) {
      const double internal = double(n1) + base;
      if (!(internal >= w0 && internal < w1)) continue;
      const double x = double(n1) + double(n2) * tau;
      if (!(std::abs(x) < R)) continue;
      atoms.push_back(Atom{Point{x}, cplx(1.0, 0.0)});
    }
  }
  return AtomicMeasure(1, std::move(atoms), R);
}

AtomicMeasure dipole_chain(int n_max) {
  if (n_max < 1 || n_max > 40)
    throw std::invalid_argument("dipole_chain: pair count must be in [1, 40]");
  std::vector<Atom> atoms;
  atoms.reserve(2 * std::size_t(n_max));
  for (int n = 1; n <= n_max; ++n) {
    const double offset = std::ldexp(1.0, -n);   // exact dyadic
    const double weight = std::ldexp(1.0, n - 1);
    atoms.push_back(Atom{Point{double(n) + offset}, cplx(weight, 0.0)});
    atoms.push_back(Atom{Point{double(n) - offset}, cplx(-weight, 0.0)});
  }
  return AtomicMeasure(1, std::move(atoms), double(n_max) + 1.0);
}

AtomicMeasure perturb(const AtomicMeasure& mu,
                      const std::function<Point(const Point&)>& offset,
                      const std::function<cplx(const Point&)>& mass_shift) {
  std::vector<Atom> atoms;
  atoms.reserve(mu.size());
  for (const Atom& a : mu.atoms()) {
    Point x = a.x;
    if (offset) {
      const Point delta = offset(a.x);
      if (delta.size() != mu.dim())
        throw std::invalid_argument("perturb: offset dimension mismatch");
      for (std::size_t k = 0; k < x.size(); ++k) x[k] += delta[k];
    }
    cplx m = a.mass;
    if (mass_shift) m += mass_shift(a.x);
    atoms.push_back(Atom{std::move(x), m});
  }
  // The measure constructor validates distinctness and the truncation ball.
  return AtomicMeasure(mu.dim(), std::move(atoms), mu.truncation_radius());
}

}  // namespace fqc
