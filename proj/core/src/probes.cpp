#include "fqc/probes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fqc {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kStencilPitch = 1e-3;

double gblend(double s) { return std::exp(-1.0 / s); }  // s > 0

// Physicists' Hermite polynomial H_n(z) by the stable upward recursion.
double hermite(int n, double z) {
  double h0 = 1.0;
  if (n == 0) return h0;
  double h1 = 2.0 * z;
  for (int k = 1; k < n; ++k) {
    const double h2 = 2.0 * z * h1 - 2.0 * double(k) * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

// d^n/du^n exp(-pi u^2), closed form.
double gaussian_derivative_1d(int n, double u) {
  const double z = std::sqrt(kPi) * u;
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return sign * std::pow(kPi, 0.5 * double(n)) * hermite(n, z) *
         std::exp(-kPi * u * u);
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= double(k);
  return f;
}

// 5-point central stencil weights for d^k/dx^k at offsets -2..2, premultiplied
// by the required power of 1/h at call time.
struct Stencil {
  double w[5];
  double hpow;      // k
  int accuracy;     // Richardson order p: 4 for k <= 2, 2 for k >= 3
};

Stencil stencil_for(int k) {
  switch (k) {
    case 1:
      return Stencil{{1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12}, 1, 4};
    case 2:
      return Stencil{{-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12},
                     2, 4};
    case 3:
      return Stencil{{-0.5, 1.0, 0.0, -1.0, 0.5}, 3, 2};
    case 4:
      return Stencil{{1.0, -4.0, 6.0, -4.0, 1.0}, 4, 2};
    default:
      throw std::domain_error("stencil_for: unsupported derivative order");
  }
}

}  // namespace

double bump_profile(double t) {
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  const double a = gblend(2.0 - t);
  const double b = gblend(t - 1.0);
  return a / (a + b);
}

double bump_profile_derivative(double t) {
  if (t <= 1.0 || t >= 2.0) return 0.0;
  // p = A/(A+B), A = g(2-t), B = g(t-1): p' = (A'B - AB') / (A+B)^2.
  const double a = gblend(2.0 - t);
  const double b = gblend(t - 1.0);
  const double da = -gblend(2.0 - t) / ((2.0 - t) * (2.0 - t));
  const double db = gblend(t - 1.0) / ((t - 1.0) * (t - 1.0));
  const double denom = (a + b) * (a + b);
  return (da * b - a * db) / denom;
}

double bump_profile_max_slope() {
  // Scanned sup of |p'| over (1,2) with a 5% safety margin; the profile's
  // slope peaks at the midpoint with |p'(1.5)| = 2 exactly.
  static const double bound = [] {
    double best = 0.0;
    for (int i = 1; i < 10000; ++i)
      best = std::max(best, std::abs(bump_profile_derivative(1.0 + i * 1e-4)));
    return best * 1.05;
  }();
  return bound;
}

ProbeFunction::ProbeFunction(std::size_t dim, ProbeKind kind)
    : dim_(dim), kind_(kind), shift_(dim, 0.0) {
  if (dim_ == 0)
    throw std::invalid_argument("ProbeFunction: dimension must be positive");
  budget_ = (kind_ == ProbeKind::gaussian) ? 12 : 4;
}

ProbeFunction ProbeFunction::gaussian(std::size_t dim) {
  return ProbeFunction(dim, ProbeKind::gaussian);
}

ProbeFunction ProbeFunction::standard_bump(std::size_t dim) {
  return ProbeFunction(dim, ProbeKind::bump);
}

ProbeFunction ProbeFunction::monomial_bump(const MultiIndex& j0, double rho) {
  if (j0.empty())
    throw std::invalid_argument("monomial_bump: empty multi-index");
  for (int k : j0)
    if (k < 0)
      throw std::invalid_argument("monomial_bump: negative multi-index entry");
  if (!(rho > 0.0))
    throw std::invalid_argument("monomial_bump: rho must be positive");
  ProbeFunction p(j0.size(), ProbeKind::monomial_bump);
  p.rho_ = rho;
  p.j0_ = j0;
  return p;
}

ProbeFunction ProbeFunction::scaled_translated(double scale,
                                               const Point& shift) const {
  if (!(scale > 0.0))
    throw std::invalid_argument("scaled_translated: scale must be positive");
  if (shift.size() != dim_)
    throw std::invalid_argument("scaled_translated: shift dimension mismatch");
  // this((x - shift)/scale) composed with the stored affine slot:
  // base((x - shift - scale*shift_) / (scale * scale_)).
  ProbeFunction out = *this;
  out.scale_ = scale_ * scale;
  out.shift_.resize(dim_);
  for (std::size_t k = 0; k < dim_; ++k)
    out.shift_[k] = shift[k] + scale * shift_[k];
  return out;
}

double ProbeFunction::support_radius() const {
  switch (kind_) {
    case ProbeKind::gaussian:
      return kInf;
    case ProbeKind::bump:
      return 2.0 * scale_;
    case ProbeKind::monomial_bump:
      return 2.0 * rho_ * scale_;
  }
  return kInf;
}

double ProbeFunction::value(const Point& x) const {
  if (x.size() != dim_)
    throw std::invalid_argument("ProbeFunction: point dimension mismatch");
  Point u(dim_);
  for (std::size_t k = 0; k < dim_; ++k) u[k] = (x[k] - shift_[k]) / scale_;
  switch (kind_) {
    case ProbeKind::gaussian: {
      double s = 0.0;
      for (double v : u) s += v * v;
      return std::exp(-kPi * s);
    }
    case ProbeKind::bump:
      return bump_profile(norm2(u));
    case ProbeKind::monomial_bump: {
      double m = 1.0;
      for (std::size_t k = 0; k < dim_; ++k) {
        for (int e = 0; e < j0_[k]; ++e) m *= u[k];
        m /= factorial(j0_[k]);
      }
      return bump_profile(norm2(u) / rho_) * m;
    }
  }
  return 0.0;
}

namespace {

// Base-coordinate value of the probe (affine slot already removed).
double base_value(const ProbeFunction& probe, const Point& u) {
  switch (probe.kind()) {
    case ProbeKind::gaussian: {
      double s = 0.0;
      for (double v : u) s += v * v;
      return std::exp(-kPi * s);
    }
    case ProbeKind::bump:
      return bump_profile(norm2(u));
    case ProbeKind::monomial_bump: {
      double m = 1.0;
      for (std::size_t k = 0; k < u.size(); ++k) {
        for (int e = 0; e < probe.j0()[k]; ++e) m *= u[k];
        m /= factorial(probe.j0()[k]);
      }
      return bump_profile(norm2(u) / probe.rho()) * m;
    }
  }
  return 0.0;
}

// Tensor-product stencil application over the active dimensions at pitch h.
double stencil_pass(const ProbeFunction& probe, const MultiIndex& j,
                    const Point& u, double h) {
  std::vector<std::size_t> active;
  for (std::size_t k = 0; k < j.size(); ++k)
    if (j[k] > 0) active.push_back(k);
  if (active.empty()) return base_value(probe, u);

  std::vector<Stencil> stencils;
  stencils.reserve(active.size());
  for (std::size_t k : active) stencils.push_back(stencil_for(j[k]));

  Point work = u;
  double scale = 1.0;
  for (const Stencil& s : stencils) scale /= std::pow(h, s.hpow);

  // Mixed-radix walk over offset tuples in {-2..2}^active.
  const std::size_t dims = active.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < dims; ++i) total *= 5;
  double acc = 0.0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    double w = 1.0;
    for (std::size_t i = 0; i < dims; ++i) {
      const int offset = int(rem % 5) - 2;
      rem /= 5;
      w *= stencils[i].w[offset + 2];
      work[active[i]] = u[active[i]] + double(offset) * h;
    }
    if (w != 0.0) acc += w * base_value(probe, work);
    // Reset the touched coordinates for the next tuple.
    for (std::size_t i = 0; i < dims; ++i) work[active[i]] = u[active[i]];
  }
  return acc * scale;
}

}  // namespace

double derivative_eval(const ProbeFunction& probe, const MultiIndex& j,
                       const Point& x) {
  if (j.size() != probe.dim())
    throw std::invalid_argument("derivative_eval: multi-index dimension");
  if (x.size() != probe.dim())
    throw std::invalid_argument("derivative_eval: point dimension");
  int jmax = 0;
  for (int k : j) {
    if (k < 0)
      throw std::invalid_argument("derivative_eval: negative multi-index");
    jmax = std::max(jmax, k);
  }
  if (jmax > probe.evaluation_budget())
    throw std::domain_error(
        "derivative_eval: order exceeds the probe's evaluation budget");

  // Affine chain rule: D^j [base((x - t)/s)] = s^{-|j|_1} (D^j base)(u).
  Point u(probe.dim());
  int order_total = 0;
  for (std::size_t k = 0; k < probe.dim(); ++k) {
    u[k] = (x[k] - probe.shift()[k]) / probe.scale();
    order_total += j[k];
  }
  const double chain = std::pow(probe.scale(), -double(order_total));

  if (probe.kind() == ProbeKind::gaussian) {
    double prod = 1.0;
    for (std::size_t k = 0; k < probe.dim(); ++k)
      prod *= gaussian_derivative_1d(j[k], u[k]);
    return chain * prod;
  }

  if (order_total == 0) return base_value(probe, u);

  int p = 4;
  for (int k : j)
    if (k >= 3) p = 2;
  const double coarse = stencil_pass(probe, j, u, kStencilPitch);
  const double fine = stencil_pass(probe, j, u, kStencilPitch / 2.0);
  const double pw = std::pow(2.0, double(p));
  return chain * (pw * fine - coarse) / (pw - 1.0);
}

SchwartzNormBound schwartz_norm(const ProbeFunction& probe, int m,
                                const GridBox& grid) {
  if (m < 0 || m > probe.evaluation_budget())
    throw std::invalid_argument("schwartz_norm: order outside the budget");
  if (grid.lo.size() != probe.dim() || grid.hi.size() != probe.dim())
    throw std::invalid_argument("schwartz_norm: grid dimension mismatch");
  if (!(grid.pitch > 0.0))
    throw std::invalid_argument("schwartz_norm: pitch must be positive");
  const std::size_t d = probe.dim();
  std::vector<std::size_t> extent(d);
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) {
    if (grid.hi[k] < grid.lo[k])
      throw std::invalid_argument("schwartz_norm: empty grid box");
    extent[k] =
        std::size_t(std::floor((grid.hi[k] - grid.lo[k]) / grid.pitch)) + 1;
    total *= extent[k];
  }

  // All multi-indices with entries in 0..m.
  std::vector<MultiIndex> indices;
  std::size_t index_count = 1;
  for (std::size_t k = 0; k < d; ++k) index_count *= std::size_t(m) + 1;
  indices.reserve(index_count);
  for (std::size_t idx = 0; idx < index_count; ++idx) {
    std::size_t rem = idx;
    MultiIndex j(d);
    for (std::size_t k = 0; k < d; ++k) {
      j[k] = int(rem % (std::size_t(m) + 1));
      rem /= std::size_t(m) + 1;
    }
    indices.push_back(std::move(j));
  }

  double best = 0.0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    Point x(d);
    for (std::size_t k = 0; k < d; ++k) {
      x[k] = grid.lo[k] + double(rem % extent[k]) * grid.pitch;
      rem /= extent[k];
    }
    double dmax = 0.0;
    for (const MultiIndex& j : indices)
      dmax = std::max(dmax, std::abs(derivative_eval(probe, j, x)));
    const double weight = std::pow(std::max(1.0, norm2(x)), double(m));
    best = std::max(best, weight * dmax);
  }
  return SchwartzNormBound{best, grid.pitch};
}

cplx pair_measure(const AtomicMeasure& mu, const ProbeFunction& probe,
                  const Point& t, double scale) {
  if (t.size() != mu.dim() || probe.dim() != mu.dim())
    throw std::invalid_argument("pair_measure: dimension mismatch");
  if (!(scale > 0.0))
    throw std::invalid_argument("pair_measure: scale must be positive");
  const ProbeFunction translated = probe.scaled_translated(scale, t);
  cplx acc(0.0, 0.0);
  const double r = translated.support_radius();
  if (r < kInf) {
    // Lex order sorts atoms by first coordinate: restrict to the support's
    // first-coordinate slab, preserving canonical summation order.
    const double c0 = translated.support_center()[0];
    const auto [first, last] = mu.coord_range(c0 - r, c0 + r);
    for (std::size_t i = first; i < last; ++i)
      acc += mu.atoms()[i].mass * translated.value(mu.atoms()[i].x);
  } else {
    for (const Atom& a : mu.atoms()) acc += a.mass * translated.value(a.x);
  }
  return acc;
}

cplx pair_jets(const JetDistribution& f, const ProbeFunction& probe,
               const Point& t) {
  if (t.size() != f.dim() || probe.dim() != f.dim())
    throw std::invalid_argument("pair_jets: dimension mismatch");
  if (probe.evaluation_budget() < f.order())
    throw std::invalid_argument(
        "pair_jets: probe evaluation budget below the jet order");
  const auto& atoms = f.atoms();
  std::size_t first = 0, last = atoms.size();
  const double r = probe.support_radius();
  if (r < kInf) {
    // D^j psi(lambda - t) vanishes unless lambda - t is in the support ball;
    // atoms are lex-sorted, so filter on the first coordinate.
    const double lo = t[0] + probe.support_center()[0] - r;
    const double hi = t[0] + probe.support_center()[0] + r;
    first = std::size_t(
        std::lower_bound(atoms.begin(), atoms.end(), lo,
                         [](const JetAtom& a, double v) { return a.x[0] < v; }) -
        atoms.begin());
    last = std::size_t(
        std::upper_bound(atoms.begin(), atoms.end(), hi,
                         [](double v, const JetAtom& a) { return v < a.x[0]; }) -
        atoms.begin());
  }
  cplx acc(0.0, 0.0);
  Point arg(f.dim());
  for (std::size_t i = first; i < last; ++i) {
    const JetAtom& a = atoms[i];
    for (std::size_t k = 0; k < arg.size(); ++k) arg[k] = a.x[k] - t[k];
    // Coefficients multiply plain probe derivatives: no (-1)^|j| factor (the
    // coefficients are "plain-derivative jets", not distributional ones).
    for (const auto& [j, coeff] : a.jets)
      acc += coeff * derivative_eval(probe, j, arg);
  }
  return acc;
}

}  // namespace fqc
