#include "fqc/measures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

namespace fqc {

namespace {

void check_point(const Point& x, std::size_t dim, const char* who) {
  if (x.size() != dim)
    throw std::invalid_argument(std::string(who) + ": point dimension mismatch");
  for (double v : x)
    if (!std::isfinite(v))
      throw std::invalid_argument(std::string(who) + ": non-finite coordinate");
}

bool same_point(const Point& a, const Point& b) {
  return a == b;  // exact coordinate equality
}

// Least-squares slope of log M against log R over the index range [first,
// last] of the (radii, masses) arrays, using only points with positive mass.
// Fewer than two usable points -> 0.
double loglog_slope(const std::vector<double>& radii,
                    const std::vector<double>& masses, std::size_t first,
                    std::size_t last) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t i = first; i <= last; ++i) {
    if (!(masses[i] > 0.0)) continue;
    const double x = std::log(radii[i]);
    const double y = std::log(masses[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return 0.0;
  const double denom = double(n) * sxx - sx * sx;
  if (denom == 0.0) return 0.0;
  return (double(n) * sxy - sx * sy) / denom;
}

}  // namespace

AtomicMeasure::AtomicMeasure(std::size_t dim, std::vector<Atom> atoms,
                             double truncation_radius)
    : dim_(dim), truncation_radius_(truncation_radius) {
  if (dim_ == 0)
    throw std::invalid_argument("AtomicMeasure: dimension must be positive");
  if (std::isnan(truncation_radius_) || truncation_radius_ < 0.0)
    throw std::invalid_argument(
        "AtomicMeasure: truncation radius must be nonnegative");
  atoms_.reserve(atoms.size());
  for (Atom& a : atoms) {
    if (a.mass == cplx(0.0, 0.0)) continue;  // canonicalize zero masses away
    check_point(a.x, dim_, "AtomicMeasure");
    if (!std::isfinite(a.mass.real()) || !std::isfinite(a.mass.imag()))
      throw std::invalid_argument("AtomicMeasure: non-finite mass");
    if (norm2(a.x) > truncation_radius_)
      throw std::invalid_argument(
          "AtomicMeasure: atom outside the closed truncation ball");
    atoms_.push_back(std::move(a));
  }
  std::sort(atoms_.begin(), atoms_.end(),
            [](const Atom& a, const Atom& b) { return lex_less(a.x, b.x); });
  for (std::size_t i = 1; i < atoms_.size(); ++i)
    if (same_point(atoms_[i - 1].x, atoms_[i].x))
      throw std::invalid_argument("AtomicMeasure: duplicate atom point");
}

cplx AtomicMeasure::mass_at(const Point& x) const {
  check_point(x, dim_, "mass_at");
  auto it = std::lower_bound(
      atoms_.begin(), atoms_.end(), x,
      [](const Atom& a, const Point& p) { return lex_less(a.x, p); });
  if (it != atoms_.end() && same_point(it->x, x)) return it->mass;
  return cplx(0.0, 0.0);
}

std::pair<std::size_t, std::size_t> AtomicMeasure::coord_range(
    double lo, double hi) const {
  auto first = std::lower_bound(
      atoms_.begin(), atoms_.end(), lo,
      [](const Atom& a, double v) { return a.x[0] < v; });
  auto last = std::upper_bound(
      atoms_.begin(), atoms_.end(), hi,
      [](double v, const Atom& a) { return v < a.x[0]; });
  return {std::size_t(first - atoms_.begin()), std::size_t(last - atoms_.begin())};
}

JetDistribution::JetDistribution(std::size_t dim, int order,
                                 std::vector<JetAtom> atoms,
                                 double truncation_radius)
    : dim_(dim), order_(order), truncation_radius_(truncation_radius) {
  if (dim_ == 0)
    throw std::invalid_argument("JetDistribution: dimension must be positive");
  if (order_ < 0)
    throw std::invalid_argument("JetDistribution: order must be nonnegative");
  if (std::isnan(truncation_radius_) || truncation_radius_ < 0.0)
    throw std::invalid_argument(
        "JetDistribution: truncation radius must be nonnegative");
  atoms_.reserve(atoms.size());
  for (JetAtom& a : atoms) {
    check_point(a.x, dim_, "JetDistribution");
    if (norm2(a.x) > truncation_radius_)
      throw std::invalid_argument(
          "JetDistribution: atom outside the closed truncation ball");
    std::map<MultiIndex, cplx> kept;
    for (const auto& [j, c] : a.jets) {
      if (j.size() != dim_)
        throw std::invalid_argument("JetDistribution: multi-index dimension");
      for (int k : j) {
        if (k < 0)
          throw std::invalid_argument(
              "JetDistribution: multi-index entries must be nonnegative");
        if (k > order_)
          throw std::invalid_argument(
              "JetDistribution: multi-index exceeds the declared order");
      }
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw std::invalid_argument("JetDistribution: non-finite coefficient");
      if (c == cplx(0.0, 0.0)) continue;  // canonicalize zero coefficients
      kept.emplace(j, c);
    }
    if (kept.empty()) continue;  // atoms with no nonzero coefficient drop out
    atoms_.push_back(JetAtom{std::move(a.x), std::move(kept)});
  }
  std::sort(atoms_.begin(), atoms_.end(), [](const JetAtom& a, const JetAtom& b) {
    return lex_less(a.x, b.x);
  });
  for (std::size_t i = 1; i < atoms_.size(); ++i)
    if (same_point(atoms_[i - 1].x, atoms_[i].x))
      throw std::invalid_argument("JetDistribution: duplicate atom point");
}

cplx JetDistribution::coeff_at(const Point& x, const MultiIndex& j) const {
  check_point(x, dim_, "coeff_at");
  auto it = std::lower_bound(
      atoms_.begin(), atoms_.end(), x,
      [](const JetAtom& a, const Point& p) { return lex_less(a.x, p); });
  if (it == atoms_.end() || !same_point(it->x, x)) return cplx(0.0, 0.0);
  auto jt = it->jets.find(j);
  return jt == it->jets.end() ? cplx(0.0, 0.0) : jt->second;
}

JetDistribution JetDistribution::from_measure(const AtomicMeasure& mu) {
  std::vector<JetAtom> atoms;
  atoms.reserve(mu.size());
  const MultiIndex zero(mu.dim(), 0);
  for (const Atom& a : mu.atoms())
    atoms.push_back(JetAtom{a.x, {{zero, a.mass}}});
  return JetDistribution(mu.dim(), 0, std::move(atoms), mu.truncation_radius());
}

AtomicMeasure total_variation(const AtomicMeasure& mu) {
  std::vector<Atom> atoms;
  atoms.reserve(mu.size());
  for (const Atom& a : mu.atoms())
    atoms.push_back(Atom{a.x, cplx(std::abs(a.mass), 0.0)});
  return AtomicMeasure(mu.dim(), std::move(atoms), mu.truncation_radius());
}

cplx total_mass(const AtomicMeasure& mu) {
  cplx s(0.0, 0.0);
  for (const Atom& a : mu.atoms()) s += a.mass;
  return s;
}

double variation_in_ball(const AtomicMeasure& mu, double R) {
  double s = 0.0;
  for (const Atom& a : mu.atoms())
    if (norm2(a.x) < R) s += std::abs(a.mass);
  return s;
}

GrowthProfile growth_profile(const AtomicMeasure& mu,
                             const std::vector<double>& radii, double factor) {
  if (radii.size() < 3)
    throw std::invalid_argument("growth_profile: need at least 3 radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0))
      throw std::invalid_argument("growth_profile: radii must be positive");
    if (i > 0 && !(radii[i] > radii[i - 1]))
      throw std::invalid_argument("growth_profile: radii must be increasing");
    if (radii[i] > mu.truncation_radius())
      throw std::invalid_argument(
          "growth_profile: radius beyond the truncation radius");
  }
  GrowthProfile profile;
  profile.radii = radii;
  profile.factor = factor;
  profile.masses.reserve(radii.size());
  for (double r : radii) profile.masses.push_back(variation_in_ball(mu, r));

  const std::size_t n = radii.size();
  const std::size_t half = (n + 1) / 2;  // halves overlap for odd n
  profile.fitted_exponent = loglog_slope(radii, profile.masses, 0, n - 1);
  profile.first_half_slope = loglog_slope(radii, profile.masses, 0, half - 1);
  profile.last_half_slope = loglog_slope(radii, profile.masses, n - half, n - 1);
  profile.superpolynomial =
      profile.first_half_slope > 1e-9
          ? profile.last_half_slope > factor * profile.first_half_slope
          : profile.last_half_slope > factor;
  return profile;
}

double min_separation(const std::vector<Point>& points) {
  if (points.size() < 2) return kInf;
  double best = kInf;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      best = std::min(best, dist(points[i], points[j]));
  return best;
}

SparsityBound sparsity_bound(const std::vector<Point>& points,
                             const BallUnion& domain, double sample_step) {
  if (!(sample_step > 0.0))
    throw std::invalid_argument("sparsity_bound: sample_step must be positive");
  SparsityBound bound;
  const std::size_t d =
      !points.empty() ? points[0].size() : domain.dim();
  bound.exact = (d == 1);
  if (d == 0) return bound;

  std::vector<Point> candidates;
  for (const Point& p : points)
    if (domain.contains(p)) candidates.push_back(p);
  // Midpoints of pairs that an open unit ball could jointly see: in d = 1 the
  // midpoint of a maximizing set's extreme pair always attains the max.
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (dist(points[i], points[j]) >= 2.0) continue;
      Point mid(d);
      for (std::size_t k = 0; k < d; ++k)
        mid[k] = 0.5 * (points[i][k] + points[j][k]);
      if (domain.contains(mid)) candidates.push_back(std::move(mid));
    }
  // Lattice sweep over each ball's bounding box.
  for (const Ball& b : domain.balls()) {
    std::vector<std::size_t> extent(d);
    std::size_t total = 1;
    for (std::size_t k = 0; k < d; ++k) {
      extent[k] = std::size_t(std::floor(2.0 * b.radius / sample_step)) + 1;
      total *= extent[k];
    }
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rem = idx;
      Point x(d);
      for (std::size_t k = 0; k < d; ++k) {
        x[k] = b.center[k] - b.radius + double(rem % extent[k]) * sample_step;
        rem /= extent[k];
      }
      if (dist(x, b.center) < b.radius) candidates.push_back(std::move(x));
    }
  }

  int best = 0;
  for (const Point& c : candidates) {
    int count = 0;
    for (const Point& p : points)
      if (dist(p, c) < 1.0) ++count;
    best = std::max(best, count);
  }
  bound.count = best;
  return bound;
}

AtomicMeasure restrict(const AtomicMeasure& mu, const BallUnion& domain) {
  std::vector<Atom> kept;
  for (const Atom& a : mu.atoms())
    if (domain.contains(a.x)) kept.push_back(a);
  return AtomicMeasure(mu.dim(), std::move(kept), mu.truncation_radius());
}

AtomicMeasure shifted(const AtomicMeasure& mu, const Point& v) {
  check_point(v, mu.dim(), "shifted");
  std::vector<Atom> atoms;
  atoms.reserve(mu.size());
  for (const Atom& a : mu.atoms()) {
    Point x = a.x;
    for (std::size_t k = 0; k < x.size(); ++k) x[k] += v[k];
    atoms.push_back(Atom{std::move(x), a.mass});
  }
  return AtomicMeasure(mu.dim(), std::move(atoms),
                       mu.truncation_radius() + norm2(v));
}

AtomicMeasure scaled(const AtomicMeasure& mu, cplx c) {
  if (c == cplx(0.0, 0.0))
    throw std::invalid_argument("scaled: scalar must be nonzero");
  std::vector<Atom> atoms;
  atoms.reserve(mu.size());
  for (const Atom& a : mu.atoms()) atoms.push_back(Atom{a.x, c * a.mass});
  return AtomicMeasure(mu.dim(), std::move(atoms), mu.truncation_radius());
}

ClusterDecomposition cluster_decompose(const AtomicMeasure& mu,
                                       const AtomicMeasure& nu,
                                       const BallUnion& domain, double gap,
                                       double sample_step) {
  if (!(gap > 0.0))
    throw std::invalid_argument("cluster_decompose: gap must be positive");
  if (mu.dim() != nu.dim())
    throw std::invalid_argument("cluster_decompose: dimension mismatch");

  struct Node {
    Point x;
    bool from_mu;
    std::size_t index;
  };
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (domain.contains(mu.atoms()[i].x))
      nodes.push_back(Node{mu.atoms()[i].x, true, i});
  for (std::size_t i = 0; i < nu.size(); ++i)
    if (domain.contains(nu.atoms()[i].x))
      nodes.push_back(Node{nu.atoms()[i].x, false, i});

  // Single-linkage union-find: nodes at distance <= gap share a cluster.
  std::vector<std::size_t> parent(nodes.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = i + 1; j < nodes.size(); ++j)
      if (dist(nodes[i].x, nodes[j].x) <= gap) {
        const std::size_t a = find(i), b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }

  std::vector<std::vector<std::size_t>> groups(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) groups[find(i)].push_back(i);

  ClusterDecomposition decomp;
  decomp.domain = domain;
  decomp.gap = gap;
  for (const auto& members : groups) {
    if (members.empty()) continue;
    Cluster cluster;
    cluster.representative = nodes[members[0]].x;
    for (std::size_t m : members) {
      const Node& node = nodes[m];
      if (node.from_mu)
        cluster.mu_atoms.push_back(node.index);
      else
        cluster.nu_atoms.push_back(node.index);
      if (lex_less(node.x, cluster.representative))
        cluster.representative = node.x;
    }
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b)
        cluster.diameter = std::max(
            cluster.diameter, dist(nodes[members[a]].x, nodes[members[b]].x));
    std::sort(cluster.mu_atoms.begin(), cluster.mu_atoms.end());
    std::sort(cluster.nu_atoms.begin(), cluster.nu_atoms.end());
    decomp.clusters.push_back(std::move(cluster));
  }
  std::sort(decomp.clusters.begin(), decomp.clusters.end(),
            [](const Cluster& a, const Cluster& b) {
              return radial_lex_less(a.representative, b.representative);
            });

  std::vector<Point> reps;
  reps.reserve(decomp.clusters.size());
  for (const Cluster& c : decomp.clusters) reps.push_back(c.representative);
  const SparsityBound bound = sparsity_bound(reps, domain, sample_step);
  decomp.count_bound = bound.count;
  decomp.count_exact = bound.exact;
  return decomp;
}

ClusterStats cluster_stats(const ClusterDecomposition& decomp,
                           const AtomicMeasure& mu, const AtomicMeasure& nu) {
  ClusterStats stats;
  stats.rows.reserve(decomp.clusters.size());
  for (const Cluster& c : decomp.clusters) {
    for (std::size_t i : c.mu_atoms)
      if (i >= mu.size())
        throw std::invalid_argument("cluster_stats: stale index into mu");
    for (std::size_t i : c.nu_atoms)
      if (i >= nu.size())
        throw std::invalid_argument("cluster_stats: stale index into nu");
    ClusterRow row;
    row.rep_radius = norm2(c.representative);
    row.diameter = c.diameter;
    cplx gap(0.0, 0.0);
    for (std::size_t i : c.mu_atoms) gap += mu.atoms()[i].mass;
    for (std::size_t i : c.nu_atoms) gap -= nu.atoms()[i].mass;
    row.mass_gap = gap;
    stats.rows.push_back(row);
  }
  stats.suffix.resize(stats.rows.size());
  double max_diam = 0.0, max_gap = 0.0;
  for (std::size_t i = stats.rows.size(); i-- > 0;) {
    max_diam = std::max(max_diam, stats.rows[i].diameter);
    max_gap = std::max(max_gap, std::abs(stats.rows[i].mass_gap));
    stats.suffix[i] =
        TrendRow{stats.rows[i].rep_radius, max_diam, max_gap};
  }
  return stats;
}

}  // namespace fqc
