// Atomic measures with bounded local structure, jet-decorated atoms, and the
// counting/cluster machinery built on them.
//
// An AtomicMeasure is a finite truncation Sum_i m_i * delta_{x_i} with complex
// masses: all points distinct, no zero masses, all atoms inside the closed
// ball of the declared truncation radius. Growth is measured through open
// balls M(R) = |mu|(B(0,R)); "sparse" means the open unit-ball atom count is
// uniformly bounded, which sparsity_bound estimates (exactly in d = 1).
//
// All types are immutable after construction and all operations are pure.

#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <vector>

#include "fqc/geometry.hpp"

namespace fqc {

struct Atom {
  Point x;
  cplx mass;
};

class AtomicMeasure {
 public:
  // Validates invariants: consistent dimension, distinct points (exact
  // coordinate equality), atoms inside the closed truncation ball. Atoms with
  // exactly zero mass are canonicalized away. Atom order is canonical
  // (lexicographic by coordinates).
  AtomicMeasure(std::size_t dim, std::vector<Atom> atoms,
                double truncation_radius);

  std::size_t dim() const { return dim_; }
  double truncation_radius() const { return truncation_radius_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

  // Exact-coordinate point mass; zero for points not in the support.
  cplx mass_at(const Point& x) const;

  // Indices of atoms with first coordinate in [lo, hi] (all coordinates are
  // lex-sorted, so this is a contiguous range). Used for support queries.
  std::pair<std::size_t, std::size_t> coord_range(double lo, double hi) const;

 private:
  std::size_t dim_;
  double truncation_radius_;
  std::vector<Atom> atoms_;
};

using MultiIndex = std::vector<int>;

struct JetAtom {
  Point x;
  // Coefficient p_{x,j} per multi-index j with ||j||_inf <= order. The map is
  // ordered, so iteration is deterministic (lexicographic in j).
  std::map<MultiIndex, cplx> jets;
};

// Finitely many atoms, each carrying a jet of coefficients up to a fixed
// componentwise order m. Pairing convention (see pair_jets): coefficients
// multiply plain derivatives of the test function, with no alternating sign.
class JetDistribution {
 public:
  JetDistribution(std::size_t dim, int order, std::vector<JetAtom> atoms,
                  double truncation_radius);

  std::size_t dim() const { return dim_; }
  int order() const { return order_; }
  double truncation_radius() const { return truncation_radius_; }
  const std::vector<JetAtom>& atoms() const { return atoms_; }

  // Coefficient lookup; zero when the point or the multi-index is absent.
  cplx coeff_at(const Point& x, const MultiIndex& j) const;

  // Order-zero embedding of an atomic measure (masses become j = 0 coeffs).
  static JetDistribution from_measure(const AtomicMeasure& mu);

 private:
  std::size_t dim_;
  int order_;
  double truncation_radius_;
  std::vector<JetAtom> atoms_;
};

// Open-ball variation masses M(R_k) over an increasing radius schedule, with a
// log-log least-squares exponent. `superpolynomial` is set when the slope over
// the last half of the radii exceeds `factor` times the slope over the first
// half (both halves are reported for diagnostics).
struct GrowthProfile {
  std::vector<double> radii;
  std::vector<double> masses;
  double fitted_exponent = 0.0;
  double first_half_slope = 0.0;
  double last_half_slope = 0.0;
  double factor = 1.5;
  bool superpolynomial = false;
};

struct SparsityBound {
  int count = 0;
  // d = 1 enumerates all candidate maximizers, so the bound is exact; in
  // d >= 2 it is a sampled lower bound.
  bool exact = false;
};

// One group of nearby atoms from a measure pair, produced by single-linkage
// grouping inside a domain. Index lists refer to the originating measures'
// atom arrays.
struct Cluster {
  std::vector<std::size_t> mu_atoms;
  std::vector<std::size_t> nu_atoms;
  Point representative;  // lexicographically smallest member point
  double diameter = 0.0;
};

struct ClusterDecomposition {
  std::vector<Cluster> clusters;  // sorted by (|representative|, lex)
  BallUnion domain;
  double gap = 0.0;     // linkage distance used
  int count_bound = 0;  // unit-ball count bound N over representatives
  bool count_exact = false;
};

struct ClusterRow {
  double rep_radius = 0.0;
  double diameter = 0.0;
  cplx mass_gap;  // mu(cluster) - nu(cluster)
};

struct TrendRow {
  double radius = 0.0;  // |representative| threshold
  double max_diameter_beyond = 0.0;
  double max_abs_gap_beyond = 0.0;
};

struct ClusterStats {
  std::vector<ClusterRow> rows;    // in cluster order
  std::vector<TrendRow> suffix;    // suffix maxima over the same order
};

// --- operations ------------------------------------------------------------

// |mu|: same support, masses replaced by their moduli.
AtomicMeasure total_variation(const AtomicMeasure& mu);

// Sum of all masses (deterministic canonical-order summation).
cplx total_mass(const AtomicMeasure& mu);

// Variation mass of the open ball B(0, R).
double variation_in_ball(const AtomicMeasure& mu, double R);

// M(R_k) over the given radii (strictly increasing, at least 3, none beyond
// the truncation radius) plus the fitted exponent and superpolynomial flag.
GrowthProfile growth_profile(const AtomicMeasure& mu,
                             const std::vector<double>& radii,
                             double factor = 1.5);

// Minimum pairwise distance; +inf for fewer than two points.
double min_separation(const std::vector<Point>& points);

// max_x #{p : |p - x| < 1} over sampled centers x in the domain. Candidate
// centers: the points themselves, midpoints of pairs closer than 2, and a
// pitch-`sample_step` lattice over each domain ball.
SparsityBound sparsity_bound(const std::vector<Point>& points,
                             const BallUnion& domain, double sample_step);

// Atoms inside the open-ball union (same truncation radius).
AtomicMeasure restrict(const AtomicMeasure& mu, const BallUnion& domain);

// Translate by v: atoms at x + v.
AtomicMeasure shifted(const AtomicMeasure& mu, const Point& v);

// Scale all masses by c (c != 0).
AtomicMeasure scaled(const AtomicMeasure& mu, cplx c);

// Single-linkage grouping of the two measures' atoms inside `domain` at
// linkage distance `gap` (atoms at distance <= gap are linked; distinct
// clusters are separated by more than gap). count_bound comes from
// sparsity_bound over the cluster representatives.
ClusterDecomposition cluster_decompose(const AtomicMeasure& mu,
                                       const AtomicMeasure& nu,
                                       const BallUnion& domain, double gap,
                                       double sample_step = 0.25);

// Per-cluster (diameter, mass gap) rows plus suffix maxima: for each cluster
// radius r, the largest diameter and |mass gap| over clusters at radius >= r.
ClusterStats cluster_stats(const ClusterDecomposition& decomp,
                           const AtomicMeasure& mu, const AtomicMeasure& nu);

}  // namespace fqc
