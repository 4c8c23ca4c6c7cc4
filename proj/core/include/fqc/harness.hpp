// The uniqueness audit: a falsification engine for pairs of atomic objects
// that are claimed to share a transform (or, in dual mode, a support).
//
// Pipeline (measure mode): find the first witness point where masses differ;
// set epsilon = |gap| / 3; choose the largest dyadic isolation radius rho
// whose punctured ball carries combined variation below epsilon; build the
// dyadic-scale discrepancy family H_j(t) = (mu - nu) paired with the bump at
// scale 2^-j rho for j = 1..S; certify |H_j(a)| > 2 epsilon; search common
// epsilon-almost periods of the family; for every found period whose
// translate ball fits the domain schedule, pick a cluster-free dyadic shell
// and sample H at the matching scale. A difference that persists at every
// tested period is evidence the pair cannot jointly satisfy the structural
// hypotheses (bounded cluster counts, vanishing cluster diameters and mass
// gaps, almost periodicity, schedule coverage); a certified violation of one
// of those hypotheses is reported instead as a falsification tag with its
// numeric evidence. Verdicts are certificates about finite windows, never
// claims about the untruncated objects.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fqc/almost_periods.hpp"
#include "fqc/geometry.hpp"
#include "fqc/measures.hpp"
#include "fqc/probes.hpp"
#include "fqc/spectral.hpp"

namespace fqc {

enum class AuditMode { measure, jet, dual };
enum class Verdict { identical, difference_persists, hypotheses_falsified,
                     inconclusive };

const char* to_string(AuditMode mode);
const char* to_string(Verdict verdict);

// Falsification tags (each must ship with numeric evidence in the report).
namespace tags {
inline constexpr const char* cluster_count = "cluster-count";
inline constexpr const char* cluster_diameter = "cluster-diameter";
inline constexpr const char* cluster_mass_gap = "cluster-mass-gap";
inline constexpr const char* almost_period_certification =
    "almost-period-certification";
inline constexpr const char* translate_schedule = "translate-schedule";
inline constexpr const char* jet_coefficient_trend = "jet-coefficient-trend";
inline constexpr const char* jet_coefficient_bound = "jet-coefficient-bound";
}  // namespace tags

struct AuditConfig {
  AuditMode mode = AuditMode::measure;
  double sentinel_tol = 1e-9;     // mass gaps below this are "identical"
  double epsilon_override = 0.0;  // 0 -> |gap|/3 (measure), |H(a)|/2 (jet)
  double rho_cap = 0.5;           // isolation radius cap, must be <= 1/2
  int scales = 0;                 // S; 0 -> 2N+1, explicit values >= 3
  double ap_lo = 10.0;            // almost-period search window
  double ap_hi = 100.0;
  double ap_step = 0.0;           // 0 -> epsilon/(4 max L), snapped to pitch
  double t_window = 8.0;          // translate offsets compared beyond ap_hi
  double grid_pitch = 0x1p-10;    // dyadic, so snapped shifts align exactly
  Point section_direction;        // empty -> first coordinate axis
  double cluster_gap = 0.0;       // linkage distance; 0 -> grid_pitch
  double sample_step = 0.25;      // domain sampling pitch for count bounds
  double trend_gap_tol = 0.0;     // 0 -> epsilon (cluster mass-gap trend)
  double f3_tol = 0.0;            // 0 -> epsilon/2 (jet coefficient trend)
  double f4_growth_factor = 1.5;  // jet uniform-bound growth threshold
  int max_periods_tested = 0;     // 0 -> test every found period
  double truncation_radius = 0.0; // 0 -> min of the inputs' radii
};

struct WitnessResult {
  bool found = false;  // false -> identical within tolerance
  Point a;
  cplx gap;            // mu(a) - nu(a), or the lowest differing jet coeff
  MultiIndex j0;       // jet audits: lowest differing multi-index at a
  double max_gap = 0.0;  // largest gap seen anywhere (sentinel diagnostics)
};

// Smallest point (by |a|, then lexicographically) of the union support where
// the masses differ by more than tol, scanning the common truncation ball; a
// point absent from one measure counts as mass zero.
WitnessResult witness_point(const AtomicMeasure& mu, const AtomicMeasure& nu,
                            double tol);

// Jet variant: smallest point with any coefficient gap above tol; at that
// point, the lexicographically smallest differing multi-index.
WitnessResult witness_point(const JetDistribution& f, const JetDistribution& g,
                            double tol);

// Largest rho in {cap, cap/2, cap/4, ...} whose punctured ball
// {x : 0 < |x - a| < rho} carries |mu| + |nu| variation strictly below
// epsilon. Throws std::runtime_error (degenerate accumulation) when no
// rho >= 2^-40 * cap works.
double choose_rho(const AtomicMeasure& mu, const AtomicMeasure& nu,
                  const Point& a, double epsilon, double cap);

// Jet variant: largest rho in {cap, cap/2, ...} such that the punctured ball
// {x : 0 < |x - a| < 2 rho} contains no atom of either distribution; same
// floor and error.
double choose_isolation_radius(const JetDistribution& f,
                               const JetDistribution& g, const Point& a,
                               double cap);

// The dyadic discrepancy family H_j(t) = pair(mu, bump, t, 2^-j rho) -
// pair(nu, bump, t, 2^-j rho), j = 1..2N+1, each carrying a Lipschitz bound
// (profile slope / scale, times the worst combined variation mass any probe
// support window can see). Sections through a sampled on [0, window_hi].
std::vector<SampledFunction> build_discrepancy_family(
    const AtomicMeasure& mu, const AtomicMeasure& nu, const Point& a,
    double rho, int N, double window_hi = 108.0, double grid_pitch = 0x1p-10);

struct ShellResult {
  int shell = 0;        // smallest free dyadic shell in 1..S; 0 when none
  double scale = 0.0;   // 2^-shell * rho
  std::size_t meeting_count = 0;  // clusters meeting B(center, 2 rho)
  double max_diameter = 0.0;      // largest diameter among those clusters
  bool count_ok = false;          // meeting_count <= 2N
  bool diameter_ok = false;       // max_diameter < 2^-(2N+1) * rho
  std::vector<std::string> tags;  // violation tags; empty when clean
};

// Scan the dyadic shells {x : 2^-m rho <= |x - center| < 2^-m+1 rho},
// m = 1..2N+1, for the smallest one meeting no cluster. Preconditions
// (reported, not assumed): at most 2N clusters meet B(center, 2 rho), each
// with diameter < 2^-(2N+1) rho. A cluster straddling a shell boundary can
// occupy two shells, so a free shell can fail to exist even under the count
// bound; that degenerate outcome is reported as a diameter-side violation.
ShellResult shell_selector(const ClusterDecomposition& decomp,
                           const Point& center, double rho, int N);

struct TestedPeriod {
  double tau = 0.0;
  double certified = 0.0;      // certified discrepancy from the search
  bool fits_schedule = false;  // B(a + tau dir, rho) inside a domain ball
  ShellResult shell;           // meaningful when fits_schedule (measure/dual)
  int scale_index = 0;         // m(k); 0 when no free shell
  cplx sampled;                // H_{m(k)}(a + tau dir)
  bool exceeds = false;        // |sampled| > epsilon
  std::vector<cplx> per_scale; // trace of H_j(a + tau dir), j = 1..S
};

struct JetDiagnostics {
  bool evaluated = false;
  double trend_outer = 0.0;  // max per-index |sum p - sum q|, outer half
  double trend_tol = 0.0;
  bool trend_violated = false;
  double bound_inner = 0.0;  // max per-cluster coefficient l1 mass, halves
  double bound_outer = 0.0;
  double bound_factor = 0.0;
  bool bound_violated = false;
};

struct AuditReport {
  AuditMode mode = AuditMode::measure;
  Verdict verdict = Verdict::inconclusive;
  std::vector<std::string> tags;  // deduplicated, first-evidence order
  std::string note;               // explanation with the numeric evidence
  bool witness_found = false;
  Point witness;
  MultiIndex witness_index;  // jet mode
  cplx witness_gap;
  double epsilon = 0.0;
  double rho = 0.0;
  int count_bound = 0;  // N from the cluster decomposition
  int scales = 0;       // S
  bool certified_at_witness = false;  // |H_j(a)| > 2 epsilon for every j
  AlmostPeriodSet periods;
  std::vector<TestedPeriod> tested;
  ClusterStats cluster_trend;  // diagnostics, always populated (measure/dual)
  JetDiagnostics jets;         // jet mode diagnostics
  AuditConfig config;          // resolved values actually used
};

// Measure-mode audit over a supplied cluster decomposition (its domain is
// the translate schedule). The overload taking a BallUnion builds the
// decomposition internally via cluster_decompose.
AuditReport uniqueness_audit(const AtomicMeasure& mu, const AtomicMeasure& nu,
                             const ClusterDecomposition& decomp,
                             const AuditConfig& config = {});
AuditReport uniqueness_audit(const AtomicMeasure& mu, const AtomicMeasure& nu,
                             const BallUnion& domain,
                             const AuditConfig& config = {});

// Companion measure for clustering jet atoms: mass 1 + sum_j |coeff| at each
// atom position (nonzero, order-preserving).
AtomicMeasure jet_shadow(const JetDistribution& f);

// Jet-mode audit: witness (a, j0), atom-free punctured ball of radius
// 2 rho, probe psi = monomial_bump(j0, rho), single discrepancy function
// H(t) = pair_jets(f, psi_t) - pair_jets(g, psi_t), epsilon = |H(a)| / 2;
// almost-period certification and schedule-checked sampling as in measure
// mode (no shell machinery: one scale), plus coefficient trend and uniform
// partial-sum bound checks on the truncations.
AuditReport jet_audit(const JetDistribution& f, const JetDistribution& g,
                      const ClusterDecomposition& decomp,
                      const AuditConfig& config = {});
AuditReport jet_audit(const JetDistribution& f, const JetDistribution& g,
                      const BallUnion& domain, const AuditConfig& config = {});

// Dual-mode audit: identical machinery with the spectra's lines playing the
// role of the atoms (the decomposition lives on the frequency side).
AuditReport dual_audit(const Spectrum& mu_spec, const Spectrum& nu_spec,
                       const ClusterDecomposition& decomp,
                       const AuditConfig& config = {});
AuditReport dual_audit(const Spectrum& mu_spec, const Spectrum& nu_spec,
                       const BallUnion& domain, const AuditConfig& config = {});

}  // namespace fqc
