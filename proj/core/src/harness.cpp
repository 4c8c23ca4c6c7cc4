#include "fqc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace fqc {

const char* to_string(AuditMode mode) {
  switch (mode) {
    case AuditMode::measure: return "measure";
    case AuditMode::jet: return "jet";
    case AuditMode::dual: return "dual";
  }
  return "measure";
}

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::identical: return "identical";
    case Verdict::difference_persists: return "difference-persists";
    case Verdict::hypotheses_falsified: return "hypotheses-falsified";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(12) << v;
  return out.str();
}

void add_tag(std::vector<std::string>& tags, const char* tag) {
  for (const std::string& t : tags)
    if (t == tag) return;
  tags.emplace_back(tag);
}

void add_note(std::string& note, const std::string& sentence) {
  if (!note.empty()) note += " ";
  note += sentence;
}

Point resolve_direction(const AuditConfig& config, std::size_t dim) {
  if (config.section_direction.empty()) {
    Point e1(dim, 0.0);
    e1[0] = 1.0;
    return e1;
  }
  if (config.section_direction.size() != dim)
    throw std::invalid_argument("audit: section direction dimension mismatch");
  if (std::abs(norm2(config.section_direction) - 1.0) > 1e-9)
    throw std::invalid_argument("audit: section direction must be a unit vector");
  return config.section_direction;
}

Point translate_point(const Point& a, double tau, const Point& dir) {
  Point c(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) c[k] = a[k] + tau * dir[k];
  return c;
}

// --- witness scans ---------------------------------------------------------

WitnessResult measure_witness_impl(const AtomicMeasure& mu,
                                   const AtomicMeasure& nu, double tol,
                                   double common_radius) {
  WitnessResult w;
  const std::vector<Atom>& as = mu.atoms();
  const std::vector<Atom>& bs = nu.atoms();
  std::size_t i = 0, j = 0;
  auto consider = [&](const Point& x, cplx gap) {
    if (norm2(x) > common_radius) return;
    const double g = std::abs(gap);
    w.max_gap = std::max(w.max_gap, g);
    if (g <= tol) return;
    if (!w.found || radial_lex_less(x, w.a)) {
      w.found = true;
      w.a = x;
      w.gap = gap;
    }
  };
  while (i < as.size() || j < bs.size()) {
    if (j == bs.size() || (i < as.size() && lex_less(as[i].x, bs[j].x))) {
      consider(as[i].x, as[i].mass);
      ++i;
    } else if (i == as.size() || lex_less(bs[j].x, as[i].x)) {
      consider(bs[j].x, -bs[j].mass);
      ++j;
    } else {
      consider(as[i].x, as[i].mass - bs[j].mass);
      ++i;
      ++j;
    }
  }
  return w;
}

WitnessResult jet_witness_impl(const JetDistribution& f,
                               const JetDistribution& g, double tol,
                               double common_radius) {
  WitnessResult w;
  const std::vector<JetAtom>& as = f.atoms();
  const std::vector<JetAtom>& bs = g.atoms();
  static const std::map<MultiIndex, cplx> kEmpty;
  auto consider = [&](const Point& x, const std::map<MultiIndex, cplx>& p,
                      const std::map<MultiIndex, cplx>& q) {
    if (norm2(x) > common_radius) return;
    // Walk the union of multi-indices in lexicographic order; the first gap
    // above tol at this point is its candidate index.
    auto ip = p.begin();
    auto iq = q.begin();
    bool have = false;
    MultiIndex index;
    cplx gap;
    while (ip != p.end() || iq != q.end()) {
      MultiIndex j;
      cplx d;
      if (iq == q.end() || (ip != p.end() && ip->first < iq->first)) {
        j = ip->first;
        d = ip->second;
        ++ip;
      } else if (ip == p.end() || iq->first < ip->first) {
        j = iq->first;
        d = -iq->second;
        ++iq;
      } else {
        j = ip->first;
        d = ip->second - iq->second;
        ++ip;
        ++iq;
      }
      const double m = std::abs(d);
      w.max_gap = std::max(w.max_gap, m);
      if (m > tol && !have) {
        have = true;
        index = j;
        gap = d;
      }
    }
    if (!have) return;
    if (!w.found || radial_lex_less(x, w.a)) {
      w.found = true;
      w.a = x;
      w.j0 = index;
      w.gap = gap;
    }
  };
  std::size_t i = 0, j = 0;
  while (i < as.size() || j < bs.size()) {
    if (j == bs.size() || (i < as.size() && lex_less(as[i].x, bs[j].x))) {
      consider(as[i].x, as[i].jets, kEmpty);
      ++i;
    } else if (i == as.size() || lex_less(bs[j].x, as[i].x)) {
      consider(bs[j].x, kEmpty, bs[j].jets);
      ++j;
    } else {
      consider(as[i].x, as[i].jets, bs[j].jets);
      ++i;
      ++j;
    }
  }
  return w;
}

double punctured_variation(const AtomicMeasure& mu, const Point& a,
                           double radius) {
  double total = 0.0;
  for (const Atom& atom : mu.atoms()) {
    const double d = dist(atom.x, a);
    if (d > 0.0 && d < radius) total += std::abs(atom.mass);
  }
  return total;
}

bool punctured_ball_empty(const JetDistribution& f, const Point& a,
                          double radius) {
  for (const JetAtom& atom : f.atoms()) {
    const double d = dist(atom.x, a);
    if (d > 0.0 && d < radius) return false;
  }
  return true;
}

// --- Lipschitz estimates for the discrepancy functions ----------------------

// First-coordinate projection of the gap measure |mu - nu| (exact-position
// matching), with prefix sums for sliding-window mass queries. A slab of
// width w contains every ball of diameter w, so window masses overestimate
// ball masses in any dimension.
struct ProjectedMass {
  std::vector<double> x0;
  std::vector<double> prefix;  // prefix[i] = sum of masses before index i
};

ProjectedMass gap_projection(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  ProjectedMass proj;
  const std::vector<Atom>& as = mu.atoms();
  const std::vector<Atom>& bs = nu.atoms();
  std::vector<double> masses;
  std::size_t i = 0, j = 0;
  auto push = [&](double x, double m) {
    if (m == 0.0) return;
    proj.x0.push_back(x);
    masses.push_back(m);
  };
  while (i < as.size() || j < bs.size()) {
    if (j == bs.size() || (i < as.size() && lex_less(as[i].x, bs[j].x))) {
      push(as[i].x[0], std::abs(as[i].mass));
      ++i;
    } else if (i == as.size() || lex_less(bs[j].x, as[i].x)) {
      push(bs[j].x[0], std::abs(bs[j].mass));
      ++j;
    } else {
      push(as[i].x[0], std::abs(as[i].mass - bs[j].mass));
      ++i;
      ++j;
    }
  }
  proj.prefix.resize(masses.size() + 1, 0.0);
  for (std::size_t k = 0; k < masses.size(); ++k)
    proj.prefix[k + 1] = proj.prefix[k] + masses[k];
  return proj;
}

double sliding_mass(const ProjectedMass& proj, double width) {
  double best = 0.0;
  for (std::size_t i = 0; i < proj.x0.size(); ++i) {
    const auto end = std::upper_bound(proj.x0.begin(), proj.x0.end(),
                                      proj.x0[i] + width) -
                     proj.x0.begin();
    best = std::max(best, proj.prefix[std::size_t(end)] - proj.prefix[i]);
  }
  return best;
}

double family_lipschitz(const ProjectedMass& proj, double scale) {
  // |d/dt pair(mu - nu, bump_t)| <= (max slope / scale) * gap mass within
  // the support slab (diameter 4 * scale).
  return bump_profile_max_slope() / scale * sliding_mass(proj, 4.0 * scale);
}

std::vector<SampledFunction> family_impl(const AtomicMeasure& mu,
                                         const AtomicMeasure& nu, double rho,
                                         int scales, double window_hi,
                                         double grid_pitch) {
  const ProbeFunction probe = ProbeFunction::standard_bump(mu.dim());
  const ProjectedMass proj = gap_projection(mu, nu);
  std::vector<SampledFunction> family;
  family.reserve(std::size_t(scales));
  for (int j = 1; j <= scales; ++j) {
    const double scale = std::ldexp(rho, -j);
    const double lipschitz = family_lipschitz(proj, scale);
    auto eval = [mu, nu, probe, scale](const Point& t) {
      return pair_measure(mu, probe, t, scale) -
             pair_measure(nu, probe, t, scale);
    };
    family.emplace_back(eval, mu.dim(), 0.0, window_hi, grid_pitch, lipschitz);
  }
  return family;
}

}  // namespace

WitnessResult witness_point(const AtomicMeasure& mu, const AtomicMeasure& nu,
                            double tol) {
  if (mu.dim() != nu.dim())
    throw std::invalid_argument("witness_point: dimension mismatch");
  if (!(tol >= 0.0))
    throw std::invalid_argument("witness_point: tolerance must be nonnegative");
  return measure_witness_impl(
      mu, nu, tol, std::min(mu.truncation_radius(), nu.truncation_radius()));
}

WitnessResult witness_point(const JetDistribution& f, const JetDistribution& g,
                            double tol) {
  if (f.dim() != g.dim())
    throw std::invalid_argument("witness_point: dimension mismatch");
  if (!(tol >= 0.0))
    throw std::invalid_argument("witness_point: tolerance must be nonnegative");
  return jet_witness_impl(
      f, g, tol, std::min(f.truncation_radius(), g.truncation_radius()));
}

double choose_rho(const AtomicMeasure& mu, const AtomicMeasure& nu,
                  const Point& a, double epsilon, double cap) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("choose_rho: epsilon must be positive");
  if (!(cap > 0.0))
    throw std::invalid_argument("choose_rho: cap must be positive");
  for (int i = 0; i <= 40; ++i) {
    const double rho = std::ldexp(cap, -i);
    if (punctured_variation(mu, a, rho) + punctured_variation(nu, a, rho) <
        epsilon)
      return rho;
  }
  throw std::runtime_error(
      "choose_rho: variation accumulates at the witness point (no isolation "
      "radius above the dyadic floor 2^-40 cap)");
}

double choose_isolation_radius(const JetDistribution& f,
                               const JetDistribution& g, const Point& a,
                               double cap) {
  if (!(cap > 0.0))
    throw std::invalid_argument("choose_isolation_radius: cap must be positive");
  for (int i = 0; i <= 40; ++i) {
    const double rho = std::ldexp(cap, -i);
    if (punctured_ball_empty(f, a, 2.0 * rho) &&
        punctured_ball_empty(g, a, 2.0 * rho))
      return rho;
  }
  throw std::runtime_error(
      "choose_isolation_radius: atoms accumulate at the witness point (no "
      "atom-free punctured ball above the dyadic floor 2^-40 cap)");
}

std::vector<SampledFunction> build_discrepancy_family(
    const AtomicMeasure& mu, const AtomicMeasure& nu, const Point& a,
    double rho, int N, double window_hi, double grid_pitch) {
  if (mu.dim() != nu.dim() || a.size() != mu.dim())
    throw std::invalid_argument("build_discrepancy_family: dimension mismatch");
  if (!(rho > 0.0))
    throw std::invalid_argument("build_discrepancy_family: rho must be positive");
  if (N < 1)
    throw std::invalid_argument(
        "build_discrepancy_family: count bound must be at least 1");
  return family_impl(mu, nu, rho, 2 * N + 1, window_hi, grid_pitch);
}

ShellResult shell_selector(const ClusterDecomposition& decomp,
                           const Point& center, double rho, int N) {
  if (!(rho > 0.0))
    throw std::invalid_argument("shell_selector: rho must be positive");
  if (N < 0) throw std::invalid_argument("shell_selector: negative count bound");
  const int S = 2 * N + 1;
  ShellResult result;
  const double diameter_threshold = std::ldexp(rho, -(2 * N + 1));

  // Radial extent of each cluster around `center`, bracketed through its
  // representative and diameter (exact for singleton clusters).
  std::vector<std::pair<double, double>> extents;
  for (const Cluster& cluster : decomp.clusters) {
    const double d = dist(cluster.representative, center);
    const double lo = std::max(0.0, d - cluster.diameter);
    const double hi = d + cluster.diameter;
    if (!(lo < 2.0 * rho)) continue;  // does not meet B(center, 2 rho)
    extents.emplace_back(lo, hi);
    ++result.meeting_count;
    result.max_diameter = std::max(result.max_diameter, cluster.diameter);
  }
  result.count_ok = result.meeting_count <= std::size_t(2 * N);
  result.diameter_ok = result.max_diameter < diameter_threshold;
  if (!result.count_ok) result.tags.emplace_back(tags::cluster_count);
  if (!result.diameter_ok) result.tags.emplace_back(tags::cluster_diameter);

  for (int m = 1; m <= S; ++m) {
    const double r_lo = std::ldexp(rho, -m);
    const double r_hi = std::ldexp(rho, -m + 1);
    bool occupied = false;
    for (const auto& [lo, hi] : extents) {
      if (lo < r_hi && hi >= r_lo) {
        occupied = true;
        break;
      }
    }
    if (!occupied) {
      result.shell = m;
      result.scale = r_lo;
      break;
    }
  }
  // Under the count and diameter preconditions a free shell exists unless
  // clusters straddle shell boundaries; report that degenerate outcome on
  // the diameter side (the smallness hypothesis is what boundary-straddling
  // strains).
  if (result.shell == 0 && result.count_ok && result.diameter_ok)
    result.tags.emplace_back(tags::cluster_diameter);
  return result;
}

AtomicMeasure jet_shadow(const JetDistribution& f) {
  std::vector<Atom> atoms;
  atoms.reserve(f.atoms().size());
  for (const JetAtom& atom : f.atoms()) {
    double weight = 1.0;
    for (const auto& [index, coeff] : atom.jets) weight += std::abs(coeff);
    atoms.push_back(Atom{atom.x, cplx(weight, 0.0)});
  }
  return AtomicMeasure(f.dim(), std::move(atoms), f.truncation_radius());
}

namespace {

// Shared verdict assembly. `hard_tags` are certified hypothesis violations;
// `fallback_tags` (trend-style checks) only decide when the persistence test
// was reachable and failed.
void assemble_verdict(AuditReport& report, bool certified, bool any_fit,
                      bool all_exceed,
                      const std::vector<std::string>& hard_tags,
                      const std::vector<std::string>& fallback_tags,
                      std::string& note) {
  if (!hard_tags.empty()) {
    report.verdict = Verdict::hypotheses_falsified;
    for (const std::string& t : hard_tags) add_tag(report.tags, t.c_str());
    for (const std::string& t : fallback_tags) add_tag(report.tags, t.c_str());
    return;
  }
  if (!certified) {
    report.verdict = Verdict::inconclusive;
    add_note(note,
             "Scale certification failed at the witness, so the epsilon "
             "threshold is not trustworthy; no verdict.");
    return;
  }
  if (any_fit && all_exceed) {
    report.verdict = Verdict::difference_persists;
    return;
  }
  if (!fallback_tags.empty()) {
    report.verdict = Verdict::hypotheses_falsified;
    for (const std::string& t : fallback_tags) add_tag(report.tags, t.c_str());
    return;
  }
  report.verdict = Verdict::inconclusive;
  add_note(note,
           "A sampled discrepancy fell to or below epsilon without any "
           "hypothesis being falsified on this window; not certified either "
           "way.");
}

AuditReport measure_core(const AtomicMeasure& mu, const AtomicMeasure& nu,
                         const ClusterDecomposition& decomp,
                         const AuditConfig& config, AuditMode mode) {
  if (mu.dim() != nu.dim() || decomp.domain.dim() != mu.dim())
    throw std::invalid_argument("audit: dimension mismatch");
  if (!(config.rho_cap > 0.0) || config.rho_cap > 0.5 + 1e-12)
    throw std::invalid_argument("audit: rho cap must lie in (0, 1/2]");
  if (config.scales != 0 && config.scales < 3)
    throw std::invalid_argument("audit: scale count must be at least 3");
  if (!(config.grid_pitch > 0.0))
    throw std::invalid_argument("audit: grid pitch must be positive");

  AuditConfig resolved = config;
  resolved.mode = mode;
  const double common_radius =
      resolved.truncation_radius > 0.0
          ? std::min(resolved.truncation_radius,
                     std::min(mu.truncation_radius(), nu.truncation_radius()))
          : std::min(mu.truncation_radius(), nu.truncation_radius());
  resolved.truncation_radius = common_radius;
  const Point direction = resolve_direction(resolved, mu.dim());
  resolved.section_direction = direction;
  if (!(resolved.cluster_gap > 0.0)) resolved.cluster_gap = config.grid_pitch;

  AuditReport report;
  report.mode = mode;
  report.cluster_trend = cluster_stats(decomp, mu, nu);

  std::string note;
  const WitnessResult witness =
      measure_witness_impl(mu, nu, resolved.sentinel_tol, common_radius);
  report.witness_found = witness.found;
  if (!witness.found) {
    report.verdict = Verdict::identical;
    add_note(note, "No mass gap above the sentinel tolerance " +
                       fmt(resolved.sentinel_tol) + " (largest observed gap " +
                       fmt(witness.max_gap) +
                       "); the pair is identical at this resolution.");
    report.note = note;
    report.config = resolved;
    return report;
  }
  report.witness = witness.a;
  report.witness_gap = witness.gap;

  const double epsilon = resolved.epsilon_override > 0.0
                             ? resolved.epsilon_override
                             : std::abs(witness.gap) / 3.0;
  report.epsilon = epsilon;
  const double rho = choose_rho(mu, nu, witness.a, epsilon, resolved.rho_cap);
  report.rho = rho;
  const int N = std::max(0, decomp.count_bound);
  report.count_bound = N;
  const int S = resolved.scales > 0 ? resolved.scales
                                    : std::max(3, 2 * N + 1);
  resolved.scales = S;
  report.scales = S;

  // Scan step and pitch: the almost-period precondition needs
  // step <= epsilon / (4 max Lipschitz); halve the (dyadic) pitch until a
  // grid-aligned step that fine exists.
  const ProjectedMass proj = gap_projection(mu, nu);
  double max_lipschitz = 0.0;
  for (int j = 1; j <= S; ++j)
    max_lipschitz =
        std::max(max_lipschitz, family_lipschitz(proj, std::ldexp(rho, -j)));
  double pitch = resolved.grid_pitch;
  double step = resolved.ap_step;
  if (!(step > 0.0)) {
    const double needed =
        max_lipschitz > 0.0 ? epsilon / (4.0 * max_lipschitz)
                            : std::max(resolved.ap_hi - resolved.ap_lo, pitch);
    while (pitch > needed && pitch > 0x1p-16) pitch *= 0.5;
    if (pitch > needed)
      throw std::runtime_error(
          "audit: required scan step is below the grid pitch floor 2^-16");
    step = std::max(1.0, std::floor(needed / pitch)) * pitch;
  } else {
    step = std::max(1.0, std::floor(step / pitch + 1e-12)) * pitch;
  }
  resolved.grid_pitch = pitch;
  resolved.ap_step = step;

  const double window_hi = resolved.t_window + resolved.ap_hi;
  const std::vector<SampledFunction> family =
      family_impl(mu, nu, rho, S, window_hi, pitch);

  bool certified = true;
  for (int j = 0; j < S; ++j) {
    const cplx value = family[std::size_t(j)].value(witness.a);
    if (!(std::abs(value) > 2.0 * epsilon)) {
      if (certified)
        add_note(note, "Witness certification failed at scale " +
                           std::to_string(j + 1) + ": |H(a)| = " +
                           fmt(std::abs(value)) + " <= 2 epsilon = " +
                           fmt(2.0 * epsilon) + ".");
      certified = false;
    }
  }
  report.certified_at_witness = certified;

  std::vector<Sampled1D> sections;
  sections.reserve(family.size());
  for (const SampledFunction& H : family)
    sections.push_back(H.section(witness.a, direction));
  AlmostPeriodSet aps = find_almost_periods(sections, epsilon, resolved.ap_lo,
                                            resolved.ap_hi, step);
  aps.origin = witness.a;
  aps.direction = direction;
  report.periods = aps;

  std::vector<std::string> hard_tags;
  if (aps.periods.empty()) {
    hard_tags.emplace_back(tags::almost_period_certification);
    add_note(note, "No common almost period in [" + fmt(resolved.ap_lo) +
                       ", " + fmt(resolved.ap_hi) +
                       "] certified below epsilon = " + fmt(epsilon) +
                       "; the almost-periodicity hypothesis is not "
                       "certified on this window.");
  }

  std::size_t tested_count = aps.periods.size();
  if (resolved.max_periods_tested > 0)
    tested_count =
        std::min(tested_count, std::size_t(resolved.max_periods_tested));
  bool any_fit = false;
  bool all_exceed = true;
  for (std::size_t k = 0; k < tested_count; ++k) {
    TestedPeriod tp;
    tp.tau = aps.periods[k].tau;
    tp.certified = aps.periods[k].certified;
    const Point c = translate_point(witness.a, tp.tau, direction);
    tp.per_scale.reserve(family.size());
    for (const SampledFunction& H : family) tp.per_scale.push_back(H.value(c));
    tp.fits_schedule = decomp.domain.contains_ball(c, rho);
    if (tp.fits_schedule) {
      any_fit = true;
      tp.shell = shell_selector(decomp, c, rho, N);
      for (const std::string& tag : tp.shell.tags) {
        if (std::find(hard_tags.begin(), hard_tags.end(), tag) ==
            hard_tags.end()) {
          hard_tags.push_back(tag);
          if (tag == tags::cluster_count)
            add_note(note, "At tau = " + fmt(tp.tau) + ", " +
                               std::to_string(tp.shell.meeting_count) +
                               " clusters meet the translate ball (bound 2N = " +
                               std::to_string(2 * N) + ").");
          else
            add_note(note,
                     "At tau = " + fmt(tp.tau) +
                         ", the largest meeting cluster diameter is " +
                         fmt(tp.shell.max_diameter) +
                         (tp.shell.diameter_ok
                              ? " and clusters straddle every dyadic shell "
                                "boundary (threshold "
                              : " against the smallness threshold ") +
                         fmt(std::ldexp(rho, -(2 * N + 1))) + ").");
        }
      }
      if (tp.shell.shell > 0) {
        tp.scale_index = tp.shell.shell;
        tp.sampled = tp.per_scale[std::size_t(tp.shell.shell - 1)];
        tp.exceeds = std::abs(tp.sampled) > epsilon;
        if (!tp.exceeds) all_exceed = false;
      } else {
        all_exceed = false;
      }
    }
    report.tested.push_back(std::move(tp));
  }
  if (!aps.periods.empty() && !any_fit) {
    hard_tags.emplace_back(tags::translate_schedule);
    add_note(note, "None of the " + std::to_string(tested_count) +
                       " tested translate balls of radius " + fmt(rho) +
                       " fit inside the domain schedule.");
  }

  const double gap_tol =
      resolved.trend_gap_tol > 0.0 ? resolved.trend_gap_tol : epsilon;
  resolved.trend_gap_tol = gap_tol;
  std::vector<std::string> fallback_tags;
  if (report.cluster_trend.rows.size() >= 2) {
    const std::size_t mid = report.cluster_trend.rows.size() / 2;
    const double outer_gap = report.cluster_trend.suffix[mid].max_abs_gap_beyond;
    if (outer_gap > gap_tol) {
      fallback_tags.emplace_back(tags::cluster_mass_gap);
      add_note(note, "Outer-half cluster mass gaps stay at " + fmt(outer_gap) +
                         " > " + fmt(gap_tol) +
                         ", so the vanishing-gap hypothesis fails on this "
                         "window.");
    }
  }

  if (hard_tags.empty() && certified && any_fit && all_exceed) {
    double weakest = kInf;
    for (const TestedPeriod& tp : report.tested)
      if (tp.fits_schedule && tp.shell.shell > 0)
        weakest = std::min(weakest, std::abs(tp.sampled));
    add_note(note, "The discrepancy exceeded epsilon = " + fmt(epsilon) +
                       " at every tested almost period (weakest sample " +
                       fmt(weakest) + ").");
  }
  assemble_verdict(report, certified, any_fit, all_exceed, hard_tags,
                   fallback_tags, note);
  report.note = note;
  report.config = resolved;
  return report;
}

}  // namespace

AuditReport uniqueness_audit(const AtomicMeasure& mu, const AtomicMeasure& nu,
                             const ClusterDecomposition& decomp,
                             const AuditConfig& config) {
  return measure_core(mu, nu, decomp, config, AuditMode::measure);
}

AuditReport uniqueness_audit(const AtomicMeasure& mu, const AtomicMeasure& nu,
                             const BallUnion& domain,
                             const AuditConfig& config) {
  const double gap =
      config.cluster_gap > 0.0 ? config.cluster_gap : config.grid_pitch;
  return uniqueness_audit(
      mu, nu, cluster_decompose(mu, nu, domain, gap, config.sample_step),
      config);
}

namespace {

JetDiagnostics jet_checks(const ClusterDecomposition& decomp,
                          const JetDistribution& f, const JetDistribution& g,
                          double f3_tol, double growth_factor,
                          std::vector<std::string>& fallback_tags,
                          std::string& note) {
  JetDiagnostics diag;
  diag.trend_tol = f3_tol;
  diag.bound_factor = growth_factor;
  const std::size_t n = decomp.clusters.size();
  if (n < 2) return diag;
  diag.evaluated = true;

  std::vector<double> index_gap(n, 0.0);   // max_j |sum p - sum q| per cluster
  std::vector<double> level(n, 0.0);       // max side l1 coefficient mass
  for (std::size_t c = 0; c < n; ++c) {
    const Cluster& cluster = decomp.clusters[c];
    std::map<MultiIndex, cplx> sums;
    double l1_f = 0.0, l1_g = 0.0;
    for (std::size_t idx : cluster.mu_atoms) {
      if (idx >= f.atoms().size())
        throw std::invalid_argument("jet_audit: stale cluster decomposition");
      for (const auto& [j, coeff] : f.atoms()[idx].jets) {
        sums[j] += coeff;
        l1_f += std::abs(coeff);
      }
    }
    for (std::size_t idx : cluster.nu_atoms) {
      if (idx >= g.atoms().size())
        throw std::invalid_argument("jet_audit: stale cluster decomposition");
      for (const auto& [j, coeff] : g.atoms()[idx].jets) {
        sums[j] -= coeff;
        l1_g += std::abs(coeff);
      }
    }
    for (const auto& [j, gap] : sums)
      index_gap[c] = std::max(index_gap[c], std::abs(gap));
    level[c] = std::max(l1_f, l1_g);
  }

  const std::size_t mid = n / 2;
  for (std::size_t c = 0; c < n; ++c) {
    if (c < mid) {
      diag.bound_inner = std::max(diag.bound_inner, level[c]);
    } else {
      diag.trend_outer = std::max(diag.trend_outer, index_gap[c]);
      diag.bound_outer = std::max(diag.bound_outer, level[c]);
    }
  }
  diag.trend_violated = diag.trend_outer > f3_tol;
  diag.bound_violated = diag.bound_outer > growth_factor * diag.bound_inner;
  if (diag.trend_violated) {
    fallback_tags.emplace_back(tags::jet_coefficient_trend);
    add_note(note, "Outer-half per-index coefficient gaps stay at " +
                       fmt(diag.trend_outer) + " > " + fmt(f3_tol) +
                       ", so the vanishing-coefficient hypothesis fails on "
                       "this window.");
  }
  if (diag.bound_violated) {
    fallback_tags.emplace_back(tags::jet_coefficient_bound);
    add_note(note, "Per-cluster coefficient mass grows from " +
                       fmt(diag.bound_inner) + " (inner half) to " +
                       fmt(diag.bound_outer) +
                       " (outer half), exceeding the uniform-bound growth "
                       "factor " +
                       fmt(growth_factor) + ".");
  }
  return diag;
}

// Numeric Lipschitz estimate for the jet discrepancy H(t) = pair_jets(f,
// psi_t) - pair_jets(g, psi_t): max derivative of psi one order up, times
// the worst combined coefficient mass any support slab can see, with a
// safety margin (the sampled caches additionally raise the constant to the
// observed grid slope).
double jet_lipschitz(const JetDistribution& f, const JetDistribution& g,
                     const ProbeFunction& psi) {
  const std::size_t d = psi.dim();
  const int derivative_order = std::min(f.order() + 1, psi.evaluation_budget());

  double max_derivative = 0.0;
  const double reach = psi.support_radius();
  const double pitch = reach / 8.0;
  std::vector<MultiIndex> indices;
  {
    MultiIndex j(d, 0);
    for (;;) {
      int total = 0;
      for (int v : j) total = std::max(total, v);
      if (total <= derivative_order) indices.push_back(j);
      std::size_t k = 0;
      while (k < d && j[k] == derivative_order) {
        j[k] = 0;
        ++k;
      }
      if (k == d) break;
      ++j[k];
    }
  }
  Point x(d, 0.0);
  std::vector<int> steps(d, 0);
  const int half_steps = 8;
  std::function<void(std::size_t)> scan = [&](std::size_t k) {
    if (k == d) {
      for (const MultiIndex& j : indices)
        max_derivative =
            std::max(max_derivative, std::abs(derivative_eval(psi, j, x)));
      return;
    }
    for (int s = -half_steps; s <= half_steps; ++s) {
      x[k] = double(s) * pitch;
      scan(k + 1);
    }
  };
  scan(0);

  // Combined coefficient l1 mass in first-coordinate slabs of the support
  // diameter.
  std::vector<std::pair<double, double>> entries;
  for (const JetAtom& atom : f.atoms()) {
    double l1 = 0.0;
    for (const auto& [j, coeff] : atom.jets) l1 += std::abs(coeff);
    entries.emplace_back(atom.x[0], l1);
  }
  for (const JetAtom& atom : g.atoms()) {
    double l1 = 0.0;
    for (const auto& [j, coeff] : atom.jets) l1 += std::abs(coeff);
    entries.emplace_back(atom.x[0], l1);
  }
  std::sort(entries.begin(), entries.end());
  std::vector<double> xs(entries.size()), prefix(entries.size() + 1, 0.0);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    xs[i] = entries[i].first;
    prefix[i + 1] = prefix[i] + entries[i].second;
  }
  double worst_mass = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto end =
        std::upper_bound(xs.begin(), xs.end(), xs[i] + 2.0 * reach) -
        xs.begin();
    worst_mass = std::max(worst_mass, prefix[std::size_t(end)] - prefix[i]);
  }
  return 1.5 * max_derivative * worst_mass;
}

AuditReport jet_core(const JetDistribution& f, const JetDistribution& g,
                     const ClusterDecomposition& decomp,
                     const AuditConfig& config) {
  if (f.dim() != g.dim() || decomp.domain.dim() != f.dim())
    throw std::invalid_argument("jet_audit: dimension mismatch");
  if (f.order() != g.order())
    throw std::invalid_argument("jet_audit: order mismatch");
  if (!(config.rho_cap > 0.0) || config.rho_cap > 0.5 + 1e-12)
    throw std::invalid_argument("jet_audit: rho cap must lie in (0, 1/2]");
  if (!(config.grid_pitch > 0.0))
    throw std::invalid_argument("jet_audit: grid pitch must be positive");

  AuditConfig resolved = config;
  resolved.mode = AuditMode::jet;
  const double common_radius =
      resolved.truncation_radius > 0.0
          ? std::min(resolved.truncation_radius,
                     std::min(f.truncation_radius(), g.truncation_radius()))
          : std::min(f.truncation_radius(), g.truncation_radius());
  resolved.truncation_radius = common_radius;
  const Point direction = resolve_direction(resolved, f.dim());
  resolved.section_direction = direction;
  if (!(resolved.cluster_gap > 0.0)) resolved.cluster_gap = config.grid_pitch;
  resolved.scales = 1;

  AuditReport report;
  report.mode = AuditMode::jet;

  std::string note;
  const WitnessResult witness =
      jet_witness_impl(f, g, resolved.sentinel_tol, common_radius);
  report.witness_found = witness.found;
  if (!witness.found) {
    report.verdict = Verdict::identical;
    add_note(note, "No coefficient gap above the sentinel tolerance " +
                       fmt(resolved.sentinel_tol) + " (largest observed gap " +
                       fmt(witness.max_gap) +
                       "); the pair is identical at this resolution.");
    report.note = note;
    report.config = resolved;
    return report;
  }
  report.witness = witness.a;
  report.witness_index = witness.j0;
  report.witness_gap = witness.gap;

  const double rho =
      choose_isolation_radius(f, g, witness.a, resolved.rho_cap);
  report.rho = rho;
  const int N = std::max(0, decomp.count_bound);
  report.count_bound = N;
  report.scales = 1;

  const ProbeFunction psi = ProbeFunction::monomial_bump(witness.j0, rho);
  auto eval = [f, g, psi](const Point& t) {
    return pair_jets(f, psi, t) - pair_jets(g, psi, t);
  };
  const cplx at_witness = eval(witness.a);
  const double epsilon = resolved.epsilon_override > 0.0
                             ? resolved.epsilon_override
                             : std::abs(at_witness) / 2.0;
  report.epsilon = epsilon;
  if (!(epsilon > 0.0)) {
    report.verdict = Verdict::inconclusive;
    add_note(note,
             "The discrepancy vanishes at the witness (coefficient gaps "
             "cancel inside the probe), so no positive epsilon exists; no "
             "verdict.");
    report.note = note;
    report.config = resolved;
    return report;
  }
  const bool certified = std::abs(at_witness) > epsilon;
  report.certified_at_witness = certified;

  const double lipschitz = jet_lipschitz(f, g, psi);
  double pitch = resolved.grid_pitch;
  double step = resolved.ap_step;
  if (!(step > 0.0)) {
    const double needed =
        lipschitz > 0.0 ? epsilon / (4.0 * lipschitz)
                        : std::max(resolved.ap_hi - resolved.ap_lo, pitch);
    while (pitch > needed && pitch > 0x1p-16) pitch *= 0.5;
    if (pitch > needed)
      throw std::runtime_error(
          "jet_audit: required scan step is below the grid pitch floor 2^-16");
    step = std::max(1.0, std::floor(needed / pitch)) * pitch;
  } else {
    step = std::max(1.0, std::floor(step / pitch + 1e-12)) * pitch;
  }
  resolved.grid_pitch = pitch;
  resolved.ap_step = step;

  const double window_hi = resolved.t_window + resolved.ap_hi;
  const SampledFunction H(eval, f.dim(), 0.0, window_hi, pitch, lipschitz);
  std::vector<Sampled1D> sections{H.section(witness.a, direction)};
  AlmostPeriodSet aps = find_almost_periods(sections, epsilon, resolved.ap_lo,
                                            resolved.ap_hi, step);
  aps.origin = witness.a;
  aps.direction = direction;
  report.periods = aps;

  std::vector<std::string> hard_tags;
  if (aps.periods.empty()) {
    hard_tags.emplace_back(tags::almost_period_certification);
    add_note(note, "No almost period in [" + fmt(resolved.ap_lo) + ", " +
                       fmt(resolved.ap_hi) + "] certified below epsilon = " +
                       fmt(epsilon) +
                       "; the almost-periodicity hypothesis is not certified "
                       "on this window.");
  }

  std::size_t tested_count = aps.periods.size();
  if (resolved.max_periods_tested > 0)
    tested_count =
        std::min(tested_count, std::size_t(resolved.max_periods_tested));
  bool any_fit = false;
  bool all_exceed = true;
  for (std::size_t k = 0; k < tested_count; ++k) {
    TestedPeriod tp;
    tp.tau = aps.periods[k].tau;
    tp.certified = aps.periods[k].certified;
    const Point c = translate_point(witness.a, tp.tau, direction);
    tp.sampled = H.value(c);
    tp.per_scale.push_back(tp.sampled);
    tp.fits_schedule = decomp.domain.contains_ball(c, rho);
    if (tp.fits_schedule) {
      any_fit = true;
      tp.scale_index = 1;
      tp.exceeds = std::abs(tp.sampled) > epsilon;
      if (!tp.exceeds) all_exceed = false;
    }
    report.tested.push_back(std::move(tp));
  }
  if (!aps.periods.empty() && !any_fit) {
    hard_tags.emplace_back(tags::translate_schedule);
    add_note(note, "None of the " + std::to_string(tested_count) +
                       " tested translate balls of radius " + fmt(rho) +
                       " fit inside the domain schedule.");
  }

  const double f3_tol = resolved.f3_tol > 0.0 ? resolved.f3_tol : epsilon / 2.0;
  resolved.f3_tol = f3_tol;
  std::vector<std::string> fallback_tags;
  report.jets = jet_checks(decomp, f, g, f3_tol, resolved.f4_growth_factor,
                           fallback_tags, note);

  if (hard_tags.empty() && certified && any_fit && all_exceed) {
    double weakest = kInf;
    for (const TestedPeriod& tp : report.tested)
      if (tp.fits_schedule) weakest = std::min(weakest, std::abs(tp.sampled));
    add_note(note, "The discrepancy exceeded epsilon = " + fmt(epsilon) +
                       " at every tested almost period (weakest sample " +
                       fmt(weakest) + ").");
  }
  assemble_verdict(report, certified, any_fit, all_exceed, hard_tags,
                   fallback_tags, note);
  report.note = note;
  report.config = resolved;
  return report;
}

}  // namespace

AuditReport jet_audit(const JetDistribution& f, const JetDistribution& g,
                      const ClusterDecomposition& decomp,
                      const AuditConfig& config) {
  return jet_core(f, g, decomp, config);
}

AuditReport jet_audit(const JetDistribution& f, const JetDistribution& g,
                      const BallUnion& domain, const AuditConfig& config) {
  const double gap =
      config.cluster_gap > 0.0 ? config.cluster_gap : config.grid_pitch;
  return jet_audit(f, g,
                   cluster_decompose(jet_shadow(f), jet_shadow(g), domain, gap,
                                     config.sample_step),
                   config);
}

AuditReport dual_audit(const Spectrum& mu_spec, const Spectrum& nu_spec,
                       const ClusterDecomposition& decomp,
                       const AuditConfig& config) {
  return measure_core(mu_spec.as_measure(), nu_spec.as_measure(), decomp,
                      config, AuditMode::dual);
}

AuditReport dual_audit(const Spectrum& mu_spec, const Spectrum& nu_spec,
                       const BallUnion& domain, const AuditConfig& config) {
  const AtomicMeasure mu = mu_spec.as_measure();
  const AtomicMeasure nu = nu_spec.as_measure();
  const double gap =
      config.cluster_gap > 0.0 ? config.cluster_gap : config.grid_pitch;
  return dual_audit(mu_spec, nu_spec,
                    cluster_decompose(mu, nu, domain, gap, config.sample_step),
                    config);
}

}  // namespace fqc
