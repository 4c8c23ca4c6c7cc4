// fqc: command-line front end for the quasicrystal analysis library.
//
// Subcommands: generate, pair, spectral, duality, growth, almost-periods,
// audit, demo-remark3. Structured outputs are JSON, traces are CSV; every
// report embeds the resolved configuration so a rerun can be reproduced from
// the artifact alone. All outputs are deterministic for fixed inputs.
//
// Exit codes: 0 success, 2 hypothesis-falsified verdicts (scripting can
// distinguish them), 1 internal errors, 64 usage errors (bad flags or
// malformed inputs).

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fqc/almost_periods.hpp"
#include "fqc/generators.hpp"
#include "fqc/geometry.hpp"
#include "fqc/harness.hpp"
#include "fqc/io.hpp"
#include "fqc/measures.hpp"
#include "fqc/probes.hpp"
#include "fqc/spectral.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string resolve_out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("FQC_OUT_DIR"); env && *env) return env;
  return ".";
}

void emit(const std::string& dir, const std::string& name,
          const std::string& content) {
  std::filesystem::create_directories(dir);
  const std::string path = (std::filesystem::path(dir) / name).string();
  fqc::write_file(path, content);
  std::cout << path << "\n";
}

ordered_json parse_json(const std::string& text, const char* what) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw fqc::io_error(std::string(what) + ": " + e.what());
  }
}

// Embeddable copy of a nested report (library to_json output) for composing
// larger artifacts.
ordered_json nested(const std::string& json_text) {
  return ordered_json::parse(json_text);
}

// --- probe flags ------------------------------------------------------------

struct ProbeFlags {
  std::string kind = "gaussian";
  std::vector<int> j0;
  double rho = 0.25;
  double scale = 1.0;
  std::vector<double> shift;
};

void add_probe_flags(CLI::App* cmd, ProbeFlags& flags) {
  cmd->add_option("--probe", flags.kind, "Probe kind")
      ->check(CLI::IsMember({"gaussian", "bump", "monomial"}))
      ->capture_default_str();
  cmd->add_option("--j0", flags.j0,
                  "Monomial multi-index (monomial probe only)")
      ->delimiter(',');
  cmd->add_option("--rho", flags.rho,
                  "Monomial probe plateau radius (monomial probe only)")
      ->capture_default_str();
  cmd->add_option("--probe-scale", flags.scale, "Probe dilation factor")
      ->capture_default_str();
  cmd->add_option("--probe-shift", flags.shift, "Probe translation vector")
      ->delimiter(',');
}

fqc::ProbeFunction make_probe(const ProbeFlags& flags, std::size_t dim) {
  fqc::ProbeFunction base = [&] {
    if (flags.kind == "gaussian") return fqc::ProbeFunction::gaussian(dim);
    if (flags.kind == "bump") return fqc::ProbeFunction::standard_bump(dim);
    fqc::MultiIndex j0 = flags.j0.empty() ? fqc::MultiIndex(dim, 0)
                                          : fqc::MultiIndex(flags.j0);
    return fqc::ProbeFunction::monomial_bump(j0, flags.rho);
  }();
  const bool shifted = !flags.shift.empty();
  if (flags.scale == 1.0 && !shifted) return base;
  fqc::Point shift = shifted ? fqc::Point(flags.shift) : fqc::Point(dim, 0.0);
  return base.scaled_translated(flags.scale, shift);
}

ordered_json probe_flags_json(const ProbeFlags& flags) {
  ordered_json j;
  j["probe"] = flags.kind;
  j["j0"] = flags.j0;
  j["rho"] = flags.rho;
  j["probe_scale"] = flags.scale;
  j["probe_shift"] = flags.shift;
  return j;
}

// --- generate ----------------------------------------------------------------

// Deterministic uniform in [0,1) from a fixed-width engine; avoids
// distribution implementations that vary across standard libraries.
double uniform01(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

struct GeneratedObjects {
  fqc::AtomicMeasure measure{1, {}, fqc::kInf};
  bool has_spectrum = false;
  fqc::Spectrum spectrum{1, {}, 0.0};
};

GeneratedObjects build_from_config(const ordered_json& config) {
  const std::string type = config.at("type").get<std::string>();
  GeneratedObjects out;
  if (type == "comb") {
    const auto dim = config.value("dim", std::size_t{1});
    const double spacing = config.value("spacing", 1.0);
    const fqc::cplx mass(config.value("mass", 1.0),
                         config.value("mass_im", 0.0));
    fqc::Point theta = config.contains("theta")
                           ? config.at("theta").get<fqc::Point>()
                           : fqc::Point();
    if (theta.empty()) theta.assign(dim, 0.0);
    const double radius = config.value("radius", 50.0);
    const double dual_radius = config.value("dual_radius", 0.0);
    auto comb = fqc::dirac_comb(dim, spacing, mass, theta, radius, dual_radius);
    out.measure = std::move(comb.measure);
    if (dual_radius > 0.0) {
      out.has_spectrum = true;
      out.spectrum = std::move(comb.spectrum);
    }
    return out;
  }
  if (type == "model_set") {
    out.measure = fqc::model_set(config.value("w0", 0.0),
                                 config.value("w1", 1.0),
                                 config.value("radius", 100.0));
    return out;
  }
  if (type == "remark3") {
    out.measure = fqc::dipole_chain(config.value("n_max", 8));
    return out;
  }
  if (type == "perturb") {
    if (!config.contains("base"))
      throw fqc::io_error("generate: perturb config needs a \"base\" object");
    GeneratedObjects base = build_from_config(config.at("base"));
    const auto seed = config.value("seed", std::uint64_t{1});
    const double offset_amp = config.value("offset_amplitude", 0.0);
    const double mass_amp = config.value("mass_amplitude", 0.0);
    const std::size_t dim = base.measure.dim();
    // One shared engine; perturb() visits atoms in their canonical order, so
    // the draw sequence is deterministic.
    auto rng = std::make_shared<std::mt19937_64>(seed);
    std::function<fqc::Point(const fqc::Point&)> offset;
    if (offset_amp > 0.0)
      offset = [rng, offset_amp, dim](const fqc::Point&) {
        fqc::Point v(dim, 0.0);
        for (std::size_t k = 0; k < dim; ++k)
          v[k] = offset_amp * (2.0 * uniform01(*rng) - 1.0);
        return v;
      };
    std::function<fqc::cplx(const fqc::Point&)> mass_shift;
    if (mass_amp > 0.0)
      mass_shift = [rng, mass_amp](const fqc::Point&) {
        return fqc::cplx(mass_amp * (2.0 * uniform01(*rng) - 1.0), 0.0);
      };
    out.measure = fqc::perturb(base.measure, offset, mass_shift);
    return out;
  }
  throw fqc::io_error("generate: unknown type \"" + type + "\"");
}

struct GenerateFlags {
  std::string out;
  std::string name = "measure";
  std::string config_path;
  std::string type;
  std::size_t dim = 1;
  double spacing = 1.0;
  double mass = 1.0;
  double mass_im = 0.0;
  std::vector<double> theta;
  double radius = 50.0;
  double dual_radius = 0.0;
  double w0 = 0.0;
  double w1 = 1.0;
  int n_max = 8;
  std::uint64_t seed = 1;
  double offset_amplitude = 0.0;
  double mass_amplitude = 0.0;
};

int run_generate(const GenerateFlags& flags, bool seed_given) {
  ordered_json config;
  if (!flags.config_path.empty()) {
    config = parse_json(fqc::read_file(flags.config_path), "generate config");
    if (!flags.type.empty()) config["type"] = flags.type;
    if (seed_given) config["seed"] = flags.seed;
  } else {
    if (flags.type.empty())
      throw fqc::io_error("generate: pass --type or --config");
    config["type"] = flags.type;
    if (flags.type == "comb") {
      config["dim"] = flags.dim;
      config["spacing"] = flags.spacing;
      config["mass"] = flags.mass;
      config["mass_im"] = flags.mass_im;
      config["theta"] = flags.theta;
      config["radius"] = flags.radius;
      config["dual_radius"] = flags.dual_radius;
    } else if (flags.type == "model_set") {
      config["w0"] = flags.w0;
      config["w1"] = flags.w1;
      config["radius"] = flags.radius;
    } else if (flags.type == "remark3") {
      config["n_max"] = flags.n_max;
    } else if (flags.type == "perturb") {
      throw fqc::io_error(
          "generate: the perturb type needs --config with a \"base\" object");
    }
  }

  GeneratedObjects objects = build_from_config(config);
  const std::string dir = resolve_out_dir(flags.out);
  emit(dir, flags.name + ".json", fqc::to_json(objects.measure));
  if (objects.has_spectrum)
    emit(dir, flags.name + "_spectrum.json", fqc::to_json(objects.spectrum));
  emit(dir, flags.name + "_config.json", config.dump(2) + "\n");
  return 0;
}

// --- pair / spectral ----------------------------------------------------------

struct GridFlags {
  std::vector<double> center;
  double window = 8.0;
  double step = 0.25;
};

void add_grid_flags(CLI::App* cmd, GridFlags& flags) {
  cmd->add_option("--center", flags.center, "Grid origin point")
      ->delimiter(',');
  cmd->add_option("--window", flags.window,
                  "Grid extent along the first axis")
      ->capture_default_str();
  cmd->add_option("--step", flags.step, "Grid spacing")->capture_default_str();
}

std::vector<double> grid_offsets(const GridFlags& flags) {
  if (!(flags.step > 0.0))
    throw fqc::io_error("the grid step must be positive");
  if (!(flags.window >= 0.0))
    throw fqc::io_error("the grid window must be nonnegative");
  std::vector<double> offsets;
  const auto count = std::size_t(std::floor(flags.window / flags.step + 1e-9));
  offsets.reserve(count + 1);
  for (std::size_t k = 0; k <= count; ++k)
    offsets.push_back(double(k) * flags.step);
  return offsets;
}

fqc::Point grid_point(const GridFlags& flags, std::size_t dim, double u) {
  fqc::Point t = flags.center.empty() ? fqc::Point(dim, 0.0)
                                      : fqc::Point(flags.center);
  if (t.size() != dim)
    throw fqc::io_error("the grid origin dimension does not match the input");
  t[0] += u;
  return t;
}

struct PairFlags {
  std::string out;
  std::string name = "pair";
  std::string measure_path;
  std::string jets_path;
  ProbeFlags probe;
  GridFlags grid;
  double scale = 1.0;
};

int run_pair(const PairFlags& flags) {
  if (flags.measure_path.empty() == flags.jets_path.empty())
    throw fqc::io_error("pair: pass exactly one of --measure or --jets");
  std::vector<std::vector<double>> rows;
  if (!flags.measure_path.empty()) {
    const auto mu = fqc::measure_from_json(fqc::read_file(flags.measure_path));
    const auto probe = make_probe(flags.probe, mu.dim());
    for (double u : grid_offsets(flags.grid)) {
      const fqc::cplx v = fqc::pair_measure(
          mu, probe, grid_point(flags.grid, mu.dim(), u), flags.scale);
      rows.push_back({u, v.real(), v.imag(), std::abs(v)});
    }
  } else {
    const auto f = fqc::jets_from_json(fqc::read_file(flags.jets_path));
    const auto probe = make_probe(flags.probe, f.dim());
    for (double u : grid_offsets(flags.grid)) {
      const fqc::cplx v =
          fqc::pair_jets(f, probe, grid_point(flags.grid, f.dim(), u));
      rows.push_back({u, v.real(), v.imag(), std::abs(v)});
    }
  }
  emit(resolve_out_dir(flags.out), flags.name + ".csv",
       fqc::csv_table({"t", "re", "im", "abs"}, rows));
  return 0;
}

struct SpectralFlags {
  std::string out;
  std::string name = "spectral";
  std::string spectrum_path;
  ProbeFlags probe;
  GridFlags grid;
};

int run_spectral(const SpectralFlags& flags) {
  const auto spec =
      fqc::spectrum_from_json(fqc::read_file(flags.spectrum_path));
  const auto probe = make_probe(flags.probe, spec.dim());
  std::vector<std::vector<double>> rows;
  for (double u : grid_offsets(flags.grid)) {
    const fqc::SpectralValue v = fqc::spectral_evaluate(
        spec, probe, grid_point(flags.grid, spec.dim(), u));
    rows.push_back(
        {u, v.value.real(), v.value.imag(), std::abs(v.value), v.tail_bound});
  }
  emit(resolve_out_dir(flags.out), flags.name + ".csv",
       fqc::csv_table({"t", "re", "im", "abs", "tail"}, rows));
  return 0;
}

// --- duality -------------------------------------------------------------------

struct DualityFlags {
  std::string out;
  std::string name = "duality";
  std::string measure_path;
  std::string spectrum_path;
  ProbeFlags probe;
  GridFlags grid{{}, 1.0, 0.01};
  double scale = 1.0;
  double tol = 1e-8;
};

int run_duality(const DualityFlags& flags) {
  const auto mu = fqc::measure_from_json(fqc::read_file(flags.measure_path));
  const auto spec =
      fqc::spectrum_from_json(fqc::read_file(flags.spectrum_path));
  if (mu.dim() != spec.dim())
    throw fqc::io_error("duality: measure and spectrum dimensions differ");
  const auto probe = make_probe(flags.probe, mu.dim());

  double max_error = 0.0;
  double worst_t = 0.0;
  std::size_t points = 0;
  for (double u : grid_offsets(flags.grid)) {
    const fqc::Point t = grid_point(flags.grid, mu.dim(), u);
    const fqc::cplx direct = fqc::pair_measure(mu, probe, t, flags.scale);
    const fqc::SpectralValue series = fqc::spectral_evaluate(spec, probe, t);
    const double err = std::abs(direct - series.value);
    if (err > max_error) {
      max_error = err;
      worst_t = u;
    }
    ++points;
  }
  const bool pass = max_error < flags.tol;

  ordered_json report;
  report["command"] = "duality";
  report["measure"] = flags.measure_path;
  report["spectrum"] = flags.spectrum_path;
  ordered_json config = probe_flags_json(flags.probe);
  config["window"] = flags.grid.window;
  config["step"] = flags.grid.step;
  config["scale"] = flags.scale;
  config["tol"] = flags.tol;
  report["config"] = std::move(config);
  report["points"] = points;
  report["max_error"] = max_error;
  report["worst_t"] = worst_t;
  report["pass"] = pass;
  emit(resolve_out_dir(flags.out), flags.name + ".json",
       report.dump(2) + "\n");
  return pass ? 0 : 2;
}

// --- growth ----------------------------------------------------------------------

struct GrowthFlags {
  std::string out;
  std::string name = "growth";
  std::string measure_path;
  std::vector<double> radii{10.0, 20.0, 40.0, 80.0};
  double factor = 1.5;
  bool variation = false;
};

int run_growth(const GrowthFlags& flags) {
  auto mu = fqc::measure_from_json(fqc::read_file(flags.measure_path));
  if (flags.variation) mu = fqc::total_variation(mu);
  const fqc::GrowthProfile profile =
      fqc::growth_profile(mu, flags.radii, flags.factor);

  ordered_json report;
  report["command"] = "growth";
  report["measure"] = flags.measure_path;
  report["variation"] = flags.variation;
  report["factor"] = flags.factor;
  report["profile"] = nested(fqc::to_json(profile));
  emit(resolve_out_dir(flags.out), flags.name + ".json",
       report.dump(2) + "\n");
  return 0;
}

// --- almost-periods ----------------------------------------------------------------

struct ApFlags {
  std::string out;
  std::string name = "almost_periods";
  std::vector<double> frequencies;
  double epsilon = 0.1;
  double lo = 0.0;
  double window = 20.0;
  double step = 0.0;   // 0: widest sound step
  double pitch = 0.0;  // 0: auto (dyadic, at most step/2)
  double margin = 8.0;
};

int run_almost_periods(const ApFlags& flags) {
  if (flags.frequencies.empty())
    throw fqc::io_error("almost-periods: pass at least one frequency");
  double max_abs_freq = 0.0;
  for (double f : flags.frequencies)
    max_abs_freq = std::max(max_abs_freq, std::abs(f));
  const double max_lipschitz = kTwoPi * max_abs_freq;
  const double bound = max_lipschitz > 0.0
                           ? flags.epsilon / (4.0 * max_lipschitz)
                           : fqc::kInf;
  const double step = flags.step > 0.0 ? flags.step : bound;
  double pitch = flags.pitch;
  if (pitch <= 0.0) {
    pitch = 0x1.0p-4;
    while (pitch > step / 2.0) pitch = std::ldexp(pitch, -1);
  }

  // Scan-ordered by descending |frequency|: the stiffest member disqualifies
  // losing candidates fastest. The qualified set does not depend on order.
  std::vector<double> freqs = flags.frequencies;
  std::sort(freqs.begin(), freqs.end(),
            [](double a, double b) { return std::abs(a) > std::abs(b); });

  std::vector<fqc::Sampled1D> family;
  family.reserve(freqs.size());
  const double cache_hi = flags.window + flags.margin;
  for (double f : freqs)
    family.emplace_back(
        [f](double u) {
          return std::polar(1.0, kTwoPi * f * u);
        },
        std::min(flags.lo, 0.0), cache_hi, pitch, kTwoPi * std::abs(f));

  std::vector<fqc::PeriodTraceRow> trace;
  const fqc::AlmostPeriodSet aps = fqc::find_almost_periods(
      family, flags.epsilon, flags.lo, flags.window, step, &trace);

  ordered_json report;
  report["command"] = "almost-periods";
  ordered_json config;
  config["frequencies"] = flags.frequencies;
  config["epsilon"] = flags.epsilon;
  config["lo"] = flags.lo;
  config["window"] = flags.window;
  config["step"] = step;
  config["pitch"] = pitch;
  config["margin"] = flags.margin;
  report["config"] = std::move(config);
  report["result"] = nested(fqc::to_json(aps));
  const std::string dir = resolve_out_dir(flags.out);
  emit(dir, flags.name + ".json", report.dump(2) + "\n");
  emit(dir, flags.name + ".csv", fqc::csv_period_trace(trace));
  return 0;
}

// --- audit -------------------------------------------------------------------------

struct AuditFlags {
  std::string out;
  std::string name = "audit";
  std::string mode = "measure";
  std::string mu_path;
  std::string nu_path;
  std::string config_path;
  std::string domain_path;
  double sentinel_tol = -1.0;
  double epsilon = -1.0;
  double ap_lo = -1.0;
  double ap_hi = -1.0;
  double ap_step = -1.0;
  double pitch = -1.0;
  double t_window = -1.0;
};

int run_audit(const AuditFlags& flags, bool mode_given) {
  fqc::AuditConfig config;
  if (!flags.config_path.empty())
    config = fqc::audit_config_from_json(fqc::read_file(flags.config_path));
  if (mode_given || flags.config_path.empty()) {
    if (flags.mode == "measure") config.mode = fqc::AuditMode::measure;
    else if (flags.mode == "jet") config.mode = fqc::AuditMode::jet;
    else config.mode = fqc::AuditMode::dual;
  }
  if (flags.sentinel_tol >= 0.0) config.sentinel_tol = flags.sentinel_tol;
  if (flags.epsilon >= 0.0) config.epsilon_override = flags.epsilon;
  if (flags.ap_lo >= 0.0) config.ap_lo = flags.ap_lo;
  if (flags.ap_hi >= 0.0) config.ap_hi = flags.ap_hi;
  if (flags.ap_step >= 0.0) config.ap_step = flags.ap_step;
  if (flags.pitch > 0.0) config.grid_pitch = flags.pitch;
  if (flags.t_window > 0.0) config.t_window = flags.t_window;

  // Without --domain, cluster and schedule-check inside the ball the inputs
  // are truncated to.
  const auto default_domain = [&](std::size_t dim, double r_mu,
                                  double r_nu) {
    const double r = std::min(r_mu, r_nu);
    if (!std::isfinite(r))
      throw fqc::io_error(
          "audit: pass --domain for inputs without a truncation radius");
    return fqc::BallUnion({fqc::Ball{fqc::Point(dim, 0.0), r}});
  };
  const bool have_domain = !flags.domain_path.empty();
  const fqc::BallUnion given =
      have_domain ? fqc::balls_from_json(fqc::read_file(flags.domain_path))
                  : fqc::BallUnion();

  fqc::AuditReport report = [&] {
    if (config.mode == fqc::AuditMode::jet) {
      const auto f = fqc::jets_from_json(fqc::read_file(flags.mu_path));
      const auto g = fqc::jets_from_json(fqc::read_file(flags.nu_path));
      const auto domain =
          have_domain ? given
                      : default_domain(f.dim(), f.truncation_radius(),
                                       g.truncation_radius());
      return fqc::jet_audit(f, g, domain, config);
    }
    if (config.mode == fqc::AuditMode::dual) {
      const auto a = fqc::spectrum_from_json(fqc::read_file(flags.mu_path));
      const auto b = fqc::spectrum_from_json(fqc::read_file(flags.nu_path));
      const auto domain =
          have_domain ? given
                      : default_domain(a.dim(), a.truncation_radius(),
                                       b.truncation_radius());
      return fqc::dual_audit(a, b, domain, config);
    }
    const auto mu = fqc::measure_from_json(fqc::read_file(flags.mu_path));
    const auto nu = fqc::measure_from_json(fqc::read_file(flags.nu_path));
    const auto domain =
        have_domain ? given
                    : default_domain(mu.dim(), mu.truncation_radius(),
                                     nu.truncation_radius());
    return fqc::uniqueness_audit(mu, nu, domain, config);
  }();

  const std::string dir = resolve_out_dir(flags.out);
  emit(dir, flags.name + ".json", fqc::to_json(report));
  if (!report.tested.empty()) {
    for (int m = 1; m <= int(report.scales); ++m)
      emit(dir, flags.name + "_scale_" + std::to_string(m) + ".csv",
           fqc::csv_scale_trace(report, m));
  }
  return report.verdict == fqc::Verdict::hypotheses_falsified ? 2 : 0;
}

// --- demo-remark3 ---------------------------------------------------------------------

struct DemoFlags {
  std::string out;
  std::string name = "remark3_demo";
  int n_max = 30;
  double tol = 1e-6;
  std::vector<double> radii{10.0, 20.0, 40.0, 80.0};
};

int run_demo_remark3(const DemoFlags& flags) {
  if (flags.n_max < 2)
    throw fqc::io_error("demo-remark3: --n-max must be at least 2");
  const auto probe = fqc::ProbeFunction::gaussian(1);

  // Partial sums of the gaussian pairing: bounded (Cauchy) even though the
  // measure's total variation explodes.
  ordered_json sums = ordered_json::array();
  fqc::cplx at20(0.0, 0.0), at_n_max(0.0, 0.0);
  for (int n = 1; n <= flags.n_max; ++n) {
    const auto mu = fqc::dipole_chain(n);
    const fqc::cplx value = fqc::pair_measure(mu, probe, {0.0}, 1.0);
    ordered_json row;
    row["n_max"] = n;
    row["re"] = value.real();
    row["im"] = value.imag();
    row["total_variation"] = fqc::total_mass(fqc::total_variation(mu)).real();
    sums.push_back(std::move(row));
    if (n == std::min(20, flags.n_max)) at20 = value;
    if (n == flags.n_max) at_n_max = value;
  }
  const double delta_tail = std::abs(at_n_max - at20);

  const auto variation = fqc::total_variation(fqc::dipole_chain(flags.n_max));
  const fqc::GrowthProfile profile = fqc::growth_profile(variation, flags.radii);

  ordered_json report;
  report["command"] = "demo-remark3";
  ordered_json config;
  config["n_max"] = flags.n_max;
  config["tol"] = flags.tol;
  config["radii"] = flags.radii;
  report["config"] = std::move(config);
  report["partial_sums"] = std::move(sums);
  report["delta_tail"] = delta_tail;
  report["pairing_bounded"] = delta_tail < flags.tol;
  report["variation_profile"] = nested(fqc::to_json(profile));
  report["variation_superpolynomial"] = profile.superpolynomial;
  emit(resolve_out_dir(flags.out), flags.name + ".json",
       report.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "fqc: generate quasicrystal-style measures, evaluate pairings and "
      "spectra, search almost periods, and run uniqueness audits"};
  app.require_subcommand(1);
  int rc = 0;

  GenerateFlags gen;
  auto* cmd_gen = app.add_subcommand(
      "generate", "Write a measure (and spectrum) from a generator config");
  cmd_gen->add_option("--out", gen.out, "Output directory");
  cmd_gen->add_option("--name", gen.name, "Artifact basename")
      ->capture_default_str();
  cmd_gen->add_option("--config", gen.config_path, "Generator config JSON");
  cmd_gen->add_option("--type", gen.type,
                      "Generator type (comb, model_set, remark3, perturb)");
  cmd_gen->add_option("--dim", gen.dim, "Comb dimension")
      ->capture_default_str();
  cmd_gen->add_option("--spacing", gen.spacing, "Comb spacing")
      ->capture_default_str();
  cmd_gen->add_option("--mass", gen.mass, "Comb mass (real part)")
      ->capture_default_str();
  cmd_gen->add_option("--mass-im", gen.mass_im, "Comb mass (imaginary part)")
      ->capture_default_str();
  cmd_gen->add_option("--theta", gen.theta, "Comb modulation vector")
      ->delimiter(',');
  cmd_gen->add_option("--radius", gen.radius,
                      "Truncation radius (comb, model_set)")
      ->capture_default_str();
  cmd_gen->add_option("--dual-radius", gen.dual_radius,
                      "Comb spectrum truncation radius (0: no spectrum)")
      ->capture_default_str();
  cmd_gen->add_option("--w0", gen.w0, "Model-set window start")
      ->capture_default_str();
  cmd_gen->add_option("--w1", gen.w1, "Model-set window end")
      ->capture_default_str();
  cmd_gen->add_option("--n-max", gen.n_max, "Dipole chain site count")
      ->capture_default_str();
  auto* gen_seed =
      cmd_gen->add_option("--seed", gen.seed, "Perturbation seed override");
  cmd_gen->add_option("--offset-amplitude", gen.offset_amplitude,
                      "Unused without --config (perturb)")
      ->capture_default_str();
  cmd_gen->add_option("--mass-amplitude", gen.mass_amplitude,
                      "Unused without --config (perturb)")
      ->capture_default_str();
  cmd_gen->callback([&] { rc = run_generate(gen, gen_seed->count() > 0); });

  PairFlags pair;
  auto* cmd_pair = app.add_subcommand(
      "pair", "Evaluate the measure or jet pairing over a t-grid (CSV)");
  cmd_pair->add_option("--out", pair.out, "Output directory");
  cmd_pair->add_option("--name", pair.name, "Artifact basename")
      ->capture_default_str();
  cmd_pair->add_option("--measure", pair.measure_path, "Measure JSON");
  cmd_pair->add_option("--jets", pair.jets_path, "Jet distribution JSON");
  cmd_pair->add_option("--scale", pair.scale, "Pairing dilation")
      ->capture_default_str();
  add_probe_flags(cmd_pair, pair.probe);
  add_grid_flags(cmd_pair, pair.grid);
  cmd_pair->callback([&] { rc = run_pair(pair); });

  SpectralFlags spectral;
  auto* cmd_spectral = app.add_subcommand(
      "spectral", "Evaluate the spectral series over a t-grid (CSV)");
  cmd_spectral->add_option("--out", spectral.out, "Output directory");
  cmd_spectral->add_option("--name", spectral.name, "Artifact basename")
      ->capture_default_str();
  cmd_spectral->add_option("--spectrum", spectral.spectrum_path,
                           "Spectrum JSON")
      ->required();
  add_probe_flags(cmd_spectral, spectral.probe);
  add_grid_flags(cmd_spectral, spectral.grid);
  cmd_spectral->callback([&] { rc = run_spectral(spectral); });

  DualityFlags duality;
  auto* cmd_duality = app.add_subcommand(
      "duality", "Compare direct pairing against the spectral series");
  cmd_duality->add_option("--out", duality.out, "Output directory");
  cmd_duality->add_option("--name", duality.name, "Artifact basename")
      ->capture_default_str();
  cmd_duality->add_option("--measure", duality.measure_path, "Measure JSON")
      ->required();
  cmd_duality->add_option("--spectrum", duality.spectrum_path, "Spectrum JSON")
      ->required();
  cmd_duality->add_option("--scale", duality.scale, "Pairing dilation")
      ->capture_default_str();
  cmd_duality->add_option("--tol", duality.tol, "Max-error threshold")
      ->capture_default_str();
  add_probe_flags(cmd_duality, duality.probe);
  add_grid_flags(cmd_duality, duality.grid);
  cmd_duality->callback([&] { rc = run_duality(duality); });

  GrowthFlags growth;
  auto* cmd_growth = app.add_subcommand(
      "growth", "Fit the variation growth profile of a measure");
  cmd_growth->add_option("--out", growth.out, "Output directory");
  cmd_growth->add_option("--name", growth.name, "Artifact basename")
      ->capture_default_str();
  cmd_growth->add_option("--measure", growth.measure_path, "Measure JSON")
      ->required();
  cmd_growth->add_option("--radii", growth.radii, "Sample radii")
      ->delimiter(',');
  cmd_growth->add_option("--factor", growth.factor,
                         "Superpolynomial slope-growth threshold")
      ->capture_default_str();
  cmd_growth->add_flag("--variation", growth.variation,
                       "Profile |mu| instead of mu");
  cmd_growth->callback([&] { rc = run_growth(growth); });

  ApFlags ap;
  auto* cmd_ap = app.add_subcommand(
      "almost-periods",
      "Scan a family of complex exponentials for epsilon-almost periods");
  cmd_ap->add_option("--out", ap.out, "Output directory");
  cmd_ap->add_option("--name", ap.name, "Artifact basename")
      ->capture_default_str();
  cmd_ap->add_option("--frequencies", ap.frequencies, "Frequency list")
      ->delimiter(',')
      ->required();
  cmd_ap->add_option("--epsilon", ap.epsilon, "Qualification threshold")
      ->capture_default_str();
  cmd_ap->add_option("--lo", ap.lo, "Scan window start")
      ->capture_default_str();
  cmd_ap->add_option("--window", ap.window, "Scan window end")
      ->capture_default_str();
  cmd_ap->add_option("--step", ap.step,
                     "Scan step (0: widest sound step for epsilon)");
  cmd_ap->add_option("--pitch", ap.pitch, "Sample pitch (0: auto dyadic)");
  cmd_ap->add_option("--margin", ap.margin,
                     "Extra sampled length beyond the window")
      ->capture_default_str();
  cmd_ap->callback([&] { rc = run_almost_periods(ap); });

  AuditFlags audit;
  auto* cmd_audit = app.add_subcommand(
      "audit", "Run a uniqueness audit and write the report");
  cmd_audit->add_option("--out", audit.out, "Output directory");
  cmd_audit->add_option("--name", audit.name, "Artifact basename")
      ->capture_default_str();
  auto* audit_mode =
      cmd_audit->add_option("--mode", audit.mode, "Audit mode")
          ->check(CLI::IsMember({"measure", "jet", "dual"}));
  cmd_audit->add_option("--mu", audit.mu_path,
                        "First input (measure, jets, or spectrum JSON)")
      ->required();
  cmd_audit->add_option("--nu", audit.nu_path,
                        "Second input (measure, jets, or spectrum JSON)")
      ->required();
  cmd_audit->add_option("--config", audit.config_path, "Audit config JSON");
  cmd_audit->add_option("--domain", audit.domain_path,
                        "Translate-schedule ball union JSON (measure mode)");
  cmd_audit->add_option("--tol", audit.sentinel_tol,
                        "Identical-pair sentinel tolerance");
  cmd_audit->add_option("--epsilon", audit.epsilon, "Epsilon override");
  cmd_audit->add_option("--ap-lo", audit.ap_lo, "Almost-period window start");
  cmd_audit->add_option("--window", audit.ap_hi, "Almost-period window end");
  cmd_audit->add_option("--step", audit.ap_step, "Almost-period scan step");
  cmd_audit->add_option("--pitch", audit.pitch, "Section sample pitch");
  cmd_audit->add_option("--t-window", audit.t_window,
                        "Sampled margin around the witness");
  cmd_audit->callback(
      [&] { rc = run_audit(audit, audit_mode->count() > 0); });

  DemoFlags demo;
  auto* cmd_demo = app.add_subcommand(
      "demo-remark3",
      "Bounded pairing partial sums vs superpolynomial variation");
  cmd_demo->add_option("--out", demo.out, "Output directory");
  cmd_demo->add_option("--name", demo.name, "Artifact basename")
      ->capture_default_str();
  cmd_demo->add_option("--n-max", demo.n_max, "Deepest partial sum")
      ->capture_default_str();
  cmd_demo->add_option("--tol", demo.tol, "Tail-variation threshold")
      ->capture_default_str();
  cmd_demo->add_option("--radii", demo.radii, "Growth sample radii")
      ->delimiter(',');
  cmd_demo->callback([&] { rc = run_demo_remark3(demo); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 64;
  } catch (const fqc::io_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 64;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 64;
  } catch (const std::domain_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 64;
  } catch (const fqc::guard_error& e) {
    std::cerr << "convergence guard: " << e.report.reason << "\n";
    return 1;
  } catch (const fqc::quadrature_error& e) {
    std::cerr << "quadrature: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
