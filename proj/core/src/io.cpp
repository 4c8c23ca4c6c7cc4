#include "fqc/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace fqc {

namespace {

using ordered_json = nlohmann::ordered_json;

// Finite doubles as numbers, non-finite as JSON null (the schema's encoding
// for "undefined"; nlohmann would emit null for them anyway).
ordered_json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double read_number(const ordered_json& j, double fallback_for_null) {
  if (j.is_null()) return fallback_for_null;
  return j.get<double>();
}

ordered_json complex_json(cplx z) {
  return ordered_json{{"re", z.real()}, {"im", z.imag()}};
}

cplx complex_from(const ordered_json& j) {
  return cplx(j.at("re").get<double>(), j.at("im").get<double>());
}

ordered_json parse(const std::string& text) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw io_error(std::string("invalid JSON: ") + e.what());
  }
}

// Shortest round-trip decimal for CSV cells.
std::string dtos(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename Fn>
auto wrap_json_errors(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw io_error(std::string(what) + ": " + e.what());
  }
}

}  // namespace

// --- measures ----------------------------------------------------------------

std::string to_json(const AtomicMeasure& mu) {
  ordered_json j;
  j["dim"] = mu.dim();
  j["truncation_radius"] = number_or_null(mu.truncation_radius());
  ordered_json atoms = ordered_json::array();
  for (const Atom& a : mu.atoms()) {
    ordered_json atom;
    atom["x"] = a.x;
    atom["re"] = a.mass.real();
    atom["im"] = a.mass.imag();
    atoms.push_back(std::move(atom));
  }
  j["atoms"] = std::move(atoms);
  return j.dump(2) + "\n";
}

AtomicMeasure measure_from_json(const std::string& text) {
  return wrap_json_errors("measure", [&] {
    const ordered_json j = parse(text);
    const auto dim = j.at("dim").get<std::size_t>();
    const double trunc =
        j.contains("truncation_radius")
            ? read_number(j.at("truncation_radius"), kInf)
            : kInf;
    std::vector<Atom> atoms;
    for (const ordered_json& atom : j.value("atoms", ordered_json::array()))
      atoms.push_back(Atom{atom.at("x").get<Point>(),
                           cplx(atom.at("re").get<double>(),
                                atom.at("im").get<double>())});
    return AtomicMeasure(dim, std::move(atoms), trunc);
  });
}

std::string to_json(const JetDistribution& f) {
  ordered_json j;
  j["dim"] = f.dim();
  j["order"] = f.order();
  j["truncation_radius"] = number_or_null(f.truncation_radius());
  ordered_json atoms = ordered_json::array();
  for (const JetAtom& a : f.atoms()) {
    ordered_json atom;
    atom["x"] = a.x;
    ordered_json jets = ordered_json::array();
    for (const auto& [index, coeff] : a.jets) {
      ordered_json entry;
      entry["j"] = index;
      entry["re"] = coeff.real();
      entry["im"] = coeff.imag();
      jets.push_back(std::move(entry));
    }
    atom["jets"] = std::move(jets);
    atoms.push_back(std::move(atom));
  }
  j["atoms"] = std::move(atoms);
  return j.dump(2) + "\n";
}

JetDistribution jets_from_json(const std::string& text) {
  return wrap_json_errors("jets", [&] {
    const ordered_json j = parse(text);
    const auto dim = j.at("dim").get<std::size_t>();
    const auto order = j.at("order").get<int>();
    const double trunc =
        j.contains("truncation_radius")
            ? read_number(j.at("truncation_radius"), kInf)
            : kInf;
    std::vector<JetAtom> atoms;
    for (const ordered_json& atom : j.value("atoms", ordered_json::array())) {
      JetAtom ja;
      ja.x = atom.at("x").get<Point>();
      for (const ordered_json& entry :
           atom.value("jets", ordered_json::array()))
        ja.jets[entry.at("j").get<MultiIndex>()] =
            cplx(entry.at("re").get<double>(), entry.at("im").get<double>());
      atoms.push_back(std::move(ja));
    }
    return JetDistribution(dim, order, std::move(atoms), trunc);
  });
}

std::string to_json(const Spectrum& spec) {
  ordered_json j;
  j["dim"] = spec.dim();
  j["truncation_radius"] = number_or_null(spec.truncation_radius());
  ordered_json lines = ordered_json::array();
  for (const SpectralLine& line : spec.lines()) {
    ordered_json entry;
    entry["s"] = line.s;
    entry["re"] = line.amplitude.real();
    entry["im"] = line.amplitude.imag();
    lines.push_back(std::move(entry));
  }
  j["frequencies"] = std::move(lines);
  return j.dump(2) + "\n";
}

Spectrum spectrum_from_json(const std::string& text) {
  return wrap_json_errors("spectrum", [&] {
    const ordered_json j = parse(text);
    const auto dim = j.at("dim").get<std::size_t>();
    const double trunc =
        j.contains("truncation_radius")
            ? read_number(j.at("truncation_radius"), kInf)
            : kInf;
    std::vector<SpectralLine> lines;
    for (const ordered_json& entry :
         j.value("frequencies", ordered_json::array()))
      lines.push_back(SpectralLine{entry.at("s").get<Point>(),
                                   cplx(entry.at("re").get<double>(),
                                        entry.at("im").get<double>())});
    return Spectrum(dim, std::move(lines), trunc);
  });
}

std::string to_json(const BallUnion& domain) {
  ordered_json j;
  j["schedule_start"] = domain.schedule_start();
  ordered_json balls = ordered_json::array();
  for (const Ball& b : domain.balls()) {
    ordered_json ball;
    ball["x"] = b.center;
    ball["r"] = b.radius;
    balls.push_back(std::move(ball));
  }
  j["balls"] = std::move(balls);
  return j.dump(2) + "\n";
}

BallUnion balls_from_json(const std::string& text) {
  return wrap_json_errors("balls", [&] {
    const ordered_json j = parse(text);
    std::vector<Ball> balls;
    for (const ordered_json& ball : j.value("balls", ordered_json::array()))
      balls.push_back(
          Ball{ball.at("x").get<Point>(), ball.at("r").get<double>()});
    return BallUnion(std::move(balls),
                     j.value("schedule_start", std::size_t{0}));
  });
}

namespace {

const char* kind_name(ProbeKind kind) {
  switch (kind) {
    case ProbeKind::gaussian: return "gaussian";
    case ProbeKind::bump: return "bump";
    case ProbeKind::monomial_bump: return "monomial_bump";
  }
  return "gaussian";
}

}  // namespace

std::string to_json(const ProbeFunction& probe) {
  ordered_json j;
  j["dim"] = probe.dim();
  j["kind"] = kind_name(probe.kind());
  j["rho"] = probe.rho();
  j["j0"] = probe.j0();
  j["scale"] = probe.scale();
  j["shift"] = probe.shift();
  return j.dump(2) + "\n";
}

ProbeFunction probe_from_json(const std::string& text) {
  return wrap_json_errors("probe", [&] {
    const ordered_json j = parse(text);
    const auto dim = j.at("dim").get<std::size_t>();
    const auto kind = j.at("kind").get<std::string>();
    ProbeFunction base = [&] {
      if (kind == "gaussian") return ProbeFunction::gaussian(dim);
      if (kind == "bump") return ProbeFunction::standard_bump(dim);
      if (kind == "monomial_bump")
        return ProbeFunction::monomial_bump(j.at("j0").get<MultiIndex>(),
                                            j.at("rho").get<double>());
      throw io_error("probe: unknown kind \"" + kind + "\"");
    }();
    const double scale = j.value("scale", 1.0);
    Point shift = j.contains("shift") ? j.at("shift").get<Point>()
                                      : Point(dim, 0.0);
    if (scale == 1.0) {
      bool zero = true;
      for (double v : shift) zero = zero && v == 0.0;
      if (zero) return base;
    }
    return base.scaled_translated(scale, shift);
  });
}

std::string to_json(const GrowthProfile& profile) {
  ordered_json j;
  j["radii"] = profile.radii;
  j["masses"] = profile.masses;
  j["fitted_exponent"] = number_or_null(profile.fitted_exponent);
  j["first_half_slope"] = number_or_null(profile.first_half_slope);
  j["last_half_slope"] = number_or_null(profile.last_half_slope);
  j["factor"] = profile.factor;
  j["superpolynomial"] = profile.superpolynomial;
  return j.dump(2) + "\n";
}

namespace {

ordered_json aps_json(const AlmostPeriodSet& aps) {
  ordered_json j;
  j["epsilon"] = aps.epsilon;
  j["lo"] = aps.lo;
  j["hi"] = aps.hi;
  j["step"] = aps.step;
  j["origin"] = aps.origin;
  j["direction"] = aps.direction;
  ordered_json periods = ordered_json::array();
  for (const AlmostPeriod& p : aps.periods) {
    ordered_json entry;
    entry["tau"] = p.tau;
    entry["certified"] = p.certified;
    periods.push_back(std::move(entry));
  }
  j["periods"] = std::move(periods);
  j["relative_dense_radius"] = number_or_null(aps.relative_dense_radius);
  return j;
}

ordered_json config_json(const AuditConfig& config) {
  ordered_json j;
  j["mode"] = to_string(config.mode);
  j["sentinel_tol"] = config.sentinel_tol;
  j["epsilon_override"] = config.epsilon_override;
  j["rho_cap"] = config.rho_cap;
  j["scales"] = config.scales;
  j["ap_lo"] = config.ap_lo;
  j["ap_hi"] = config.ap_hi;
  j["ap_step"] = config.ap_step;
  j["t_window"] = config.t_window;
  j["grid_pitch"] = config.grid_pitch;
  j["section_direction"] = config.section_direction;
  j["cluster_gap"] = config.cluster_gap;
  j["sample_step"] = config.sample_step;
  j["trend_gap_tol"] = config.trend_gap_tol;
  j["f3_tol"] = config.f3_tol;
  j["f4_growth_factor"] = config.f4_growth_factor;
  j["max_periods_tested"] = config.max_periods_tested;
  j["truncation_radius"] = config.truncation_radius;
  return j;
}

}  // namespace

std::string to_json(const AlmostPeriodSet& aps) {
  return aps_json(aps).dump(2) + "\n";
}

std::string to_json(const AuditConfig& config) {
  return config_json(config).dump(2) + "\n";
}

AuditConfig audit_config_from_json(const std::string& text) {
  return wrap_json_errors("audit config", [&] {
    const ordered_json j = parse(text);
    AuditConfig config;
    if (j.contains("mode")) {
      const auto mode = j.at("mode").get<std::string>();
      if (mode == "measure") config.mode = AuditMode::measure;
      else if (mode == "jet") config.mode = AuditMode::jet;
      else if (mode == "dual") config.mode = AuditMode::dual;
      else throw io_error("audit config: unknown mode \"" + mode + "\"");
    }
    config.sentinel_tol = j.value("sentinel_tol", config.sentinel_tol);
    config.epsilon_override =
        j.value("epsilon_override", config.epsilon_override);
    config.rho_cap = j.value("rho_cap", config.rho_cap);
    config.scales = j.value("scales", config.scales);
    config.ap_lo = j.value("ap_lo", config.ap_lo);
    config.ap_hi = j.value("ap_hi", config.ap_hi);
    config.ap_step = j.value("ap_step", config.ap_step);
    config.t_window = j.value("t_window", config.t_window);
    config.grid_pitch = j.value("grid_pitch", config.grid_pitch);
    if (j.contains("section_direction"))
      config.section_direction = j.at("section_direction").get<Point>();
    config.cluster_gap = j.value("cluster_gap", config.cluster_gap);
    config.sample_step = j.value("sample_step", config.sample_step);
    config.trend_gap_tol = j.value("trend_gap_tol", config.trend_gap_tol);
    config.f3_tol = j.value("f3_tol", config.f3_tol);
    config.f4_growth_factor =
        j.value("f4_growth_factor", config.f4_growth_factor);
    config.max_periods_tested =
        j.value("max_periods_tested", config.max_periods_tested);
    config.truncation_radius =
        j.value("truncation_radius", config.truncation_radius);
    return config;
  });
}

std::string to_json(const AuditReport& report) {
  ordered_json j;
  j["mode"] = to_string(report.mode);
  j["verdict"] = to_string(report.verdict);
  j["tags"] = report.tags;
  j["note"] = report.note;
  j["witness_found"] = report.witness_found;
  j["witness"] = report.witness;
  j["witness_index"] = report.witness_index;
  j["witness_gap"] = complex_json(report.witness_gap);
  j["epsilon"] = report.epsilon;
  j["rho"] = report.rho;
  j["count_bound"] = report.count_bound;
  j["scales"] = report.scales;
  j["certified_at_witness"] = report.certified_at_witness;
  j["periods"] = aps_json(report.periods);

  ordered_json tested = ordered_json::array();
  for (const TestedPeriod& tp : report.tested) {
    ordered_json entry;
    entry["tau"] = tp.tau;
    entry["certified"] = tp.certified;
    entry["fits_schedule"] = tp.fits_schedule;
    ordered_json shell;
    shell["shell"] = tp.shell.shell;
    shell["scale"] = tp.shell.scale;
    shell["meeting_count"] = tp.shell.meeting_count;
    shell["max_diameter"] = tp.shell.max_diameter;
    shell["count_ok"] = tp.shell.count_ok;
    shell["diameter_ok"] = tp.shell.diameter_ok;
    shell["tags"] = tp.shell.tags;
    entry["shell"] = std::move(shell);
    entry["scale_index"] = tp.scale_index;
    entry["sampled"] = complex_json(tp.sampled);
    entry["exceeds"] = tp.exceeds;
    ordered_json per_scale = ordered_json::array();
    for (cplx v : tp.per_scale) per_scale.push_back(complex_json(v));
    entry["per_scale"] = std::move(per_scale);
    tested.push_back(std::move(entry));
  }
  j["tested"] = std::move(tested);

  ordered_json trend;
  ordered_json rows = ordered_json::array();
  for (const ClusterRow& row : report.cluster_trend.rows) {
    ordered_json entry;
    entry["rep_radius"] = row.rep_radius;
    entry["diameter"] = row.diameter;
    entry["mass_gap"] = complex_json(row.mass_gap);
    rows.push_back(std::move(entry));
  }
  trend["rows"] = std::move(rows);
  ordered_json suffix = ordered_json::array();
  for (const TrendRow& row : report.cluster_trend.suffix) {
    ordered_json entry;
    entry["radius"] = row.radius;
    entry["max_diameter_beyond"] = row.max_diameter_beyond;
    entry["max_abs_gap_beyond"] = row.max_abs_gap_beyond;
    suffix.push_back(std::move(entry));
  }
  trend["suffix"] = std::move(suffix);
  j["cluster_trend"] = std::move(trend);

  ordered_json jets;
  jets["evaluated"] = report.jets.evaluated;
  jets["trend_outer"] = report.jets.trend_outer;
  jets["trend_tol"] = report.jets.trend_tol;
  jets["trend_violated"] = report.jets.trend_violated;
  jets["bound_inner"] = report.jets.bound_inner;
  jets["bound_outer"] = report.jets.bound_outer;
  jets["bound_factor"] = report.jets.bound_factor;
  jets["bound_violated"] = report.jets.bound_violated;
  j["jets"] = std::move(jets);

  j["config"] = config_json(report.config);
  return j.dump(2) + "\n";
}

// --- CSV ---------------------------------------------------------------

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ",";
    out += header[i];
  }
  out += "\n";
  for (const std::vector<double>& row : rows) {
    if (row.size() != header.size())
      throw io_error("csv_table: row width does not match the header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      out += dtos(row[i]);
    }
    out += "\n";
  }
  return out;
}

std::string csv_period_trace(const std::vector<PeriodTraceRow>& trace) {
  std::vector<std::vector<double>> rows;
  rows.reserve(trace.size());
  for (const PeriodTraceRow& row : trace)
    rows.push_back({row.tau, row.worst_certified});
  return csv_table({"tau", "discrepancy"}, rows);
}

std::string csv_scale_trace(const AuditReport& report, int scale) {
  if (scale < 1)
    throw io_error("csv_scale_trace: scale indices are 1-based");
  std::vector<std::vector<double>> rows;
  for (const TestedPeriod& tp : report.tested) {
    if (std::size_t(scale) > tp.per_scale.size())
      throw io_error("csv_scale_trace: scale index beyond the traced scales");
    const cplx v = tp.per_scale[std::size_t(scale - 1)];
    rows.push_back({tp.tau, v.real(), v.imag(), std::abs(v)});
  }
  return csv_table({"tau", "re", "im", "abs"}, rows);
}

// --- files -------------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open for reading: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw io_error("read failed: " + path);
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << content;
  out.flush();
  if (!out) throw io_error("write failed: " + path);
}

}  // namespace fqc
