// JSON and CSV serialization for every domain object, plus file helpers.
//
// All output is deterministic: object keys are emitted in a fixed order,
// doubles use shortest round-trip formatting, and nothing time- or
// locale-dependent is written. Complex numbers serialize as {"re","im"}
// pairs. Infinite values (e.g. an undefined relative-denseness radius)
// serialize as JSON null.
//
// Schemas (stable external contracts):
//   measure   {"dim", "truncation_radius", "atoms": [{"x": [...], "re", "im"}]}
//   jets      {"dim", "order", "truncation_radius",
//              "atoms": [{"x": [...], "jets": [{"j": [...], "re", "im"}]}]}
//   spectrum  {"dim", "truncation_radius",
//              "frequencies": [{"s": [...], "re", "im"}]}
//   balls     {"schedule_start", "balls": [{"x": [...], "r"}]}
//   probe     {"dim", "kind", "rho", "j0", "scale", "shift"}

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fqc/almost_periods.hpp"
#include "fqc/geometry.hpp"
#include "fqc/harness.hpp"
#include "fqc/measures.hpp"
#include "fqc/probes.hpp"
#include "fqc/spectral.hpp"

namespace fqc {

struct io_error : std::runtime_error {
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- JSON ------------------------------------------------------------------

std::string to_json(const AtomicMeasure& mu);
AtomicMeasure measure_from_json(const std::string& text);

std::string to_json(const JetDistribution& f);
JetDistribution jets_from_json(const std::string& text);

std::string to_json(const Spectrum& spec);
Spectrum spectrum_from_json(const std::string& text);

std::string to_json(const BallUnion& domain);
BallUnion balls_from_json(const std::string& text);

std::string to_json(const ProbeFunction& probe);
ProbeFunction probe_from_json(const std::string& text);

std::string to_json(const GrowthProfile& profile);

std::string to_json(const AlmostPeriodSet& aps);

// Partial objects are accepted: absent keys keep their defaults.
std::string to_json(const AuditConfig& config);
AuditConfig audit_config_from_json(const std::string& text);

std::string to_json(const AuditReport& report);

// --- CSV ---------------------------------------------------------------

// Generic numeric table; header cells joined with commas, one row per line,
// shortest round-trip double formatting, trailing newline.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

// "tau,discrepancy" over an almost-period scan trace.
std::string csv_period_trace(const std::vector<PeriodTraceRow>& trace);

// "tau,re,im,abs" for one scale index (1-based) over the tested periods.
std::string csv_scale_trace(const AuditReport& report, int scale);

// --- files -------------------------------------------------------------

std::string read_file(const std::string& path);          // throws io_error
void write_file(const std::string& path, const std::string& content);

}  // namespace fqc
