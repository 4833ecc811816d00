#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "favard/almost_periods.hpp"
#include "favard/cocycle.hpp"
#include "favard/harness.hpp"
#include "favard/measure.hpp"
#include "favard/sde.hpp"
#include "favard/signal.hpp"

namespace favard::io {

using Json = nlohmann::ordered_json;

/// Decimal text with 12 significant digits.
std::string fmt(double x);

class Csv {
 public:
  explicit Csv(std::vector<std::string> header);
  Csv& row(std::span<const double> values);
  Csv& row(std::initializer_list<double> values);
  const std::string& str() const { return body_; }

 private:
  std::size_t columns_;
  std::string body_;
};

/// path_id, t, x0, x1, ... for every path at each requested grid time.
std::string ensemble_csv(const PathEnsemble& ensemble, std::span<const double> times);
/// t, m0.., v00, v01, .. (upper triangle, row by row).
std::string moment_curve_csv(const MomentCurve& curve);
/// weight, x0, x1, ...
std::string measure_csv(const EmpiricalMeasure& measure);
/// index, beta, spread
std::string beta_curve_csv(std::span<const double> index, std::span<const SubsampledBL> values);
/// tau, residual
std::string period_report_csv(const AlmostPeriodReport& report);

Json certificate_json(const DichotomyCertificate& cert);
Json report_json(const ExperimentReport& report);

// Config parsing. Every error is a ConfigError naming the offending field.

/// Reads and parses a JSON document; syntax errors report line and column.
Json read_json_file(const std::string& path);

/// Signal descriptor: a number (constant), or an object with "type" one of
/// constant, trig, cosine, levitan, levitan_witness, periodic_noise.
Signal parse_signal(const Json& j, const std::string& where);
/// {"entries": [[signal, ...], ...], "bound": b} or {"matrix": [[...]]}.
LinearSystem parse_linear_system(const Json& j, const std::string& where);
/// {"A": linear system, "f": signal, "g": signal}.
SdeSystem parse_sde_system(const Json& j, const std::string& where);
/// {"type": "point", "x": [...]} or {"type": "gaussian", "mean": [...], "cov": [[...]]}.
InitialLaw parse_initial_law(const Json& j, const std::string& where);
ExperimentConfig parse_experiment_config(const Json& j);

std::string sha256_hex(const std::string& bytes);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& body);

}  // namespace favard::io
