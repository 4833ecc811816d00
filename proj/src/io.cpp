#include "favard/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <openssl/evp.h>

#include "favard/errors.hpp"

namespace favard::io {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

Csv::Csv(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) body_ += ',';
    body_ += header[i];
  }
  body_ += '\n';
}

Csv& Csv::row(std::span<const double> values) {
  if (values.size() != columns_) throw std::logic_error("Csv: row width does not match the header");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) body_ += ',';
    body_ += fmt(values[i]);
  }
  body_ += '\n';
  return *this;
}

Csv& Csv::row(std::initializer_list<double> values) {
  return row(std::span<const double>(values.begin(), values.size()));
}

namespace {

std::vector<std::string> component_names(const std::string& prefix, std::size_t d) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < d; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

}  // namespace

std::string ensemble_csv(const PathEnsemble& ensemble, std::span<const double> times) {
  std::vector<std::string> header{"path_id", "t"};
  for (auto& c : component_names("x", ensemble.dim())) header.push_back(c);
  Csv csv(header);
  std::vector<double> row(header.size());
  for (double t : times) {
    const std::size_t j = ensemble.index_of(t);
    for (std::size_t p = 0; p < ensemble.n_paths(); ++p) {
      row[0] = static_cast<double>(p);
      row[1] = ensemble.time(j);
      const double* s = ensemble.state(p, j);
      for (std::size_t c = 0; c < ensemble.dim(); ++c) row[2 + c] = s[c];
      csv.row(row);
    }
  }
  return csv.str();
}

std::string moment_curve_csv(const MomentCurve& curve) {
  const std::size_t d = curve.dim();
  std::vector<std::string> header{"t"};
  for (auto& c : component_names("m", d)) header.push_back(c);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) header.push_back("v" + std::to_string(i) + std::to_string(j));
  Csv csv(header);
  std::vector<double> row;
  for (std::size_t k = 0; k < curve.times.size(); ++k) {
    row.assign(1, curve.times[k]);
    for (std::size_t i = 0; i < d; ++i) row.push_back(curve.mean[k](static_cast<Eigen::Index>(i)));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j)
        row.push_back(curve.cov[k](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    csv.row(row);
  }
  return csv.str();
}

std::string measure_csv(const EmpiricalMeasure& measure) {
  std::vector<std::string> header{"weight"};
  for (auto& c : component_names("x", measure.dim())) header.push_back(c);
  Csv csv(header);
  std::vector<double> row(header.size());
  for (std::size_t i = 0; i < measure.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    row[0] = measure.weights()(r);
    for (std::size_t c = 0; c < measure.dim(); ++c) row[1 + c] = measure.points()(r, static_cast<Eigen::Index>(c));
    csv.row(row);
  }
  return csv.str();
}

std::string beta_curve_csv(std::span<const double> index, std::span<const SubsampledBL> values) {
  if (index.size() != values.size()) throw std::logic_error("beta_curve_csv: size mismatch");
  Csv csv({"index", "beta", "spread"});
  for (std::size_t i = 0; i < index.size(); ++i) csv.row({index[i], values[i].estimate, values[i].spread});
  return csv.str();
}

std::string period_report_csv(const AlmostPeriodReport& report) {
  Csv csv({"tau", "residual"});
  for (std::size_t i = 0; i < report.periods.size(); ++i) csv.row({report.periods[i], report.residuals[i]});
  return csv.str();
}

Json certificate_json(const DichotomyCertificate& cert) {
  Json j;
  j["rows"] = cert.P.rows();
  std::vector<double> p;
  for (Eigen::Index r = 0; r < cert.P.rows(); ++r)
    for (Eigen::Index c = 0; c < cert.P.cols(); ++c) p.push_back(cert.P(r, c));
  j["P"] = p;
  j["N_const"] = cert.N_const;
  j["nu"] = cert.nu;
  j["residual"] = cert.residual;
  j["horizon"] = cert.horizon;
  j["step"] = cert.step;
  j["stable_dim"] = cert.stable_dim;
  j["gap_ratio"] = cert.gap_ratio;
  j["richardson"] = cert.richardson;
  j["justification"] = cert.justification;
  j["detail"] = cert.detail;
  return j;
}

Json report_json(const ExperimentReport& report) {
  Json j;
  j["name"] = report.name;
  j["class"] = to_string(report.class_label);
  j["pass"] = report.pass;
  Json metrics = Json::object();
  for (const auto& [k, v] : report.metrics) {
    if (std::isfinite(v))
      metrics[k] = v;
    else
      metrics[k] = std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  }
  j["metrics"] = metrics;
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"metric", c.metric},
                      {"op", c.op == Comparison::at_most ? "<=" : ">="},
                      {"threshold", c.threshold},
                      {"satisfied", check_satisfied(c, report.metrics)}});
  }
  j["checks"] = checks;
  Json files = Json::array();
  for (const auto& a : report.artifacts) files.push_back(a.file);
  j["artifacts"] = files;
  if (!report.error.empty()) j["error"] = report.error;
  return j;
}

// ---------------------------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << body;
  if (!out) throw std::runtime_error("write failed for " + path);
}

Json read_json_file(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // translate the byte offset to line:column
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": syntax error: " + e.what());
  }
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw ConfigError(where + ": " + msg);
}

const Json& field(const Json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) fail(where + "." + key, "missing field");
  return *it;
}

double atom(const std::string& s, const std::string& where) {
  if (s == "pi") return std::numbers::pi;
  if (s == "sqrt2") return std::numbers::sqrt2;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  fail(where, "cannot read '" + s + "' as a number");
}

// Numbers may be written as JSON numbers or as products/quotients of numbers,
// "pi" and "sqrt2", e.g. "2*pi" or "-pi/2".
double number(const Json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) fail(where, "expected a number");
  std::string s = j.get<std::string>();
  double sign = 1.0;
  if (!s.empty() && s[0] == '-') {
    sign = -1.0;
    s.erase(0, 1);
  }
  double value = 1.0;
  char op = '*';
  std::string tok;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == '*' || s[i] == '/') {
      if (tok.empty()) fail(where, "malformed expression '" + j.get<std::string>() + "'");
      const double a = atom(tok, where);
      value = op == '*' ? value * a : value / a;
      if (i < s.size()) op = s[i];
      tok.clear();
    } else if (s[i] != ' ') {
      tok += s[i];
    }
  }
  return sign * value;
}

double number_field(const Json& j, const std::string& key, const std::string& where) {
  return number(field(j, key, where), where + "." + key);
}

double number_or(const Json& j, const std::string& key, double fallback, const std::string& where) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : number(*it, where + "." + key);
}

VectorXd vector_of(const Json& j, const std::string& where) {
  if (j.is_array()) {
    VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
      v(static_cast<Eigen::Index>(i)) = number(j[i], where + "[" + std::to_string(i) + "]");
    return v;
  }
  VectorXd v(1);
  v(0) = number(j, where);
  return v;
}

MatrixXd matrix_of(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a nonempty array of rows");
  const std::size_t rows = j.size();
  const VectorXd first = vector_of(j[0], where + "[0]");
  MatrixXd m(static_cast<Eigen::Index>(rows), first.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const VectorXd row = vector_of(j[r], where + "[" + std::to_string(r) + "]");
    if (row.size() != first.size()) fail(where, "rows have different lengths");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

std::vector<int> index_of(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an integer array");
  std::vector<int> out;
  for (const auto& x : j) {
    if (!x.is_number_integer()) fail(where, "expected an integer array");
    out.push_back(x.get<int>());
  }
  return out;
}

Signal parse_trig(const Json& j, const std::string& where) {
  const Json& fj = field(j, "frequencies", where);
  if (!fj.is_array() || fj.empty()) fail(where + ".frequencies", "expected a nonempty array");
  std::vector<double> freqs;
  for (std::size_t i = 0; i < fj.size(); ++i)
    freqs.push_back(number(fj[i], where + ".frequencies[" + std::to_string(i) + "]"));
  const auto dim = static_cast<std::size_t>(number_or(j, "dim", 1.0, where));
  auto amp = [&](const Json& a, const std::string& w) {
    VectorXd v = vector_of(a, w);
    if (static_cast<std::size_t>(v.size()) != dim) fail(w, "amplitude does not have dim components");
    return v;
  };
  TrigBuilder b(freqs, dim);
  if (j.contains("constant")) b.constant(amp(j["constant"], where + ".constant"));
  for (const char* kind : {"cos", "sin"}) {
    if (!j.contains(kind)) continue;
    const Json& terms = j[kind];
    if (!terms.is_array()) fail(where + "." + kind, "expected an array of terms");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string w = where + "." + kind + "[" + std::to_string(i) + "]";
      std::vector<int> idx = index_of(field(terms[i], "index", w), w + ".index");
      if (idx.size() != freqs.size()) fail(w + ".index", "length differs from the frequency count");
      const VectorXd a = amp(field(terms[i], "amp", w), w + ".amp");
      if (std::string(kind) == "cos")
        b.cos(std::move(idx), a);
      else
        b.sin(std::move(idx), a);
    }
  }
  try {
    return closed_form(b.build());
  } catch (const DomainError& e) {
    fail(where, e.what());
  }
}

}  // namespace

Signal parse_signal(const Json& j, const std::string& where) {
  if (j.is_number() || j.is_string()) return constant_signal(number(j, where));
  if (j.is_array()) return constant_signal(vector_of(j, where));
  const Json& tj = field(j, "type", where);
  if (!tj.is_string()) fail(where + ".type", "expected a string");
  const std::string type = tj.get<std::string>();
  try {
    if (type == "constant") return constant_signal(vector_of(field(j, "value", where), where + ".value"));
    if (type == "trig") return parse_trig(j, where);
    if (type == "cosine")
      return cosine_signal(number_field(j, "freq", where), number_or(j, "amp", 1.0, where),
                           number_or(j, "phase", 0.0, where));
    if (type == "levitan") return levitan_signal(number_or(j, "scale", 1.0, where));
    if (type == "levitan_witness") return levitan_witness();
    if (type == "periodic_noise")
      return periodic_noise_signal(number_field(j, "period", where), number_field(j, "step", where),
                                   number_field(j, "lo", where), number_field(j, "hi", where),
                                   number_or(j, "amplitude", 1.0, where),
                                   static_cast<unsigned long long>(number_or(j, "seed", 1.0, where)));
  } catch (const DomainError& e) {
    fail(where, e.what());
  }
  fail(where + ".type", "unknown signal type '" + type + "'");
}

LinearSystem parse_linear_system(const Json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  try {
    if (j.contains("matrix")) {
      const MatrixXd m = matrix_of(j["matrix"], where + ".matrix");
      if (m.rows() != m.cols()) fail(where + ".matrix", "matrix must be square");
      return LinearSystem::constant(m);
    }
    if (j.contains("scalar")) {
      const auto dim = static_cast<std::size_t>(number_or(j, "dim", 1.0, where));
      return LinearSystem::scalar_multiple(parse_signal(j["scalar"], where + ".scalar"), dim,
                                           number_field(j, "bound", where));
    }
    const Json& e = field(j, "entries", where);
    if (!e.is_array() || e.empty()) fail(where + ".entries", "expected a square array of signals");
    std::vector<std::vector<Signal>> rows;
    for (std::size_t r = 0; r < e.size(); ++r) {
      if (!e[r].is_array() || e[r].size() != e.size())
        fail(where + ".entries[" + std::to_string(r) + "]", "row length must equal the row count");
      rows.emplace_back();
      for (std::size_t c = 0; c < e[r].size(); ++c)
        rows.back().push_back(parse_signal(e[r][c], where + ".entries[" + std::to_string(r) + "][" +
                                                        std::to_string(c) + "]"));
    }
    return LinearSystem(std::move(rows), number_field(j, "bound", where));
  } catch (const DomainError& e) {
    fail(where, e.what());
  }
}

SdeSystem parse_sde_system(const Json& j, const std::string& where) {
  LinearSystem a = parse_linear_system(field(j, "A", where), where + ".A");
  const std::size_t d = a.dim();
  auto vec_signal = [&](const char* key) {
    if (!j.contains(key)) return constant_signal(VectorXd::Zero(static_cast<Eigen::Index>(d)));
    return parse_signal(j[key], where + "." + key);
  };
  Signal f = vec_signal("f"), g = vec_signal("g");
  try {
    return SdeSystem(std::move(a), std::move(f), std::move(g));
  } catch (const DomainError& e) {
    fail(where, e.what());
  }
}

InitialLaw parse_initial_law(const Json& j, const std::string& where) {
  const std::string type = field(j, "type", where).get<std::string>();
  try {
    if (type == "point") return InitialLaw::point(vector_of(field(j, "x", where), where + ".x"));
    if (type == "gaussian")
      return InitialLaw::gaussian(vector_of(field(j, "mean", where), where + ".mean"),
                                  matrix_of(field(j, "cov", where), where + ".cov"));
  } catch (const DomainError& e) {
    fail(where, e.what());
  }
  fail(where + ".type", "unknown initial law '" + type + "'");
}

ExperimentConfig parse_experiment_config(const Json& j) {
  const std::string root = "config";
  if (!j.is_object()) fail(root, "expected an object");
  ExperimentConfig cfg;
  const Json& name = field(j, "name", root);
  if (!name.is_string()) fail(root + ".name", "expected a string");
  cfg.name = name.get<std::string>();
  const Json& cls = field(j, "class", root);
  if (!cls.is_string()) fail(root + ".class", "expected a string");
  try {
    cfg.class_label = experiment_class_from_string(cls.get<std::string>());
  } catch (const DomainError& e) {
    fail(root + ".class", e.what());
  }
  cfg.system = std::make_shared<const SdeSystem>(parse_sde_system(field(j, "system", root), root + ".system"));
  if (j.contains("drivers")) {
    const Json& dj = j["drivers"];
    if (!dj.is_array()) fail(root + ".drivers", "expected an array of signals");
    for (std::size_t i = 0; i < dj.size(); ++i)
      cfg.drivers.push_back(parse_signal(dj[i], root + ".drivers[" + std::to_string(i) + "]"));
  }
  const double n_paths = number_field(j, "n_paths", root);
  if (n_paths < 0 || n_paths != std::floor(n_paths)) fail(root + ".n_paths", "expected a nonnegative integer");
  cfg.n_paths = static_cast<std::size_t>(n_paths);
  cfg.step = number_field(j, "step", root);
  if (!(cfg.step > 0.0)) fail(root + ".step", "must be positive");
  cfg.burn_in = number_or(j, "burn_in", 0.0, root);
  const Json& w = field(j, "window", root);
  if (!w.is_array() || w.size() != 2) fail(root + ".window", "expected [lo, hi]");
  cfg.window = {number(w[0], root + ".window[0]"), number(w[1], root + ".window[1]")};
  if (!(cfg.window.hi > cfg.window.lo)) fail(root + ".window", "empty window");
  cfg.seed = static_cast<std::uint64_t>(number_or(j, "seed", 1.0, root));
  cfg.workers = static_cast<unsigned>(number_or(j, "workers", 1.0, root));
  for (const char* section : {"tolerances", "params"}) {
    if (!j.contains(section)) continue;
    const Json& s = j[section];
    if (!s.is_object()) fail(root + "." + section, "expected an object");
    auto& target = std::string(section) == "tolerances" ? cfg.tolerances : cfg.params;
    for (const auto& [k, v] : s.items()) target[k] = number(v, root + "." + section + "." + k);
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    fail(root, e.what());
  }
  return cfg;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

}  // namespace favard::io
