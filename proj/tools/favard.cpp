// favard: command line driver for signal scans, dichotomy certificates,
// ensemble simulation and the experiment harness.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "favard/errors.hpp"
#include "favard/io.hpp"

#ifndef FAVARD_VERSION
#define FAVARD_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using namespace favard;
using favard::io::Json;

namespace {

enum ExitCode { kPass = 0, kFail = 1, kConfig = 2, kNoDichotomy = 3 };

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
};

struct Run {
  fs::path out;
  std::vector<std::string> artifacts;
  std::vector<std::uint64_t> seeds;

  void emit(const std::string& name, const std::string& body) {
    io::write_file((out / name).string(), body);
    artifacts.push_back(name);
  }
};

double num(const Json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  // reuse the signal parser's number grammar ("2*pi", ...)
  return io::parse_signal(j[key], "config." + key)(0.0)(0);
}

double num_required(const Json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError("config." + key + ": missing field");
  return num(j, key, 0.0);
}

Interval window_of(const Json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != 2)
    throw ConfigError("config." + key + ": expected [lo, hi]");
  const Interval w{io::parse_signal(j[key][0], "config." + key + "[0]")(0.0)(0),
                   io::parse_signal(j[key][1], "config." + key + "[1]")(0.0)(0)};
  if (!(w.hi > w.lo)) throw ConfigError("config." + key + ": empty window");
  return w;
}

int cmd_scan(const Json& cfg, Run& run) {
  std::vector<Signal> signals;
  if (cfg.contains("signals")) {
    if (!cfg["signals"].is_array() || cfg["signals"].empty())
      throw ConfigError("config.signals: expected a nonempty array");
    for (std::size_t i = 0; i < cfg["signals"].size(); ++i)
      signals.push_back(io::parse_signal(cfg["signals"][i], "config.signals[" + std::to_string(i) + "]"));
  } else {
    if (!cfg.contains("signal")) throw ConfigError("config.signal: missing field");
    signals.push_back(io::parse_signal(cfg["signal"], "config.signal"));
  }
  const double eps = num_required(cfg, "epsilon");
  if (!(eps > 0.0)) throw ConfigError("config.epsilon: must be positive");
  const Interval window = window_of(cfg, "window");
  const double scan_step = num(cfg, "scan_step", 1e-3);
  if (!(scan_step > 0.0)) throw ConfigError("config.scan_step: must be positive");
  const double span = num(cfg, "verify_span", 1.0 / eps);
  const double verify_step = num(cfg, "verify_step", kDefaultVerifyStep);
  PeriodMode mode = PeriodMode::almost_period;
  if (cfg.contains("mode")) {
    const std::string m = cfg["mode"].is_string() ? cfg["mode"].get<std::string>() : "";
    if (m == "shift")
      mode = PeriodMode::shift;
    else if (m != "almost_period")
      throw ConfigError("config.mode: expected \"almost_period\" or \"shift\"");
  }

  const AlmostPeriodReport rep = scan_almost_periods(signals, eps, window, scan_step, span, mode, verify_step);
  run.emit("periods.csv", io::period_report_csv(rep));
  Json summary;
  summary["epsilon"] = eps;
  summary["count"] = rep.periods.size();
  summary["passing_grid_points"] = rep.passing.size();
  summary["relative_density_gap"] = relative_density_gap(rep);
  run.emit("scan.json", summary.dump(2) + "\n");
  return kPass;
}

int cmd_dichotomy(const Json& cfg, Run& run) {
  if (!cfg.contains("system")) throw ConfigError("config.system: missing field");
  const LinearSystem sys = io::parse_linear_system(cfg["system"], "config.system");
  const double horizon = num(cfg, "horizon", 10.0);
  const double step = num(cfg, "step", 1e-3);
  const auto samples = static_cast<std::size_t>(num(cfg, "verify_samples", 200));
  if (!(horizon > 0.0) || !(step > 0.0)) throw ConfigError("config: horizon and step must be positive");

  const DichotomyCertificate cert = fit_dichotomy(sys, horizon, step);
  const double violation = verify_dichotomy_bounds(sys, cert, samples);
  Json doc = io::certificate_json(cert);
  doc["verify_violation"] = violation;
  run.emit("certificate.json", doc.dump(2) + "\n");

  // |U(t,0) P| and |U(-t,0) Q| against the certified envelope N e^{-nu t}
  const Eigen::MatrixXd q = cert.Q();
  io::Csv csv({"t", "stable_norm", "unstable_norm", "bound"});
  const int n = 50;
  for (int i = 0; i <= n; ++i) {
    const double t = horizon * i / n;
    const double s = (cauchy_operator(sys, 0.0, t, step).matrix * cert.P).norm();
    const double u = (cauchy_operator(sys, 0.0, -t, step).matrix * q).norm();
    csv.row({t, s, u, cert.N_const * std::exp(-cert.nu * t)});
  }
  run.emit("decay_curve.csv", csv.str());
  return kPass;
}

int cmd_simulate(const Json& cfg, Run& run, const Overrides& ov) {
  if (!cfg.contains("system")) throw ConfigError("config.system: missing field");
  const SdeSystem sys = io::parse_sde_system(cfg["system"], "config.system");
  const auto d = static_cast<Eigen::Index>(sys.dim());
  const InitialLaw x0 = cfg.contains("x0") ? io::parse_initial_law(cfg["x0"], "config.x0")
                                           : InitialLaw::point(Eigen::VectorXd::Zero(d));
  if (x0.dim() != sys.dim()) throw ConfigError("config.x0: dimension differs from the system");
  if (x0.kind() == InitialLaw::Kind::empirical) throw ConfigError("config.x0: expected a point or gaussian law");
  const Interval span = window_of(cfg, "window");
  const double step = num_required(cfg, "step");
  if (!(step > 0.0)) throw ConfigError("config.step: must be positive");
  const double n_paths = ov.paths ? static_cast<double>(*ov.paths) : num_required(cfg, "n_paths");
  if (!(n_paths >= 1.0) || n_paths != std::floor(n_paths))
    throw ConfigError("config.n_paths: expected a positive integer");
  const std::uint64_t seed = ov.seed.value_or(static_cast<std::uint64_t>(num(cfg, "seed", 1)));
  run.seeds.push_back(seed);
  SimulationOptions so;
  so.record_stride = static_cast<std::size_t>(num(cfg, "record_stride", 1));
  so.workers = static_cast<unsigned>(num(cfg, "workers", 1));

  const PathEnsemble ens = simulate_paths(sys, span.lo, span.hi, x0, static_cast<std::size_t>(n_paths), step,
                                          seed, so);
  const std::vector<double> times = ens.times();
  run.emit("ensemble.csv", io::ensemble_csv(ens, times));

  // empirical moments next to the moment equations of the same system
  const MomentCurve exact = moment_odes(sys, span.lo, span.hi, x0.mean(), x0.cov(), step, ens.record_step());
  run.emit("moments.csv", io::moment_curve_csv(exact));
  io::Csv emp([&] {
    std::vector<std::string> h{"t"};
    for (Eigen::Index i = 0; i < d; ++i) h.push_back("mean" + std::to_string(i));
    for (Eigen::Index i = 0; i < d; ++i) h.push_back("var" + std::to_string(i));
    return h;
  }());
  std::vector<double> row;
  for (std::size_t j = 0; j < ens.n_times(); ++j) {
    const Eigen::MatrixXd s = ens.slice(j);
    const Eigen::RowVectorXd mean = s.colwise().mean();
    const double denom = std::max<double>(1.0, static_cast<double>(s.rows()) - 1.0);
    row.assign(1, ens.time(j));
    for (Eigen::Index i = 0; i < d; ++i) row.push_back(mean(i));
    for (Eigen::Index i = 0; i < d; ++i) row.push_back((s.col(i).array() - mean(i)).square().sum() / denom);
    emp.row(row);
  }
  run.emit("empirical_moments.csv", emp.str());
  return kPass;
}

int cmd_experiment(const Json& doc, Run& run, const Overrides& ov) {
  ExperimentConfig cfg = io::parse_experiment_config(doc);
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.paths) cfg.n_paths = *ov.paths;
  run.seeds.push_back(cfg.seed);
  const ExperimentReport rep = run_experiment(cfg);
  for (const auto& a : rep.artifacts) run.emit(a.file, a.body);
  run.emit("report.json", io::report_json(rep).dump(2) + "\n");
  std::cout << cfg.name << ": " << (rep.pass ? "PASS" : "FAIL");
  if (!rep.error.empty()) std::cout << " (" << rep.error << ")";
  std::cout << '\n';
  for (const auto& c : rep.checks) {
    const auto it = rep.metrics.find(c.metric);
    std::cout << "  " << c.metric << " = " << (it == rep.metrics.end() ? "missing" : io::fmt(it->second))
              << (c.op == Comparison::at_most ? " <= " : " >= ") << io::fmt(c.threshold)
              << (check_satisfied(c, rep.metrics) ? "  ok" : "  FAILED") << '\n';
  }
  if (rep.error.rfind("no dichotomy", 0) == 0) return kNoDichotomy;
  return rep.pass ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  std::string command_line;
  for (int i = 0; i < argc; ++i) command_line += (i ? " " : "") + std::string(argv[i]);

  CLI::App app{"Almost periodic solutions of linear stochastic equations: scans, dichotomies, experiments"};
  app.set_version_flag("--version", FAVARD_VERSION);
  app.require_subcommand(1);
  std::string config_path, out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  const std::pair<const char*, const char*> subcommands[] = {
      {"scan", "find eps-almost periods of a signal"},
      {"dichotomy", "fit and verify an exponential dichotomy"},
      {"simulate", "Monte Carlo paths with Gaussian moment curves"},
      {"experiment", "run a configured experiment and its checks"}};
  for (const auto& [name, about] : subcommands) {
    CLI::App* sub = app.add_subcommand(name, about);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "base seed (overrides the config)");
    sub->add_option("--paths", paths, "number of paths (overrides the config)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  Run run;
  run.out = out_dir;
  std::error_code ec;
  fs::create_directories(run.out, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory " << out_dir << ": " << ec.message() << '\n';
    return kConfig;
  }

  const auto start = std::chrono::steady_clock::now();
  int code = kFail;
  std::string error, digest;
  try {
    const std::string text = io::read_file(config_path);
    digest = io::sha256_hex(text);
    const Json cfg = io::read_json_file(config_path);
    const Overrides ov{seed, paths};
    if (command == "scan")
      code = cmd_scan(cfg, run);
    else if (command == "dichotomy")
      code = cmd_dichotomy(cfg, run);
    else if (command == "simulate")
      code = cmd_simulate(cfg, run, ov);
    else
      code = cmd_experiment(cfg, run, ov);
  } catch (const ConfigError& e) {
    error = e.what();
    code = kConfig;
  } catch (const NoDichotomyError& e) {
    error = std::string("no dichotomy detected: ") + e.what();
    code = kNoDichotomy;
  } catch (const nlohmann::json::exception& e) {
    error = std::string("config: ") + e.what();
    code = kConfig;
  } catch (const std::exception& e) {
    error = e.what();
    code = kFail;
  }
  if (!error.empty()) std::cerr << "error: " << error << '\n';

  Json manifest;
  manifest["command_line"] = command_line;
  manifest["command"] = command;
  manifest["config"] = config_path;
  manifest["config_sha256"] = digest;
  manifest["seeds"] = run.seeds;
  manifest["version"] = FAVARD_VERSION;
  manifest["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  manifest["artifacts"] = run.artifacts;
  manifest["exit_code"] = code;
  if (!error.empty()) manifest["error"] = error;
  try {
    io::write_file((run.out / "manifest.json").string(), manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return code;
}
