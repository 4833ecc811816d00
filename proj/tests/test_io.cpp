#include <cmath>
#include <filesystem>
#include <numbers>

#include <gtest/gtest.h>

#include "favard/errors.hpp"
#include "favard/io.hpp"

using namespace favard;
using favard::io::Json;

namespace {

Json minimal_config() {
  return Json::parse(R"({
    "name": "ou",
    "class": "convergence",
    "system": {"A": {"matrix": [[-1]]}, "g": 0.5},
    "n_paths": 100,
    "step": 0.01,
    "window": [0, 5],
    "tolerances": {"beta": 0.05}
  })");
}

std::string config_error(const Json& j) {
  try {
    io::parse_experiment_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Format, TwelveSignificantDigitsAndCsvRows) {
  EXPECT_EQ(io::fmt(0.5), "0.5");
  EXPECT_EQ(io::fmt(std::numbers::pi), "3.14159265359");
  EXPECT_EQ(io::fmt(1e-20), "1e-20");
  io::Csv csv({"t", "x"});
  csv.row({0.0, 1.5}).row({1.0, -2.0});
  EXPECT_EQ(csv.str(), "t,x\n0,1.5\n1,-2\n");
  EXPECT_THROW(csv.row({1.0}), std::logic_error);
}

TEST(Format, BetaCurveAndMeasureCsv) {
  const std::vector<double> idx{0.0, 1.0};
  const std::vector<SubsampledBL> vals{{0.25, 0.01}, {0.125, 0.0}};
  EXPECT_EQ(io::beta_curve_csv(idx, vals), "index,beta,spread\n0,0.25,0.01\n1,0.125,0\n");
  Eigen::MatrixXd pts(2, 1);
  pts << 1.0, 3.0;
  const std::string m = io::measure_csv(EmpiricalMeasure::uniform(pts));
  EXPECT_EQ(m.substr(0, m.find('\n')), "weight,x0");
  EXPECT_NE(m.find("0.5,3"), std::string::npos);
}

TEST(Format, ReportJsonStringifiesNonFiniteMetrics) {
  ExperimentReport r;
  r.name = "x";
  r.class_label = ExperimentClass::levitan;
  r.metrics = {{"a", 0.25}, {"b", INFINITY}, {"c", NAN}};
  r.checks = {{"a", Comparison::at_most, 0.5}};
  r.error = "precondition: something";
  const Json j = io::report_json(r);
  EXPECT_EQ(j["class"], "levitan");
  EXPECT_EQ(j["metrics"]["a"], 0.25);
  EXPECT_EQ(j["metrics"]["b"], "inf");
  EXPECT_EQ(j["metrics"]["c"], "nan");
  EXPECT_EQ(j["checks"][0]["satisfied"], true);
  EXPECT_EQ(j["error"], "precondition: something");
}

TEST(Digest, Sha256KnownVectors) {
  EXPECT_EQ(io::sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Parse, NumbersAcceptSimpleExpressions) {
  const Signal s = io::parse_signal(Json::parse(R"({"type": "cosine", "freq": "sqrt2", "phase": "-pi/2"})"), "f");
  // cos(sqrt2 t - pi/2) = sin(sqrt2 t)
  EXPECT_NEAR(s(1.0)(0), std::sin(std::numbers::sqrt2), 1e-12);
  const Signal c = io::parse_signal(Json("2*pi"), "c");
  EXPECT_NEAR(c(0.0)(0), 2.0 * std::numbers::pi, 1e-15);
  EXPECT_THROW(io::parse_signal(Json("2*tau"), "c"), ConfigError);
  EXPECT_THROW(io::parse_signal(Json("2**pi"), "c"), ConfigError);
}

TEST(Parse, TrigSignalMatchesItsFormula) {
  const Signal s = io::parse_signal(Json::parse(R"({
    "type": "trig", "frequencies": [1, "sqrt2"], "constant": -2,
    "cos": [{"index": [1, 0], "amp": 0.5}], "sin": [{"index": [0, 1], "amp": 0.25}]
  })"), "a");
  for (double t : {0.0, 0.7, -3.1})
    EXPECT_NEAR(s(t)(0), -2.0 + 0.5 * std::cos(t) + 0.25 * std::sin(std::numbers::sqrt2 * t), 1e-12);
}

TEST(Parse, LinearSystemForms) {
  const LinearSystem m = io::parse_linear_system(Json::parse(R"({"matrix": [[-1, 2], [0, 1]]})"), "A");
  EXPECT_EQ(m.dim(), 2u);
  EXPECT_EQ(m(0.0)(0, 1), 2.0);
  const LinearSystem s =
      io::parse_linear_system(Json::parse(R"({"scalar": {"type": "cosine", "freq": 1}, "dim": 3, "bound": 1})"), "A");
  EXPECT_EQ(s.dim(), 3u);
  EXPECT_NEAR(s(0.0)(2, 2), 1.0, 1e-15);
  const LinearSystem e = io::parse_linear_system(Json::parse(R"({"entries": [[-1, 0], [0, -2]], "bound": 2})"), "A");
  EXPECT_EQ(e(0.3)(1, 1), -2.0);
}

TEST(Parse, MinimalExperimentConfig) {
  const ExperimentConfig cfg = io::parse_experiment_config(minimal_config());
  EXPECT_EQ(cfg.name, "ou");
  EXPECT_EQ(cfg.class_label, ExperimentClass::convergence);
  EXPECT_EQ(cfg.n_paths, 100u);
  EXPECT_EQ(cfg.system->dim(), 1u);
  EXPECT_EQ(cfg.system->g()(0.0)(0), 0.5);
  EXPECT_EQ(cfg.system->f()(0.0)(0), 0.0);
  EXPECT_EQ(cfg.seed, 1u);
  EXPECT_EQ(cfg.tolerance("beta"), 0.05);
}

TEST(Parse, ErrorsNameTheField) {
  Json j = minimal_config();
  j.erase("n_paths");
  EXPECT_NE(config_error(j).find("config.n_paths"), std::string::npos);

  j = minimal_config();
  j["class"] = "chaotic";
  EXPECT_NE(config_error(j).find("config.class"), std::string::npos);

  j = minimal_config();
  j["tolerances"]["beta"] = 0;
  EXPECT_NE(config_error(j).find("tolerances.beta"), std::string::npos);

  j = minimal_config();
  j["system"]["A"] = Json::parse(R"({"matrix": [[-1, 0]]})");
  EXPECT_NE(config_error(j).find("config.system.A.matrix"), std::string::npos);

  j = minimal_config();
  j["system"]["f"] = Json::parse(R"({"type": "sawtooth"})");
  EXPECT_NE(config_error(j).find("config.system.f.type"), std::string::npos);

  j = minimal_config();
  j["window"] = Json::parse("[5, 0]");
  EXPECT_NE(config_error(j).find("config.window"), std::string::npos);

  j = minimal_config();
  j["params"] = Json::parse(R"({"period": "2*pi"})");
  EXPECT_NE(config_error(j).find("four periods"), std::string::npos);
}

TEST(Parse, SyntaxErrorsReportLineAndColumn) {
  const auto path = std::filesystem::temp_directory_path() / "favard_bad_config.json";
  io::write_file(path.string(), "{\n  \"name\": \"x\",\n  oops\n}\n");
  try {
    io::read_json_file(path.string());
    FAIL() << "no error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(path.string() + ":3:"), std::string::npos) << e.what();
  }
  std::filesystem::remove(path);
  EXPECT_THROW(io::read_json_file("/nonexistent/favard.json"), ConfigError);
}

TEST(Parse, InitialLaws) {
  const InitialLaw p = io::parse_initial_law(Json::parse(R"({"type": "point", "x": [1, 2]})"), "x0");
  Eigen::VectorXd out(2);
  p.sample(0, 1, out.data());
  EXPECT_EQ(out(1), 2.0);
  EXPECT_THROW(io::parse_initial_law(Json::parse(R"({"type": "cauchy"})"), "x0"), ConfigError);
  EXPECT_THROW(io::parse_initial_law(Json::parse(R"({"type": "gaussian", "mean": [0], "cov": [[-1]]})"), "x0"),
               ConfigError);
}
