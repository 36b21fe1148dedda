#include "config.hpp"

#include <fstream>
#include <set>

#include <fmt/format.h>

#include "lentparticle/error.hpp"

namespace lpapp {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& field, const std::string& msg) {
  lp::fail(lp::ErrorKind::Schema, field + ": " + msg);
}

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) schema(path.empty() ? "<root>" : path, "expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) schema(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
}

double number(const json& obj, const std::string& path, const char* key, double def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_number()) schema(path + "." + key, "expected a number");
  return v.get<double>();
}

template <class Int>
Int count(const json& obj, const std::string& path, const char* key, Int def, Int lo, Int hi) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned()) schema(path + "." + key, "expected an integer");
  const auto x = v.get<long long>();
  if (x < static_cast<long long>(lo) || x > static_cast<long long>(hi))
    schema(path + "." + key, fmt::format("must lie in [{}, {}]", lo, hi));
  return static_cast<Int>(x);
}

bool flag(const json& obj, const std::string& path, const char* key, bool def) {
  if (!obj.contains(key)) return def;
  if (!obj.at(key).is_boolean()) schema(path + "." + key, "expected true or false");
  return obj.at(key).get<bool>();
}

std::string text(const json& obj, const std::string& path, const char* key, const std::string& def) {
  if (!obj.contains(key)) return def;
  if (!obj.at(key).is_string()) schema(path + "." + key, "expected a string");
  return obj.at(key).get<std::string>();
}

lp::ScenarioConfig parse_scenario(const json& s) {
  only_keys(s, "scenario", {"name", "params", "x0", "driver", "compensated", "jet_order"});
  lp::ScenarioConfig c;
  if (!s.contains("name")) schema("scenario.name", "required");
  c.name = text(s, "scenario", "name", "");
  if (s.contains("params")) {
    const json& p = s.at("params");
    if (!p.is_object()) schema("scenario.params", "expected an object");
    for (auto it = p.begin(); it != p.end(); ++it) {
      if (!it.value().is_number()) schema("scenario.params." + it.key(), "expected a number");
      c.params[it.key()] = it.value().get<double>();
    }
  }
  if (s.contains("x0")) {
    const json& x = s.at("x0");
    if (x.is_number()) {
      c.x0 = {x.get<double>()};
    } else if (x.is_array()) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (!x[i].is_number()) schema(fmt::format("scenario.x0[{}]", i), "expected a number");
        c.x0.push_back(x[i].get<double>());
      }
    } else {
      schema("scenario.x0", "expected a number or an array");
    }
  }
  const std::string driver = text(s, "scenario", "driver", "none");
  if (driver == "none") {
    c.driver = lp::Driver::None;
  } else if (driver == "time") {
    c.driver = lp::Driver::Time;
  } else if (driver == "brownian") {
    c.driver = lp::Driver::Brownian;
  } else {
    schema("scenario.driver", "expected one of none, time, brownian");
  }
  if (s.contains("compensated")) {
    c.has_compensated = true;
    c.compensated = flag(s, "scenario", "compensated", false);
  }
  c.jet_order = count<int>(s, "scenario", "jet_order", -1, 0, 2);
  const auto errs = lp::check_config(c);
  if (!errs.empty()) lp::fail(lp::ErrorKind::Schema, errs.front());
  return c;
}

}  // namespace

Config parse_config(const json& j) {
  only_keys(j, "", {"scenario", "run", "tauber", "crosscheck", "output"});
  Config c;
  c.raw = j;
  if (!j.contains("scenario")) schema("scenario", "required");
  c.scenario = parse_scenario(j.at("scenario"));

  const json run = j.value("run", json::object());
  only_keys(run, "run", {"paths", "rho_replicas", "grad_paths", "seed", "workers", "density_points", "probe_budget",
                        "adjoint_draws", "adjoint_paths"});
  if (!run.contains("seed")) schema("run.seed", "required");
  if (!run.at("seed").is_number_unsigned() && !(run.at("seed").is_number_integer() && run.at("seed").get<long long>() >= 0))
    schema("run.seed", "expected a nonnegative integer");
  c.run.seed = run.at("seed").get<std::uint64_t>();
  c.run.paths = count<std::size_t>(run, "run", "paths", c.run.paths, 1, 100000000);
  c.run.rho_replicas = count<int>(run, "run", "rho_replicas", c.run.rho_replicas, 2, 1 << 20);
  c.run.grad_paths = count<int>(run, "run", "grad_paths", c.run.grad_paths, 0, 1000);
  c.run.workers = count<int>(run, "run", "workers", 0, 0, 1024);
  c.run.density_points = count<int>(run, "run", "density_points", c.run.density_points, 2, 10000);
  c.run.probe_budget = count<int>(run, "run", "probe_budget", c.run.probe_budget, 1, 100000);
  c.run.adjoint_draws = count<int>(run, "run", "adjoint_draws", c.run.adjoint_draws, 0, 1 << 20);
  c.run.adjoint_paths = count<std::size_t>(run, "run", "adjoint_paths", c.run.adjoint_paths, 0, 100000000);

  const json tb = j.value("tauber", json::object());
  only_keys(tb, "tauber", {"psi", "lambda_min", "lambda_max", "points", "small_ball_samples", "small_ball_truncation",
                           "small_ball_psi", "small_ball_horizon"});
  c.tauber.psi = text(tb, "tauber", "psi", c.tauber.psi);
  c.tauber.small_ball_psi = text(tb, "tauber", "small_ball_psi", c.tauber.small_ball_psi);
  for (const auto* key : {"psi", "small_ball_psi"}) {
    const std::string v = key == std::string("psi") ? c.tauber.psi : c.tauber.small_ball_psi;
    if (v != "y" && v != "y2") schema(std::string("tauber.") + key, "expected \"y\" or \"y2\"");
  }
  c.tauber.lambda_min = number(tb, "tauber", "lambda_min", c.tauber.lambda_min);
  c.tauber.lambda_max = number(tb, "tauber", "lambda_max", c.tauber.lambda_max);
  if (!(c.tauber.lambda_min > 0.0)) schema("tauber.lambda_min", "must be positive");
  if (!(c.tauber.lambda_max >= 1e3 * c.tauber.lambda_min)) schema("tauber.lambda_max", "grid must span at least 3 decades");
  c.tauber.points = count<int>(tb, "tauber", "points", c.tauber.points, 4, 10000);
  c.tauber.small_ball_samples = count<std::size_t>(tb, "tauber", "small_ball_samples", c.tauber.small_ball_samples, 100, 100000000);
  c.tauber.small_ball_truncation = number(tb, "tauber", "small_ball_truncation", c.tauber.small_ball_truncation);
  if (!(c.tauber.small_ball_truncation > 0.0)) schema("tauber.small_ball_truncation", "must be positive");
  c.tauber.small_ball_horizon = number(tb, "tauber", "small_ball_horizon", c.tauber.small_ball_horizon);
  if (!(c.tauber.small_ball_horizon > 0.0)) schema("tauber.small_ball_horizon", "must be positive");

  const json cc = j.value("crosscheck", json::object());
  only_keys(cc, "crosscheck", {"paths"});
  c.crosscheck.paths = count<std::size_t>(cc, "crosscheck", "paths", c.crosscheck.paths, 10, 100000000);

  const json out = j.value("output", json::object());
  only_keys(out, "output", {"dir", "csv", "svg", "trajectory_dump"});
  c.output.dir = text(out, "output", "dir", "");
  c.output.csv = flag(out, "output", "csv", true);
  c.output.svg = flag(out, "output", "svg", true);
  c.output.trajectory_dump = flag(out, "output", "trajectory_dump", false);

  c.hash = config_hash(j);
  return c;
}

Config load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) lp::fail(lp::ErrorKind::Schema, "cannot read config file " + file.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    lp::fail(lp::ErrorKind::Schema, std::string("<root>: invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

json canonical_config(const json& raw) {
  json j = raw;
  j.erase("output");
  if (j.contains("run") && j["run"].is_object()) j["run"].erase("workers");
  return j;
}

std::string config_hash(const json& raw) {
  const json j = canonical_config(raw);
  // FNV-1a over the canonical dump (keys are sorted)
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace lpapp
