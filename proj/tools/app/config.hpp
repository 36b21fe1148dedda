#pragma once
// Run configuration: JSON schema checks with field paths.

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "lentparticle/catalog.hpp"

namespace lpapp {

struct RunSettings {
  std::size_t paths = 10000;
  int rho_replicas = 100;   // auxiliary-mark replicas per checked path
  int grad_paths = 3;       // paths used for the Gamma dual check
  std::uint64_t seed = 0;
  int workers = 0;          // 0: LENTPARTICLE_WORKERS or hardware concurrency
  int density_points = 60;
  int probe_budget = 64;
  int adjoint_draws = 100;      // gradient draws per path for the duality check (0: off)
  std::size_t adjoint_paths = 10000;
};

struct TauberSettings {
  std::string psi = "y2";  // "y" or "y2"
  double lambda_min = 1e4;
  double lambda_max = 1e14;
  int points = 33;
  std::size_t small_ball_samples = 100000;
  double small_ball_truncation = 1e-6;
  std::string small_ball_psi = "y";
  double small_ball_horizon = 1.0;
};

struct CrosscheckSettings {
  std::size_t paths = 5000;
};

struct OutputSettings {
  std::string dir;  // empty: no files
  bool csv = true;
  bool svg = true;
  bool trajectory_dump = false;
};

struct Config {
  lp::ScenarioConfig scenario;
  RunSettings run;
  TauberSettings tauber;
  CrosscheckSettings crosscheck;
  OutputSettings output;
  nlohmann::json raw;
  std::string hash;  // over everything except run.workers and output
};

/// Throws lp::Error(Schema) naming the offending field.
Config parse_config(const nlohmann::json& j);
Config load_config(const std::filesystem::path& file);

/// The config without run.workers and the output section: what a report depends on.
nlohmann::json canonical_config(const nlohmann::json& raw);
std::string config_hash(const nlohmann::json& raw);

}  // namespace lpapp
