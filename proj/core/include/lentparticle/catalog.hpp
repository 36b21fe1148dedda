#pragma once
/// Built-in scenarios with hand-written coefficient jets, configured by
/// numeric parameters only.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lentparticle/jumpsde.hpp"

namespace lp {

struct ParamSpec {
  std::string name;
  double def = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool lo_open = false;
  bool hi_open = false;
  bool integer = false;
  std::string doc;
};

struct CatalogEntry {
  std::string name;
  std::string summary;
  int default_dim = 1;
  std::vector<double> default_x0;
  int max_jet_order = 1;
  bool allows_driver = false;
  bool allows_compensation = false;
  bool compensated_default = false;
  std::vector<ParamSpec> params;
};

const std::vector<CatalogEntry>& catalog();
/// Throws a Schema error for unknown names.
const CatalogEntry& catalog_entry(const std::string& name);

struct ScenarioConfig {
  std::string name;
  std::map<std::string, double> params;  // missing entries take defaults
  std::vector<double> x0;                // empty: default
  Driver driver = Driver::None;
  bool has_compensated = false;
  bool compensated = false;
  int jet_order = -1;                    // -1: the entry's maximum
};

/// Problems as "field: message" strings, empty when the config is usable.
std::vector<std::string> check_config(const ScenarioConfig& cfg);
double param_value(const ScenarioConfig& cfg, const std::string& name);

std::unique_ptr<Scenario> make_scenario(const ScenarioConfig& cfg);
inline std::unique_ptr<Scenario> make_scenario(const std::string& name) {
  ScenarioConfig cfg;
  cfg.name = name;
  return make_scenario(cfg);
}

/// min(M1, M2): mass y^2 of jumps with y < 1 and B_y >= sqrt(y) (resp. <= -sqrt(y)).
/// Gamma[X_T] - min(M1, M2) I is PSD on the simple two-dimensional example.
double simple2d_indicator_bound(const Trajectory& traj);

/// Direct route for the subordination law identity: the nested diffusion run
/// from x0 for the total jump duration of the path, on an independent Brownian draw.
SVec<double> subordination_direct_sample(const Scenario& sc, const MarkedPoissonPath& path);

}  // namespace lp
