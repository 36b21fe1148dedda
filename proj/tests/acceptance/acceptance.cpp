// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Every check runs three times (1 worker, 8 workers, 1 worker again); the
// last criterion compares the three results.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "config.hpp"
#include "lentparticle/catalog.hpp"
#include "lentparticle/lent_particle.hpp"
#include "lentparticle/parallel.hpp"

namespace {

using nlohmann::json;

const std::filesystem::path kConfigDir = LP_CONFIG_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
  json fingerprint;  // everything the verdict depends on
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

lpapp::Config load(const std::string& name) {
  lpapp::Config cfg = lpapp::load_config(kConfigDir / (name + ".json"));
  cfg.output.dir.clear();
  return cfg;
}

lp::StreamKey origin(std::uint64_t seed, std::uint64_t path) { return {seed, path, 0, lp::StreamTag::Skeleton, 0}; }

// commands are run once per worker count and shared between criteria
class Runs {
 public:
  explicit Runs(int workers) : workers_(workers) {}

  const json& run(const std::string& name) {
    auto it = reports_.find(name);
    if (it != reports_.end()) return it->second;
    const auto t0 = std::chrono::steady_clock::now();
    json r = lpapp::report_body(lpapp::run_command(load(name), workers_).report);
    times_[name] = seconds_since(t0);
    return reports_[name] = std::move(r);
  }
  const json& tauber() {
    if (!reports_.contains("@tauber")) {
      const auto t0 = std::chrono::steady_clock::now();
      reports_["@tauber"] = lpapp::report_body(lpapp::tauber_command(load("tauber"), workers_).report);
      times_["@tauber"] = seconds_since(t0);
    }
    return reports_["@tauber"];
  }
  const json& crosscheck() {
    if (!reports_.contains("@crosscheck")) {
      const auto t0 = std::chrono::steady_clock::now();
      reports_["@crosscheck"] = lpapp::report_body(lpapp::crosscheck_command(load("crosscheck"), workers_).report);
      times_["@crosscheck"] = seconds_since(t0);
    }
    return reports_["@crosscheck"];
  }
  double seconds(const std::string& name) const { return times_.at(name); }
  int workers() const { return workers_; }

 private:
  int workers_;
  std::map<std::string, json> reports_;
  std::map<std::string, double> times_;
};

bool verdict_pass(const json& report, const std::string& key) {
  return report.contains("verdicts") && report["verdicts"].contains(key) && report["verdicts"][key]["pass"].get<bool>();
}

std::string verdict_detail(const json& report, const std::string& key) {
  if (!report.contains("verdicts") || !report["verdicts"].contains(key)) return "no verdict '" + key + "'";
  return report["verdicts"][key]["detail"].get<std::string>();
}

Outcome gamma_dual(Runs& runs) {
  Outcome o{true, "", json::object()};
  for (const std::string name : {"compound", "compound-linear", "simple2d"}) {
    const json& r = runs.run(name);
    const double t = runs.seconds(name);
    const bool ok = verdict_pass(r, "gamma_dual") && t <= 60.0 &&
                    r["settings"]["rho_replicas"].get<int>() >= 10000;
    o.pass = o.pass && ok;
    o.detail += fmt::format("{}{}: {} ({:.1f} s)", o.detail.empty() ? "" : "; ", name, verdict_detail(r, "gamma_dual"), t);
    o.fingerprint[name] = r["diagnostics"]["gamma_check"];
  }
  return o;
}

Outcome simple_example(Runs& runs) {
  const auto sc = lp::make_scenario("simple2d");
  const auto errs = lp::parallel_map(1000, runs.workers(), [&](std::size_t i) {
    const auto p = lp::sample_path(sc->measure(), sc->horizon(), origin(11, i));
    auto t = lp::solve(*sc, p);
    lp::accumulate_malliavin(t);
    double e = 0.0;
    for (const auto& [j, inc] : lp::malliavin_matrix(t).increments) {
      const double y = t.marks[j].y, b = t.marks[j].v[0];
      e = std::max({e, std::abs(inc(0, 0) - y), std::abs(inc(0, 1) - y * b), std::abs(inc(1, 0) - y * b),
                    std::abs(inc(1, 1) - y * b * b)});
    }
    return e;
  });
  const double worst = *std::max_element(errs.begin(), errs.end());
  const json& r = runs.run("simple2d");
  const bool bound = verdict_pass(r, "indicator_bound") && r["settings"]["paths"].get<std::size_t>() >= 1000;
  return {worst <= 1e-12 && bound,
          fmt::format("max increment error {:.2e} over 1000 paths; {}", worst, verdict_detail(r, "indicator_bound")),
          {{"increment_error", worst}, {"bound", r["verdicts"]["indicator_bound"]}}};
}

Outcome flow_algebra(Runs& runs) {
  struct Case {
    lp::ScenarioConfig cfg;
    std::size_t paths;
  };
  std::vector<Case> cases(3);
  cases[0].cfg.name = "compound-linear";
  cases[0].cfg.params = {{"beta", 0.8}, {"sigma1", 0.3}};
  cases[0].cfg.driver = lp::Driver::Brownian;
  cases[0].paths = 400;
  cases[1].cfg.name = "subordination-linear";
  cases[1].cfg.params = {{"kappa", 1.0}, {"theta", 0.5}};
  cases[1].cfg.jet_order = 1;
  cases[1].paths = 300;
  cases[2].cfg.name = "levy-field-demo";
  cases[2].paths = 300;
  double defect = 0.0;
  std::size_t events = 0;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto sc = lp::make_scenario(cases[c].cfg);
    const lp::JetSystem js(*sc, 1);
    const auto res = lp::parallel_map(cases[c].paths, runs.workers(), [&](std::size_t i) {
      const auto t = js.solve(lp::sample_path(sc->measure(), sc->horizon(), origin(13 + c, i)));
      double e = 0.0;
      const int d = t.dim;
      for (std::size_t k = 0; k < t.K.size(); ++k) {
        const lp::SMat<double> m = t.K[k] * t.Kbar[k];
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b) e = std::max(e, std::abs(m(a, b) - (a == b ? 1.0 : 0.0)));
      }
      return std::pair<double, std::size_t>{e, t.K.size()};
    });
    for (const auto& [e, n] : res) {
      defect = std::max(defect, e);
      events += n;
    }
  }
  // d = 1 product formula on compound-linear
  lp::ScenarioConfig lin;
  lin.name = "compound-linear";
  lin.params = {{"beta", 0.7}};
  const auto sc = lp::make_scenario(lin);
  const lp::JetSystem js(*sc, 1);
  const auto prod = lp::parallel_map(1000, runs.workers(), [&](std::size_t i) {
    const auto p = lp::sample_path(sc->measure(), sc->horizon(), origin(17, i));
    const auto t = js.solve(p);
    double k = 1.0;
    for (const auto& j : p.jumps) k *= 1.0 + 0.7 * j.mark;
    return std::abs(t.K.back()(0, 0) - k) / k;
  });
  const double prod_err = *std::max_element(prod.begin(), prod.end());
  return {defect <= 1e-8 && prod_err <= 1e-12,
          fmt::format("max |K Kbar - I| = {:.2e} over {} events on 1000 trajectories; product formula relative error {:.2e}",
                      defect, events, prod_err),
          {{"defect", defect}, {"events", events}, {"product", prod_err}}};
}

Outcome ibp_oracle(Runs& runs) {
  const json& r = runs.run("compound");
  const double t = runs.seconds("compound");
  const bool sized = r["settings"]["paths"].get<std::size_t>() >= 100000;
  // the untapered weight xi = u^2 leaves a boundary flux at y_max; shown for reference
  const json& square = runs.run("compound-square-weight");
  return {verdict_pass(r, "ibp_oracle") && sized && t <= 180.0,
          fmt::format("{} ({:.1f} s); untapered xi = u^2 for reference: {}", verdict_detail(r, "ibp_oracle"), t,
                      verdict_detail(square, "ibp_oracle")),
          {{"estimate", r["estimates"]["ibp_sin_0"]}, {"oracle", r["oracle"]}, {"square", square["estimates"]["ibp_sin_0"]}}};
}

Outcome adjoint(Runs& runs) {
  const json& r = runs.run("compound");
  const bool sized = r["settings"]["adjoint_paths"].get<std::size_t>() >= 10000 && r["settings"]["adjoint_draws"].get<int>() >= 100 &&
                     r["adjoint_triples"].size() >= 2;
  return {verdict_pass(r, "adjoint") && sized, verdict_detail(r, "adjoint"),
          {{"lhs", {r["estimates"]["adjoint_lhs_0"], r["estimates"]["adjoint_lhs_1"]}},
           {"rhs", {r["estimates"]["adjoint_rhs_0"], r["estimates"]["adjoint_rhs_1"]}}}};
}

Outcome tauberian(Runs& runs) {
  const json& r = runs.tauber();
  return {verdict_pass(r, "laplace_fit") && verdict_pass(r, "small_ball_fit"),
          verdict_detail(r, "laplace_fit") + "; " + verdict_detail(r, "small_ball_fit") +
              fmt::format(" ({:.1f} s)", runs.seconds("@tauber")),
          r["estimates"]};
}

Outcome norm_identities(Runs& runs) {
  lp::ScenarioConfig cfg;
  cfg.name = "compound";
  const auto sc = lp::make_scenario(cfg);
  lp::MarkedPoissonPath p;
  for (std::uint64_t i = 0;; ++i) {
    p = lp::sample_path(sc->measure(), sc->horizon(), origin(19, i));
    if (p.size() >= 6) break;
  }
  auto t = lp::solve(*sc, p);
  lp::accumulate_malliavin(t);
  const double g = lp::malliavin_matrix(t).gamma(0, 0);
  auto ratio = [&](lp::RhoBasis basis) {
    const auto s = lp::parallel_map(100000, runs.workers(), [&](std::size_t r) {
      return lp::gradient_sample(t, lp::attach_rho_marks(p, 1, basis, 1, static_cast<std::uint32_t>(r))).value[0];
    });
    return lp::pnorm_ratio(s, g, 4.0);
  };
  const lp::Estimate ga = ratio(lp::RhoBasis::Gaussian), ra = ratio(lp::RhoBasis::Rademacher);
  const double target = std::pow(3.0, 0.25);
  const bool gauss = std::abs(ga.value - target) <= 0.02 * target;
  const bool rad = ra.value - 3.0 * ra.se >= 1.0 && ra.value + 3.0 * ra.se <= std::sqrt(3.0);
  return {gauss && rad,
          fmt::format("Gaussian ||F#||_4 / Gamma^1/2 = {:.4f} (3^1/4 = {:.4f}, {:.2f}%); Rademacher {:.4f} +- {:.4f} in [1, {:.4f}] ({} jumps)",
                      ga.value, target, 100.0 * std::abs(ga.value - target) / target, ra.value, ra.se, std::sqrt(3.0), p.size()),
          {{"gaussian", {ga.value, ga.se}}, {"rademacher", {ra.value, ra.se}}}};
}

Outcome law_identity(Runs& runs) {
  const json& r = runs.crosscheck();
  const bool sized = r["diagnostics"]["ks"][0]["n"].get<std::size_t>() >= 5000;
  return {verdict_pass(r, "law_identity") && sized,
          verdict_detail(r, "law_identity") + fmt::format(" at n = {} per route", r["diagnostics"]["ks"][0]["n"].get<std::size_t>()),
          r["diagnostics"]["ks"]};
}

Outcome symmetry(Runs&) {
  double worst = 0.0;
  std::size_t n = 0;
  json fp = json::object();
  bool every = true;
  for (const auto& e : lp::catalog()) {
    const auto sc = lp::make_scenario(e.name);
    const auto cases = sc->symmetry_cases();
    every = every && !cases.empty();
    for (const auto& c : cases) {
      const double r = std::abs(lp::generator_symmetry(c.coordinate, c.f, c.g).residual);
      worst = std::max(worst, r);
      fp[e.name + ": " + c.label] = r;
      ++n;
    }
  }
  return {every && worst <= 1e-6,
          fmt::format("max residual {:.2e} over {} test pairs, every catalog scenario covered: {}", worst, n, every ? "yes" : "no"),
          fp};
}

Outcome density(Runs& runs) {
  const json& r = runs.run("compound");
  return {verdict_pass(r, "density"), verdict_detail(r, "density"), r["diagnostics"]["density"]};
}

struct Criterion {
  const char* id;
  const char* title;
  std::function<Outcome(Runs&)> check;
};

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  const std::vector<Criterion> criteria = {
      {"C1", "Gamma dual-oracle", gamma_dual},
      {"C2", "simple example exactness", simple_example},
      {"C3", "flow algebra", flow_algebra},
      {"C4", "IBP against the characteristic function", ibp_oracle},
      {"C5", "adjoint duality", adjoint},
      {"C6", "Tauberian fits", tauberian},
      {"C7", "norm identities", norm_identities},
      {"C8", "subordination law identity", law_identity},
      {"C9", "generator symmetry", symmetry},
      {"C10", "density consistency", density},
  };
  const auto t0 = std::chrono::steady_clock::now();
  Runs first(1), wide(8), again(1);
  int failures = 0;
  std::vector<json> fp_first, fp_wide, fp_again;
  std::vector<std::string> errors(criteria.size());
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    Outcome o;
    try {
      o = c.check(first);
      fp_first.push_back(o.fingerprint);
      fp_wide.push_back(c.check(wide).fingerprint);
      fp_again.push_back(c.check(again).fingerprint);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what(), json()};
      fp_first.push_back(json("error"));
      fp_wide.push_back(json("error 8"));
      fp_again.push_back(json("error again"));
    }
    failures += !o.pass;
    std::printf("[%s] %s %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str());
    std::fflush(stdout);
  }

  // C11: fingerprints plus the complete report bodies of every command
  std::vector<std::string> differing;
  for (std::size_t i = 0; i < criteria.size(); ++i)
    if (fp_first[i].dump() != fp_wide[i].dump() || fp_first[i].dump() != fp_again[i].dump()) differing.push_back(criteria[i].id);
  std::size_t reports = 0;
  for (const std::string name : {"compound", "compound-linear", "simple2d", "compound-square-weight"}) {
    ++reports;
    if (first.run(name).dump() != wide.run(name).dump() || first.run(name).dump() != again.run(name).dump())
      differing.push_back("run " + name);
  }
  reports += 2;
  if (first.tauber().dump() != wide.tauber().dump() || first.tauber().dump() != again.tauber().dump()) differing.push_back("tauber");
  if (first.crosscheck().dump() != wide.crosscheck().dump() || first.crosscheck().dump() != again.crosscheck().dump())
    differing.push_back("crosscheck");
  const bool same = differing.empty();
  failures += !same;
  std::string which;
  for (const auto& d : differing) which += " " + d;
  std::printf("[%s] C11 reproducibility: %s\n", same ? "PASS" : "FAIL",
              same ? fmt::format("{} report bodies and {} criterion results identical for workers 1, 8 and a repeated run", reports,
                                 criteria.size())
                         .c_str()
                   : ("differences in" + which).c_str());
  std::printf("%d of %zu criteria failed, %.1f s\n", failures, criteria.size() + 1, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
