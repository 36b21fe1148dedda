#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "lentparticle/catalog.hpp"
#include "lentparticle/diagnostics.hpp"
#include "lentparticle/ibp.hpp"
#include "lentparticle/lent_particle.hpp"
#include "lentparticle/parallel.hpp"
#include "report_util.hpp"
#include "svg.hpp"

#ifndef LENTPARTICLE_VERSION
#define LENTPARTICLE_VERSION "0.0.0"
#endif

namespace lpapp {

using nlohmann::json;
using namespace detail;

std::string version() { return LENTPARTICLE_VERSION; }

int exit_code(lp::ErrorKind kind) {
  switch (kind) {
    case lp::ErrorKind::Schema:
    case lp::ErrorKind::Domain:
    case lp::ErrorKind::Capability: return 2;
    case lp::ErrorKind::Hypothesis: return 3;
    case lp::ErrorKind::Numeric: return 4;
  }
  return 1;
}

json report_body(const json& report) {
  json j = report;
  j.erase("meta");
  return j;
}

namespace {

constexpr double kFlowTolerance = 1e-8;
constexpr double kGammaRelTolerance = 0.05;
constexpr double kIbpRelTolerance = 0.03;
constexpr double kDensityMassTolerance = 0.02;
constexpr double kBandZ = 3.0;

std::string ij(int i, int j) { return fmt::format("{}{}", i, j); }

std::vector<std::string> path_columns(int d, int weight_order, bool bound) {
  std::vector<std::string> c = {"path", "jumps"};
  for (int i = 0; i < d; ++i) c.push_back(fmt::format("x_{}", i));
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) c.push_back("gamma_" + ij(i, j));
  c.push_back("det_gamma");
  if (weight_order >= 1) {
    for (int i = 0; i < d; ++i) c.push_back(fmt::format("A_{}", i));
    for (int i = 0; i < d; ++i) c.push_back(fmt::format("z1_{}", i));
    if (weight_order == 2) c.push_back("z2");
    c.push_back("rejected");
  }
  c.push_back("flow_defect");
  if (bound) {
    c.push_back("bound");
    c.push_back("bound_margin");
  }
  return c;
}

// max over events of the row-sum norm of K Kbar - I
double flow_defect(const lp::Trajectory& t) {
  if (t.K.size() != t.x.size() || t.Kbar.size() != t.x.size()) return std::nan("");
  double worst = 0.0;
  for (std::size_t k = 0; k < t.K.size(); ++k) {
    const lp::SMat<double> p = t.K[k] * t.Kbar[k];
    for (int i = 0; i < t.dim; ++i) {
      double row = 0.0;
      for (int j = 0; j < t.dim; ++j) row += std::abs(p(i, j) - (i == j ? 1.0 : 0.0));
      worst = std::max(worst, row);
    }
  }
  return worst;
}

struct AdjointCase {
  lp::AdjointTriple triple;
  std::string label;
};

// Two fixed test triples (X, Y, Z) = (g(X_T), X_T[y], h(X_T)), centred at x0.
std::vector<AdjointCase> adjoint_cases(const lp::SVec<double>& x0) {
  const int d = x0.size();
  std::vector<AdjointCase> out;
  {
    lp::AdjointTriple t;
    t.g = [](const lp::SVec<double>&) { return 1.0; };
    t.dg = [d](const lp::SVec<double>&) { return lp::SVec<double>(d); };
    t.y = 0;
    t.h = [x0](const lp::SVec<double>& x) { return std::sin(x[0] - x0[0]); };
    t.dh = [x0, d](const lp::SVec<double>& x) {
      lp::SVec<double> g(d);
      g[0] = std::cos(x[0] - x0[0]);
      return g;
    };
    out.push_back({t, "X=1, Y=x_0, Z=sin(x_0)"});
  }
  {
    const int last = d - 1;
    lp::AdjointTriple t;
    t.g = [x0](const lp::SVec<double>& x) { return std::cos(x[0] - x0[0]); };
    t.dg = [x0, d](const lp::SVec<double>& x) {
      lp::SVec<double> g(d);
      g[0] = -std::sin(x[0] - x0[0]);
      return g;
    };
    t.y = last;
    t.h = [x0, last](const lp::SVec<double>& x) { return std::atan(x[last] - x0[last]); };
    t.dh = [x0, d, last](const lp::SVec<double>& x) {
      lp::SVec<double> g(d);
      const double u = x[last] - x0[last];
      g[last] = 1.0 / (1.0 + u * u);
      return g;
    };
    out.push_back({t, fmt::format("X=cos(x_0), Y=x_{0}, Z=atan(x_{0})", last)});
  }
  return out;
}

// Re E[exp(i (X_T - x0))] for the compound scenario.
double compound_re_phi(const lp::Scenario& sc) {
  const double t = sc.horizon();
  const double c = lp::compensator_integral(sc.measure(), [](double u) { return std::cos(u) - 1.0; }, t);
  double s = lp::compensator_integral(sc.measure(), [](double u) { return std::sin(u); }, t);
  if (sc.info().compensated) s -= lp::compensator_integral(sc.measure(), [](double u) { return u; }, t);
  return std::exp(c) * std::cos(s);
}

json scenario_json(const lp::Scenario& sc, int weight_order) {
  const auto& info = sc.info();
  std::vector<double> x0(info.x0.a.begin(), info.x0.a.begin() + info.dim);
  return {{"name", info.name},
          {"dim", info.dim},
          {"mark_dim", info.mark_dim},
          {"x0", x0},
          {"horizon", info.horizon},
          {"measure", lp::describe(info.measure)},
          {"mass", lp::total_mass(info.measure)},
          {"compensated", info.compensated},
          {"driver", lp::to_string(info.driver)},
          {"jet_order", info.jet_order},
          {"weight_order", weight_order}};
}

lp::SVec<double> x0_of(const json& header) {
  const auto v = header.at("scenario").at("x0").get<std::vector<double>>();
  lp::SVec<double> x(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) x[static_cast<int>(i)] = v[i];
  return x;
}

double max_of(const std::vector<double>& v) {
  double m = -INFINITY;
  for (double x : v) m = std::max(m, x);
  return m;
}

std::string density_plot(const Table& t) {
  ChartOptions o;
  o.title = "Density of X_T";
  o.xlabel = "x";
  o.ylabel = "density";
  Series ibp{"weighted (IBP)", t.column("grid"), t.column("ibp"), "#1f77b4", false, false};
  Series kde{"kernel", t.column("grid"), t.column("kde"), "#d62728", true, false};
  return line_chart(o, {ibp, kde});
}

}  // namespace

Summary summarize_run(const json& header, const Table& paths, const Table& gamma_check, const Table& adjoint) {
  Summary s;
  const json& scen = header.at("scenario");
  const int d = scen.at("dim").get<int>();
  const int worder = scen.at("weight_order").get<int>();
  const lp::SVec<double> x0 = x0_of(header);
  const std::size_t n = paths.rows.size();

  std::vector<lp::SVec<double>> xs(n, lp::SVec<double>(d));
  for (int i = 0; i < d; ++i) {
    const auto col = paths.column(fmt::format("x_{}", i));
    for (std::size_t r = 0; r < n; ++r) xs[r][i] = col[r];
    s.estimates[fmt::format("x_mean_{}", i)] = to_json(lp::mean_se(col));
  }
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) s.estimates["gamma_mean_" + ij(i, j)] = to_json(lp::mean_se(paths.column("gamma_" + ij(i, j))));
  s.estimates["jumps_mean"] = to_json(lp::mean_se(paths.column("jumps")));

  const auto det = paths.column("det_gamma");
  std::vector<double> absdet(det.size());
  std::transform(det.begin(), det.end(), absdet.begin(), [](double v) { return std::abs(v); });
  json inv = json::object();
  for (int p = 1; p <= 4; ++p) inv[fmt::format("p{}", p)] = to_json(lp::inverse_moment(absdet, p));
  s.diagnostics["inverse_moments_det_gamma"] = inv;

  const double fd = max_of(paths.column("flow_defect"));
  s.diagnostics["flow_defect_max"] = fd;
  s.verdicts["flow_inverse"] = verdict(fd <= kFlowTolerance, fmt::format("max |K Kbar - I| = {:.3e}", fd));

  if (worder >= 1) {
    std::vector<lp::PathWeights> pws(n);
    const auto rej = paths.column("rejected");
    std::vector<std::vector<double>> z1(d);
    for (int i = 0; i < d; ++i) z1[i] = paths.column(fmt::format("z1_{}", i));
    const std::vector<double> z2 = worder == 2 ? paths.column("z2") : std::vector<double>(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      pws[r].rejected = rej[r] != 0.0;
      pws[r].x = xs[r];
      pws[r].z1 = lp::SVec<double>(d);
      for (int i = 0; i < d; ++i) pws[r].z1[i] = z1[i][r];
      pws[r].has_z2 = worder == 2;
      pws[r].z2 = z2[r];
    }
    bool ibp_ok = true;
    std::vector<double> weight0;
    for (int i = 0; i < d; ++i) {
      const int idx[1] = {i};
      const lp::WeightResult w = lp::weight(pws, idx);
      if (i == 0) {
        weight0 = w.z;
        const double rf = w.rejection_fraction();
        s.diagnostics["rejection_fraction"] = rf;
        s.diagnostics["rejected_paths"] = w.rejected;
        if (w.warn())
          s.warnings.push_back(fmt::format("{:.2f}% of paths have det Gamma below {:g} and carry a zero weight", 100.0 * rf,
                                           lp::kGammaDetFloor));
      }
      const double c = x0[i];
      const lp::IbpEstimate e = lp::expectation_ibp([i, c](const lp::SVec<double>& x) { return std::sin(x[i] - c); },
                                                    [i, c](const lp::SVec<double>& x) { return std::cos(x[i] - c); }, xs, w);
      s.estimates[fmt::format("z1_mean_{}", i)] = to_json(lp::mean_se(w.z));
      s.estimates[fmt::format("ibp_sin_{}", i)] = to_json(e.weighted);
      s.estimates[fmt::format("direct_cos_{}", i)] = to_json(e.direct);
      s.estimates[fmt::format("ibp_difference_{}", i)] = to_json(e.difference);
      ibp_ok = ibp_ok && std::abs(e.difference.value) <= kBandZ * e.difference.se;
    }
    s.verdicts["ibp_direct"] =
        verdict(ibp_ok, "E[sin(x_i - x0_i) Z1_i] against E[cos(x_i - x0_i)], paired 3-SE band per coordinate");

    if (worder == 2) {
      const int idx[2] = {0, 0};
      const lp::WeightResult w2 = lp::weight(pws, idx);
      const double c = x0[0];
      const lp::IbpEstimate e = lp::expectation_ibp([c](const lp::SVec<double>& x) { return std::cos(x[0] - c); },
                                                    [c](const lp::SVec<double>& x) { return -std::cos(x[0] - c); }, xs, w2);
      s.estimates["z2_mean"] = to_json(lp::mean_se(w2.z));
      s.estimates["ibp2_cos"] = to_json(e.weighted);
      s.estimates["direct2_minus_cos"] = to_json(e.direct);
      s.estimates["ibp2_difference"] = to_json(e.difference);
    }

    if (header.contains("oracle") && header["oracle"].contains("re_phi_1")) {
      const double phi = header["oracle"]["re_phi_1"].get<double>();
      const json& w = s.estimates["ibp_sin_0"];
      const double v = w["value"].get<double>(), se = w["se"].get<double>();
      const double err = std::abs(v - phi);
      s.verdicts["ibp_oracle"] =
          verdict(err <= kBandZ * se && err <= kIbpRelTolerance * std::abs(phi),
                  fmt::format("E[sin Z1] = {:.6f} +- {:.6f} against Re phi(1) = {:.6f}: {:.2f} SE, {:.2f}% relative", v, se,
                              phi, se > 0 ? err / se : INFINITY, 100.0 * err / std::abs(phi)));
    }

    if (d == 1) {
      std::vector<double> x(n);
      for (std::size_t r = 0; r < n; ++r) x[r] = xs[r][0];
      const int points = header.at("settings").at("density_points").get<int>();
      const auto grid = lp::density_grid(x, points);
      const lp::DensityEstimate de = lp::density_ibp(x, weight0, grid);
      Table t;
      t.columns = {"grid", "ibp", "ibp_se", "kde", "kde_se", "compared"};
      std::size_t compared = 0;
      for (std::size_t k = 0; k < grid.size(); ++k) {
        t.add_row({de.grid[k], de.ibp[k], de.ibp_se[k], de.kde[k], de.kde_se[k], de.compared[k] ? 1.0 : 0.0});
        compared += de.compared[k];
      }
      s.diagnostics["density"] = {{"integral", de.integral}, {"integral_se", de.integral_se}, {"max_z", de.max_z}, {"bandwidth", de.bandwidth},
                                  {"points", points}, {"compared_points", compared}};
      s.verdicts["density"] = verdict(std::abs(de.integral - 1.0) <= kDensityMassTolerance && de.max_z <= kBandZ,
                                      fmt::format("integral {:.4f} (SE {:.4f}), max |ibp - kde| / joint SE = {:.2f} over {} of {} points",
                                                  de.integral, de.integral_se, de.max_z, compared, points));
      s.plots.emplace_back("density.svg", density_plot(t));
      s.derived.emplace_back("density.csv", std::move(t));
    }
  }

  if (paths.has("bound_margin")) {
    const auto m = paths.column("bound_margin");
    const auto g00 = paths.column("gamma_00");
    std::size_t bad = 0;
    double worst = INFINITY;
    for (std::size_t r = 0; r < n; ++r) {
      worst = std::min(worst, m[r]);
      if (m[r] < -1e-10 * std::max(1.0, std::abs(g00[r]))) ++bad;
    }
    s.diagnostics["indicator_bound_margin_min"] = worst;
    s.verdicts["indicator_bound"] =
        verdict(bad == 0, fmt::format("Gamma - min(M1, M2) I has a negative eigenvalue on {} of {} paths", bad, n));
  }

  if (!gamma_check.rows.empty()) {
    const auto path = gamma_check.column("path"), ci = gamma_check.column("i"), cj = gamma_check.column("j");
    const auto lent = gamma_check.column("lent"), mc = gamma_check.column("mc"), se = gamma_check.column("mc_se"),
               jet = gamma_check.column("jet");
    std::map<std::pair<double, double>, double> diag;  // (path, i) -> Gamma_ii
    for (std::size_t r = 0; r < lent.size(); ++r)
      if (ci[r] == cj[r]) diag[{path[r], ci[r]}] = lent[r];
    double max_rel = 0.0, max_z = 0.0, max_jet = 0.0;
    bool ok = true;
    for (std::size_t r = 0; r < lent.size(); ++r) {
      const double scale = std::sqrt(diag[{path[r], ci[r]}] * diag[{path[r], cj[r]}]);
      const double diff = std::abs(lent[r] - mc[r]);
      const double rel = scale > 0.0 ? diff / scale : (diff == 0.0 ? 0.0 : INFINITY);
      const double z = se[r] > 0.0 ? diff / se[r] : (diff == 0.0 ? 0.0 : INFINITY);
      max_rel = std::max(max_rel, rel);
      max_z = std::max(max_z, z);
      max_jet = std::max(max_jet, scale > 0.0 ? std::abs(jet[r] - lent[r]) / scale : std::abs(jet[r] - lent[r]));
      ok = ok && rel <= kGammaRelTolerance && z <= kBandZ;
    }
    s.diagnostics["gamma_check"] = {{"entries", lent.size()}, {"max_relative_error", max_rel}, {"max_z", max_z},
                                    {"jet_vs_accumulator", max_jet}};
    s.verdicts["gamma_dual"] = verdict(ok, fmt::format("max relative error {:.3f}, max {:.2f} SE over {} entries",
                                                       max_rel, max_z, lent.size()));
  }

  if (!adjoint.rows.empty()) {
    const auto tri = adjoint.column("triple"), lhs = adjoint.column("lhs"), rhs = adjoint.column("rhs");
    const int ntri = static_cast<int>(max_of(tri)) + 1;
    bool ok = true;
    std::string detail;
    for (int k = 0; k < ntri; ++k) {
      std::vector<double> a, b;
      for (std::size_t r = 0; r < tri.size(); ++r)
        if (tri[r] == k) {
          a.push_back(lhs[r]);
          b.push_back(rhs[r]);
        }
      const lp::Estimate diff = lp::paired_difference(a, b);
      s.estimates[fmt::format("adjoint_lhs_{}", k)] = to_json(lp::mean_se(a));
      s.estimates[fmt::format("adjoint_rhs_{}", k)] = to_json(lp::mean_se(b));
      s.estimates[fmt::format("adjoint_difference_{}", k)] = to_json(diff);
      ok = ok && std::abs(diff.value) <= kBandZ * diff.se;
      detail += fmt::format("{}triple {}: {:.2f} SE", k ? ", " : "", k, diff.se > 0 ? std::abs(diff.value) / diff.se : 0.0);
    }
    s.verdicts["adjoint"] = verdict(ok, detail);
  }
  return s;
}

CommandOutput run_command(const Config& cfg, int workers) {
  const auto sc = lp::make_scenario(cfg.scenario);
  const auto& info = sc->info();
  const int d = sc->dim();
  const int order = std::max(1, info.jet_order);
  const int worder = order >= 2 ? (d == 1 && sc->has_order2_jets() ? 2 : 1) : 0;
  const bool bound = sc->name() == "simple2d";
  const std::uint64_t seed = cfg.run.seed;
  const std::size_t n = cfg.run.paths;
  const int width = std::max(1, sc->mark_dim());
  const lp::JetSystem js(*sc, order);
  const auto columns = path_columns(d, worder, bound);
  const auto cases = adjoint_cases(info.x0);
  const std::size_t adj_paths = worder >= 1 && cfg.run.adjoint_draws > 0 ? std::min(n, cfg.run.adjoint_paths) : 0;

  spdlog::info("run: scenario {}, {} paths, jet order {}, {} workers", sc->name(), n, order, workers);

  struct PathResult {
    std::vector<double> row;
    std::vector<std::array<double, 2>> adjoint;
  };
  const auto results = lp::parallel_map(n, workers, [&](std::size_t p) {
    PathResult out;
    const lp::MarkedPoissonPath path = lp::sample_path(sc->measure(), sc->horizon(), path_key(seed, p));
    const lp::Trajectory traj = js.solve(path);
    auto& r = out.row;
    r.reserve(columns.size());
    r.push_back(static_cast<double>(p));
    r.push_back(static_cast<double>(path.size()));
    const auto& x = traj.terminal();
    for (int i = 0; i < d; ++i) r.push_back(x[i]);
    const lp::SMat<double> gamma = traj.gamma_at(-1);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) r.push_back(gamma(i, j));
    r.push_back(lp::determinant(gamma));
    if (worder >= 1) {
      lp::PathWeights pw = lp::path_weights(*sc, traj, worder);
      for (int i = 0; i < d; ++i) r.push_back(pw.A[i]);
      for (int i = 0; i < d; ++i) r.push_back(pw.z1[i]);
      if (worder == 2) r.push_back(pw.z2);
      r.push_back(pw.rejected ? 1.0 : 0.0);
      if (p < adj_paths) {
        std::vector<lp::SVec<double>> grads;
        grads.reserve(static_cast<std::size_t>(cfg.run.adjoint_draws));
        for (int k = 0; k < cfg.run.adjoint_draws; ++k) {
          const auto enriched = lp::attach_rho_marks(path, 1, lp::RhoBasis::Gaussian, width, static_cast<std::uint32_t>(k));
          grads.push_back(lp::gradient_sample(traj, enriched, 0).value);
        }
        // the identity holds whether or not Gamma is invertible
        pw.rejected = false;
        for (const auto& c : cases) {
          const lp::AdjointTerms t = lp::adjoint_terms(c.triple, pw, grads);
          out.adjoint.push_back({t.lhs, t.rhs});
        }
      }
    }
    r.push_back(flow_defect(traj));
    if (bound) {
      const double b = lp::simple2d_indicator_bound(traj);
      r.push_back(b);
      r.push_back(lp::pathwise_lower_bound_margin(gamma, b));
    }
    return out;
  });

  Table paths;
  paths.columns = columns;
  paths.rows.reserve(n);
  Table adjoint;
  adjoint.columns = {"path", "triple", "lhs", "rhs"};
  for (std::size_t p = 0; p < n; ++p) {
    paths.rows.push_back(results[p].row);
    for (std::size_t k = 0; k < results[p].adjoint.size(); ++k)
      adjoint.add_row({static_cast<double>(p), static_cast<double>(k), results[p].adjoint[k][0], results[p].adjoint[k][1]});
  }

  // Gamma by the lent particle formula against the Monte Carlo second moment
  // of gradient samples, on the first paths with at least two jumps.
  Table gcheck;
  gcheck.columns = {"path", "i", "j", "lent", "mc", "mc_se", "jet"};
  int found = 0;
  for (std::size_t p = 0; found < cfg.run.grad_paths && p < n + 100000; ++p) {
    const lp::MarkedPoissonPath path = lp::sample_path(sc->measure(), sc->horizon(), path_key(seed, p));
    if (path.size() < 2) continue;
    ++found;
    lp::Trajectory traj = lp::solve(*sc, path);
    lp::accumulate_malliavin(traj);
    const lp::MalliavinMatrix mm = lp::malliavin_matrix(traj);
    const lp::SMat<double> jet = js.solve(path).gamma_at(-1);
    const auto samples = lp::parallel_map(static_cast<std::size_t>(cfg.run.rho_replicas), workers, [&](std::size_t r) {
      const auto enriched = lp::attach_rho_marks(path, 1, lp::RhoBasis::Gaussian, width, static_cast<std::uint32_t>(r));
      return lp::gradient_sample(traj, enriched, 0).value;
    });
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        std::vector<double> prod(samples.size());
        for (std::size_t r = 0; r < samples.size(); ++r) prod[r] = samples[r][i] * samples[r][j];
        const lp::Estimate e = lp::mean_se(prod);
        gcheck.add_row({static_cast<double>(p), static_cast<double>(i), static_cast<double>(j), mm.gamma(i, j), e.value,
                        e.se, jet(i, j)});
      }
  }
  if (found < cfg.run.grad_paths)
    spdlog::warn("only {} paths with two or more jumps were found for the Gamma check", found);

  json report = report_header("run", cfg);
  report["scenario"] = scenario_json(*sc, worder);
  report["settings"] = {{"paths", n},
                        {"density_points", cfg.run.density_points},
                        {"rho_replicas", cfg.run.rho_replicas},
                        {"grad_paths", cfg.run.grad_paths},
                        {"adjoint_draws", cfg.run.adjoint_draws},
                        {"adjoint_paths", adj_paths}};
  json triples = json::array();
  for (const auto& c : cases) triples.push_back(c.label);
  report["adjoint_triples"] = triples;
  if (sc->name() == "compound") report["oracle"] = {{"re_phi_1", compound_re_phi(*sc)}};
  const lp::HypothesisReport hyp = lp::hypothesis_report(*sc, cfg.run.probe_budget, seed);
  report["hypotheses"] = to_json(hyp);

  Summary s = summarize_run(report, paths, gcheck, adjoint);
  if (hyp.hard_failure()) s.warnings.push_back("a hard hypothesis check failed; see hypotheses");
  attach_summary(report, s);
  json files = {"paths.csv", "gamma_check.csv"};
  std::vector<std::pair<std::string, const Table*>> tables = {{"paths.csv", &paths}, {"gamma_check.csv", &gcheck}};
  if (!adjoint.rows.empty()) {
    tables.emplace_back("adjoint.csv", &adjoint);
    files.push_back("adjoint.csv");
  }
  for (const auto& [name, t] : s.derived) {
    tables.emplace_back(name, &t);
    files.push_back(name);
  }
  report["files"] = files;
  attach_meta(report, workers);
  write_run_dir(cfg, report, tables, s.plots);

  if (cfg.output.trajectory_dump && !cfg.output.dir.empty()) {
    const lp::MarkedPoissonPath path = lp::sample_path(sc->measure(), sc->horizon(), path_key(seed, 0));
    std::ofstream out(std::filesystem::path(cfg.output.dir) / "trajectory_0.csv");
    lp::write_trajectory_csv(out, js.solve(path));
  }
  return {report, hyp.hard_failure() ? 3 : 0};
}

CommandOutput validate_command(const Config& cfg) {
  const auto sc = lp::make_scenario(cfg.scenario);
  const lp::HypothesisReport hyp = lp::hypothesis_report(*sc, cfg.run.probe_budget, cfg.run.seed);
  json report = report_header("validate", cfg);
  report["scenario"] = scenario_json(*sc, 0);
  report["hypotheses"] = to_json(hyp);
  for (const auto& it : hyp.items)
    if (it.status == lp::CheckStatus::Fail) spdlog::warn("{} failed: {}", it.id, it.detail);
  attach_meta(report, 1);
  write_run_dir(cfg, report, {}, {});
  return {report, hyp.hard_failure() ? 3 : 0};
}

namespace {

Table load_table(const std::filesystem::path& dir, const std::string& name, bool required) {
  const auto file = dir / name;
  if (!std::filesystem::exists(file)) {
    if (required) lp::fail(lp::ErrorKind::Schema, fmt::format("{}: missing from the run directory", name));
    return {};
  }
  return Table::load(file);
}

}  // namespace

CommandOutput report_command(const std::filesystem::path& dir) {
  std::ifstream in(dir / "report.json");
  if (!in) lp::fail(lp::ErrorKind::Schema, "report.json: not found in " + dir.string());
  json stored;
  try {
    in >> stored;
  } catch (const json::parse_error& e) {
    lp::fail(lp::ErrorKind::Schema, std::string("report.json: ") + e.what());
  }
  const std::string command = stored.value("command", "");
  Summary s;
  if (command == "run") {
    s = summarize_run(stored, load_table(dir, "paths.csv", true), load_table(dir, "gamma_check.csv", true),
                      load_table(dir, "adjoint.csv", false));
    if (stored.contains("hypotheses") && stored["hypotheses"].value("hard_failure", false))
      s.warnings.push_back("a hard hypothesis check failed; see hypotheses");
  } else if (command == "tauber") {
    s = summarize_tauber(stored, load_table(dir, "laplace.csv", true), load_table(dir, "smallball_samples.csv", true));
  } else if (command == "crosscheck") {
    s = summarize_crosscheck(stored, load_table(dir, "crosscheck.csv", true));
  } else {
    lp::fail(lp::ErrorKind::Schema, "report.json: command '" + command + "' has no tables to re-derive");
  }
  json mismatches = json::array();
  for (const char* key : {"estimates", "diagnostics", "verdicts", "warnings"}) {
    const json recomputed = key == std::string("estimates")     ? s.estimates
                            : key == std::string("diagnostics") ? s.diagnostics
                            : key == std::string("verdicts")    ? s.verdicts
                                                                : s.warnings;
    if (!stored.contains(key) || stored[key].dump() != recomputed.dump()) mismatches.push_back(key);
  }
  for (const auto& [name, svg] : s.plots) write_text(dir / name, svg);
  json report;
  report["command"] = "report";
  report["source"] = command;
  report["directory"] = dir.string();
  report["consistent"] = mismatches.empty();
  report["mismatches"] = mismatches;
  json plots = json::array();
  for (const auto& p : s.plots) plots.push_back(p.first);
  report["plots"] = plots;
  return {report, mismatches.empty() ? 0 : 4};
}

}  // namespace lpapp
