// tauber and crosscheck subcommands

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "lentparticle/catalog.hpp"
#include "lentparticle/diagnostics.hpp"
#include "lentparticle/parallel.hpp"
#include "report_util.hpp"
#include "svg.hpp"

namespace lpapp {

using nlohmann::json;
using namespace detail;

namespace {

constexpr double kAlphaTolerance = 0.05;
constexpr double kR1Tolerance = 0.05;
constexpr double kBetaTolerance = 0.15;
constexpr double kR2Tolerance = 0.20;
constexpr double kKsLevel = 0.01;
// small-ball samples use path indices from here on, away from run paths
constexpr std::uint64_t kSmallBallPathBase = 1ULL << 40;

double psi_power(const std::string& psi) { return psi == "y2" ? 2.0 : 1.0; }

lp::Estimate point(double v, std::size_t n) { return {v, 0.0, n}; }

json closed_form(const lp::LevyMeasureSpec& m, double k) {
  // integral of (exp(-lambda y^k) - 1) y^(-1-eps) dy ~ (scale / k) Gamma(-eps/k) lambda^(eps/k)
  const double alpha = m.epsilon / k;
  if (m.family != lp::MeasureFamily::PowerLaw || !(alpha > 0.0 && alpha < 1.0)) return nullptr;
  return {{"alpha", alpha}, {"r1", m.scale * std::tgamma(-alpha) / k}};
}

std::string laplace_plot(const Table& t, const lp::TauberianFit& fit, const std::string& psi, const std::string& sb) {
  ChartOptions o;
  o.title = "Laplace exponent";
  o.xlabel = "lambda";
  o.ylabel = "-L(lambda)";
  o.logx = o.logy = true;
  const auto lam = t.column("lambda");
  auto neg = [](std::vector<double> v) {
    for (double& x : v) x = -x;
    return v;
  };
  std::vector<Series> s = {{"psi = " + psi, lam, neg(t.column("L_psi")), "#1f77b4", false, true},
                           {"psi = " + sb, lam, neg(t.column("L_small_ball_psi")), "#2ca02c", false, true}};
  if (fit.ok) {
    std::vector<double> y(lam.size());
    for (std::size_t i = 0; i < lam.size(); ++i) y[i] = -fit.r1 * std::pow(lam[i], fit.alpha);
    s.push_back({"fitted power law", lam, y, "#d62728", true, false});
  }
  return line_chart(o, s);
}

std::string small_ball_plot(const Table& t) {
  ChartOptions o;
  o.title = "Small-ball probabilities";
  o.xlabel = "eps";
  o.ylabel = "-log P(V <= eps)";
  o.logx = o.logy = true;
  const auto e = t.column("eps");
  auto neg = [](std::vector<double> v) {
    for (double& x : v) x = -x;
    return v;
  };
  return line_chart(o, {{"empirical", e, neg(t.column("log_p")), "#1f77b4", false, true},
                        {"fit", e, neg(t.column("fitted")), "#d62728", true, false}});
}

std::string quantile_plot(const std::vector<double>& a, const std::vector<double>& b, int coord) {
  ChartOptions o;
  o.title = fmt::format("Terminal law, coordinate {}", coord);
  o.xlabel = "x";
  o.ylabel = "empirical CDF";
  auto ecdf = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::vector<double> x, y;
    const int m = 200;
    for (int k = 1; k < m; ++k) {
      const double q = static_cast<double>(k) / m;
      x.push_back(lp::quantile_sorted(v, q));
      y.push_back(q);
    }
    return std::make_pair(x, y);
  };
  const auto [xa, ya] = ecdf(a);
  const auto [xb, yb] = ecdf(b);
  return line_chart(o, {{"jump route", xa, ya, "#1f77b4", false, false}, {"direct route", xb, yb, "#d62728", true, false}});
}

}  // namespace

Summary summarize_tauber(const json& header, const Table& laplace, const Table& samples) {
  Summary s;
  const json& set = header.at("settings");
  const double t = set.at("small_ball_horizon").get<double>();
  const auto lam = laplace.column("lambda");
  const std::size_t pts = lam.size();

  const lp::TauberianFit fit = lp::tauberian_fit_values(lam, laplace.column("L_psi"), t);
  const lp::TauberianFit fit_sb = lp::tauberian_fit_values(lam, laplace.column("L_small_ball_psi"), t);
  s.estimates["alpha"] = to_json(point(fit.alpha, pts));
  s.estimates["r1"] = to_json(point(fit.r1, pts));
  s.estimates["small_ball_psi_alpha"] = to_json(point(fit_sb.alpha, pts));
  s.estimates["small_ball_psi_r1"] = to_json(point(fit_sb.r1, pts));
  s.estimates["predicted_beta"] = to_json(point(fit_sb.beta, pts));
  s.estimates["predicted_r2"] = to_json(point(fit_sb.r2, pts));
  s.diagnostics["laplace_fit"] = {{"regime", fit.regime}, {"r_squared", fit.r_squared}, {"residual", fit.r2_fit_residual}};
  s.diagnostics["small_ball_psi_laplace_fit"] = {{"regime", fit_sb.regime}, {"r_squared", fit_sb.r_squared}};

  const json& oracle = header.at("oracle");
  if (!oracle.at("psi").is_null() && fit.ok) {
    const double a = oracle["psi"]["alpha"].get<double>(), r1 = oracle["psi"]["r1"].get<double>();
    const double ea = std::abs(fit.alpha - a), er = std::abs(fit.r1 - r1) / std::abs(r1);
    s.verdicts["laplace_fit"] = verdict(ea <= kAlphaTolerance && er <= kR1Tolerance,
                                        fmt::format("alpha {:.4f} (closed form {:.4f}), r1 {:.4f} (closed form {:.4f}, {:.2f}%)",
                                                    fit.alpha, a, fit.r1, r1, 100.0 * er));
  }

  const auto v = samples.column("v_small_ball");
  const std::size_t n = v.size();
  // the sampled functional is a stable subordinator near zero
  constexpr double kPrefactor = 0.5;
  const lp::SmallBallFit sb = lp::small_ball_fit(v, {}, kPrefactor);
  // spread between the two half samples as a rough standard error
  const std::vector<double> h1(v.begin(), v.begin() + static_cast<long>(n / 2)), h2(v.begin() + static_cast<long>(n / 2), v.end());
  const lp::SmallBallFit a = lp::small_ball_fit(h1, {}, kPrefactor), b = lp::small_ball_fit(h2, {}, kPrefactor);
  s.estimates["beta"] = to_json(lp::Estimate{sb.beta, 0.5 * std::abs(a.beta - b.beta), n});
  s.estimates["r2"] = to_json(lp::Estimate{sb.r2, 0.5 * std::abs(a.r2 - b.r2), n});
  s.diagnostics["small_ball_fit"] = {{"regime", sb.regime}, {"r_squared", sb.r_squared}, {"monotone", sb.monotone},
                                     {"grid_points", sb.eps.size()}, {"intercept", sb.intercept}, {"prefactor", kPrefactor},
                                     {"se_method", "half-sample spread"}};
  for (const auto& w : sb.warnings) s.warnings.push_back("small-ball fit: " + w);
  if (!sb.monotone) s.warnings.push_back("small-ball fit: empirical CDF not monotone on the grid");

  if (!oracle.at("small_ball").is_null()) {
    const double beta = oracle["small_ball"]["beta"].get<double>(), r2 = oracle["small_ball"]["r2"].get<double>();
    const double eb = std::abs(sb.beta - beta), er = std::abs(sb.r2 - r2) / std::abs(r2);
    s.verdicts["small_ball_fit"] =
        verdict(sb.regime == "tauberian" && eb <= kBetaTolerance && er <= kR2Tolerance,
                fmt::format("beta {:.4f} (closed form {:.4f}), r2 {:.4f} (closed form {:.4f}, {:.1f}%)", sb.beta, beta, sb.r2,
                            r2, 100.0 * er));
  }
  if (fit_sb.ok) {
    const double eb = std::abs(sb.beta - fit_sb.beta) / fit_sb.beta, er = std::abs(sb.r2 - fit_sb.r2) / std::abs(fit_sb.r2);
    s.verdicts["small_ball_consistency"] =
        verdict(eb <= kR2Tolerance && er <= kR2Tolerance,
                fmt::format("Monte Carlo fit against the Laplace-exponent prediction: beta {:.1f}%, r2 {:.1f}%", 100.0 * eb,
                            100.0 * er));
  }

  const auto vp = samples.column("v_psi");
  json inv = json::object();
  for (int p = 1; p <= 4; ++p) inv[fmt::format("p{}", p)] = to_json(lp::inverse_moment(vp, p));
  s.diagnostics["inverse_moments_v_psi"] = inv;

  Table fitted;
  fitted.columns = {"eps", "log_p", "fitted", "count"};
  for (std::size_t i = 0; i < sb.eps.size(); ++i)
    fitted.add_row({sb.eps[i], sb.log_p[i], sb.fitted[i], static_cast<double>(sb.counts[i])});
  s.plots.emplace_back("laplace.svg", laplace_plot(laplace, fit, set.at("psi").get<std::string>(),
                                                   set.at("small_ball_psi").get<std::string>()));
  s.plots.emplace_back("smallball.svg", small_ball_plot(fitted));
  s.derived.emplace_back("smallball_fit.csv", std::move(fitted));
  return s;
}

CommandOutput tauber_command(const Config& cfg, int workers) {
  const auto sc = lp::make_scenario(cfg.scenario);
  const lp::LevyMeasureSpec& m = sc->measure();
  if (m.family != lp::MeasureFamily::PowerLaw)
    lp::fail(lp::ErrorKind::Capability, "tauber: needs a power-law jump measure");
  const auto& tb = cfg.tauber;
  const double kp = psi_power(tb.psi), ks = psi_power(tb.small_ball_psi);

  // the Laplace exponent sees the untruncated measure
  lp::LevyMeasureSpec full = m;
  full.truncation = 0.0;
  lp::LevyMeasureSpec cut = m;
  cut.truncation = tb.small_ball_truncation;
  cut.validate();

  spdlog::info("tauber: {} Laplace points, {} small-ball samples", tb.points, tb.small_ball_samples);
  const auto lambdas = lp::log_grid(tb.lambda_min, tb.lambda_max, tb.points);
  const auto values = lp::parallel_map(lambdas.size(), workers, [&](std::size_t i) {
    return std::array<double, 2>{lp::laplace_exponent(lambdas[i], [kp](double y) { return std::pow(y, kp); }, full),
                                 lp::laplace_exponent(lambdas[i], [ks](double y) { return std::pow(y, ks); }, full)};
  });
  Table laplace;
  laplace.columns = {"lambda", "L_psi", "L_small_ball_psi"};
  for (std::size_t i = 0; i < lambdas.size(); ++i) laplace.add_row({lambdas[i], values[i][0], values[i][1]});

  const auto draws = lp::parallel_map(tb.small_ball_samples, workers, [&](std::size_t i) {
    const auto marks = lp::sample_marks(cut, tb.small_ball_horizon, path_key(cfg.run.seed, kSmallBallPathBase + i));
    double vs = 0.0, vp = 0.0;
    for (double y : marks) {
      vs += ks == 1.0 ? y : y * y;
      vp += kp == 1.0 ? y : y * y;
    }
    return std::array<double, 2>{vs, vp};
  });
  Table samples;
  samples.columns = {"v_small_ball", "v_psi"};
  samples.rows.reserve(draws.size());
  for (const auto& d : draws) samples.rows.push_back({d[0], d[1]});

  json report = report_header("tauber", cfg);
  report["measure"] = lp::describe(full);
  report["settings"] = {{"psi", tb.psi},
                        {"small_ball_psi", tb.small_ball_psi},
                        {"small_ball_horizon", tb.small_ball_horizon},
                        {"small_ball_truncation", tb.small_ball_truncation},
                        {"lambda_min", tb.lambda_min},
                        {"lambda_max", tb.lambda_max},
                        {"points", tb.points}};
  json oracle = {{"psi", closed_form(full, kp)}, {"small_ball_psi", closed_form(full, ks)}, {"small_ball", nullptr}};
  if (!oracle["small_ball_psi"].is_null()) {
    const lp::SmallBallParams p = lp::small_ball_params(oracle["small_ball_psi"]["alpha"].get<double>(),
                                                        oracle["small_ball_psi"]["r1"].get<double>(), tb.small_ball_horizon);
    oracle["small_ball"] = {{"beta", p.beta}, {"r2", p.r2}};
  }
  report["oracle"] = oracle;

  Summary s = summarize_tauber(report, laplace, samples);
  attach_summary(report, s);
  std::vector<std::pair<std::string, const Table*>> tables = {{"laplace.csv", &laplace},
                                                              {"smallball_samples.csv", &samples}};
  json files = {"laplace.csv", "smallball_samples.csv"};
  for (const auto& [name, t] : s.derived) {
    tables.emplace_back(name, &t);
    files.push_back(name);
  }
  report["files"] = files;
  attach_meta(report, workers);
  write_run_dir(cfg, report, tables, s.plots);
  return {report, 0};
}

Summary summarize_crosscheck(const json& header, const Table& samples) {
  Summary s;
  const int d = header.at("scenario").at("dim").get<int>();
  bool ok = true;
  json ks = json::array();
  for (int k = 0; k < d; ++k) {
    const auto a = samples.column(fmt::format("jump_x_{}", k)), b = samples.column(fmt::format("direct_x_{}", k));
    const lp::KsResult full = lp::ks_two_sample(a, b);
    const std::size_t h = a.size() / 2;
    const lp::KsResult half = lp::ks_two_sample(std::vector<double>(a.begin(), a.begin() + static_cast<long>(h)),
                                                std::vector<double>(b.begin(), b.begin() + static_cast<long>(h)));
    ks.push_back({{"coordinate", k},
                  {"statistic", full.statistic},
                  {"p_value", full.p_value},
                  {"n", a.size()},
                  {"half_statistic", half.statistic},
                  {"half_p_value", half.p_value},
                  {"trend", full.statistic < half.statistic ? "decreasing" : "not decreasing"}});
    s.estimates[fmt::format("jump_mean_{}", k)] = to_json(lp::mean_se(a));
    s.estimates[fmt::format("direct_mean_{}", k)] = to_json(lp::mean_se(b));
    ok = ok && full.p_value > kKsLevel;
    if (k == 0) s.plots.emplace_back("crosscheck.svg", quantile_plot(a, b, 0));
  }
  s.diagnostics["ks"] = ks;
  std::string detail = "two-sample KS p-values";
  for (const auto& e : ks) detail += fmt::format(" {:.4f}", e["p_value"].get<double>());
  s.verdicts["law_identity"] = verdict(ok, detail);
  return s;
}

CommandOutput crosscheck_command(const Config& cfg, int workers) {
  if (cfg.scenario.name != "subordination-linear")
    lp::fail(lp::ErrorKind::Capability, "crosscheck: scenario must be subordination-linear, got '" + cfg.scenario.name + "'");
  const auto sc = lp::make_scenario(cfg.scenario);
  const int d = sc->dim();
  const std::size_t n = cfg.crosscheck.paths;
  spdlog::info("crosscheck: {} samples per route", n);
  // independent skeletons for the two routes: paths [0, n) and [n, 2n)
  const auto rows = lp::parallel_map(n, workers, [&](std::size_t i) {
    const auto pj = lp::sample_path(sc->measure(), sc->horizon(), path_key(cfg.run.seed, i));
    const auto pd = lp::sample_path(sc->measure(), sc->horizon(), path_key(cfg.run.seed, n + i));
    const lp::SVec<double> xj = lp::solve(*sc, pj).terminal();
    const lp::SVec<double> xd = lp::subordination_direct_sample(*sc, pd);
    std::vector<double> r = {static_cast<double>(i)};
    for (int k = 0; k < d; ++k) r.push_back(xj[k]);
    for (int k = 0; k < d; ++k) r.push_back(xd[k]);
    r.push_back(static_cast<double>(pj.size()));
    r.push_back(static_cast<double>(pd.size()));
    return r;
  });
  Table t;
  t.columns = {"index"};
  for (int k = 0; k < d; ++k) t.columns.push_back(fmt::format("jump_x_{}", k));
  for (int k = 0; k < d; ++k) t.columns.push_back(fmt::format("direct_x_{}", k));
  t.columns.push_back("jump_count");
  t.columns.push_back("direct_count");
  t.rows = rows;

  json report = report_header("crosscheck", cfg);
  report["scenario"] = {{"name", sc->name()}, {"dim", d}, {"horizon", sc->horizon()}, {"measure", lp::describe(sc->measure())}};
  Summary s = summarize_crosscheck(report, t);
  attach_summary(report, s);
  report["files"] = {"crosscheck.csv"};
  attach_meta(report, workers);
  write_run_dir(cfg, report, {{"crosscheck.csv", &t}}, s.plots);
  return {report, 0};
}

}  // namespace lpapp
