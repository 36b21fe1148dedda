#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>
#include <spdlog/sinks/stdout_color_sinks.h>

#include "commands.hpp"
#include "config.hpp"
#include "lentparticle/parallel.hpp"

namespace {

struct Options {
  std::string config;
  std::string dir;
  std::string out;
  int workers = 0;
  bool quiet = false;
};

int resolve_workers(const Options& o, const lpapp::Config& cfg) {
  if (o.workers > 0) return o.workers;
  if (cfg.run.workers > 0) return cfg.run.workers;
  return lp::default_workers();
}

int dispatch(const std::string& cmd, const Options& o) {
  lpapp::CommandOutput out;
  if (cmd == "report") {
    out = lpapp::report_command(o.dir);
  } else {
    lpapp::Config cfg = lpapp::load_config(o.config);
    if (!o.out.empty()) cfg.output.dir = o.out;
    const int workers = resolve_workers(o, cfg);
    if (cmd == "run") out = lpapp::run_command(cfg, workers);
    else if (cmd == "validate") out = lpapp::validate_command(cfg);
    else if (cmd == "tauber") out = lpapp::tauber_command(cfg, workers);
    else out = lpapp::crosscheck_command(cfg, workers);
  }
  std::cout << out.report.dump(2) << "\n";
  return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo experiments for Malliavin calculus on Poisson space"};
  app.set_version_flag("--version", lpapp::version());
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_flag("-q,--quiet", o.quiet, "only warnings and errors on stderr");

  auto add_config_cmd = [&](const char* name, const char* help, bool sim) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("config", o.config, "configuration file (JSON)")->required()->check(CLI::ExistingFile);
    if (sim) {
      sub->add_option("-o,--out", o.out, "output directory (overrides output.dir)");
      sub->add_option("-w,--workers", o.workers, std::string("worker threads (default: run.workers, then $") +
                                                     lp::kWorkersEnv + ", then the core count)")
          ->check(CLI::Range(1, 1024));
    }
    return sub;
  };
  add_config_cmd("run", "simulate, compute Gamma both ways, weights, density and diagnostics", true);
  add_config_cmd("validate", "schema and hypothesis checks only, no simulation", false)
      ->add_option("-o,--out", o.out, "output directory for report.json");
  add_config_cmd("tauber", "Laplace-exponent and small-ball fits", true);
  add_config_cmd("crosscheck", "subordination law identity by two routes", true);
  app.add_subcommand("report", "re-derive summaries and plots of a run directory from its CSV files")
      ->add_option("dir", o.dir, "run directory")
      ->required()
      ->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  auto logger = spdlog::stderr_color_mt("lentparticle");
  spdlog::set_default_logger(logger);
  spdlog::set_level(o.quiet ? spdlog::level::warn : spdlog::level::info);

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    return dispatch(cmd, o);
  } catch (const lp::Error& e) {
    spdlog::error("{} error: {}", lp::to_string(e.kind()), e.what());
    return lpapp::exit_code(e.kind());
  } catch (const std::exception& e) {
    spdlog::error("unexpected error: {}", e.what());
    return 1;
  }
}
