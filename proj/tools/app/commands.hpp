#pragma once
// The lentparticle subcommands. Each returns the JSON report; the summary
// part of every report is a pure function of the CSV tables it writes.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "config.hpp"
#include "lentparticle/error.hpp"
#include "lentparticle/rng.hpp"
#include "table.hpp"

namespace lpapp {

std::string version();

/// 0 ok, 2 schema (and other configuration problems), 3 hypothesis, 4 numeric
int exit_code(lp::ErrorKind kind);

struct CommandOutput {
  nlohmann::json report;
  int exit_code = 0;
};

CommandOutput run_command(const Config& cfg, int workers);
CommandOutput validate_command(const Config& cfg);
CommandOutput tauber_command(const Config& cfg, int workers);
CommandOutput crosscheck_command(const Config& cfg, int workers);
/// Re-derives the summary of a run directory from its CSV files, checks it
/// against report.json and regenerates the plots.
CommandOutput report_command(const std::filesystem::path& dir);

/// Report without the "meta" section (timestamp, worker count).
nlohmann::json report_body(const nlohmann::json& report);

// summaries shared by the commands and `report`
struct Summary {
  nlohmann::json estimates = nlohmann::json::object();
  nlohmann::json diagnostics = nlohmann::json::object();
  nlohmann::json verdicts = nlohmann::json::object();
  nlohmann::json warnings = nlohmann::json::array();
  std::vector<std::pair<std::string, Table>> derived;      // tables computed from the inputs
  std::vector<std::pair<std::string, std::string>> plots;  // file name -> SVG text
};

Summary summarize_run(const nlohmann::json& header, const Table& paths, const Table& gamma_check,
                      const Table& adjoint);
Summary summarize_tauber(const nlohmann::json& header, const Table& laplace, const Table& samples);
Summary summarize_crosscheck(const nlohmann::json& header, const Table& samples);

}  // namespace lpapp
