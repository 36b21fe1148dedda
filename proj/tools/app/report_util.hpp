#pragma once
// Helpers shared by the command implementations.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "lentparticle/diagnostics.hpp"
#include "lentparticle/stats.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "table.hpp"

namespace lpapp::detail {

nlohmann::json to_json(const lp::Estimate& e);
nlohmann::json verdict(bool pass, const std::string& detail);
nlohmann::json to_json(const lp::HypothesisReport& r);
nlohmann::json to_json(const lp::InverseMoment& m);

/// Common report skeleton: command, version, provenance and the canonical config.
nlohmann::json report_header(const std::string& command, const Config& cfg);
void attach_summary(nlohmann::json& report, const Summary& s);
void attach_meta(nlohmann::json& report, int workers);

/// Writes tables (when csv is on), report.json and any plots; no-op without an output dir.
void write_run_dir(const Config& cfg, const nlohmann::json& report,
                   const std::vector<std::pair<std::string, const Table*>>& tables,
                   const std::vector<std::pair<std::string, std::string>>& plots);

void write_text(const std::filesystem::path& file, const std::string& text);

lp::StreamKey path_key(std::uint64_t seed, std::uint64_t path);

}  // namespace lpapp::detail
