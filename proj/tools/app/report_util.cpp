#include "report_util.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include <fmt/format.h>

#include "lentparticle/error.hpp"

namespace lpapp::detail {

using nlohmann::json;

json to_json(const lp::Estimate& e) { return {{"value", e.value}, {"se", e.se}, {"n", e.n}}; }

json verdict(bool pass, const std::string& detail) { return {{"pass", pass}, {"detail", detail}}; }

json to_json(const lp::HypothesisReport& r) {
  json items = json::array();
  for (const auto& it : r.items)
    items.push_back({{"id", it.id},
                     {"description", it.description},
                     {"status", lp::to_string(it.status)},
                     {"hard", it.hard},
                     {"detail", it.detail}});
  return {{"scenario", r.scenario}, {"hard_failure", r.hard_failure()}, {"items", items}};
}

json to_json(const lp::InverseMoment& m) {
  json j = {{"estimate", to_json(m.estimate)}, {"half_sample", m.half_sample}, {"ratio", m.ratio},
            {"stable", m.stable},              {"zeros", m.zeros},             {"verdict", m.verdict}};
  return j;
}

json report_header(const std::string& command, const Config& cfg) {
  json r;
  r["command"] = command;
  r["version"] = version();
  r["provenance"] = {{"config_hash", cfg.hash}, {"seed", cfg.run.seed}, {"version", version()}};
  r["config"] = canonical_config(cfg.raw);
  return r;
}

void attach_summary(json& report, const Summary& s) {
  report["estimates"] = s.estimates;
  report["diagnostics"] = s.diagnostics;
  report["verdicts"] = s.verdicts;
  report["warnings"] = s.warnings;
}

void attach_meta(json& report, int workers) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  report["meta"] = {{"timestamp", buf}, {"workers", workers}};
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) lp::fail(lp::ErrorKind::Numeric, "cannot write " + file.string());
  out << text;
  if (!out) lp::fail(lp::ErrorKind::Numeric, "write failed for " + file.string());
}

void write_run_dir(const Config& cfg, const json& report, const std::vector<std::pair<std::string, const Table*>>& tables,
                   const std::vector<std::pair<std::string, std::string>>& plots) {
  if (cfg.output.dir.empty()) return;
  const std::filesystem::path dir(cfg.output.dir);
  std::filesystem::create_directories(dir);
  if (cfg.output.csv)
    for (const auto& [name, t] : tables) t->save(dir / name);
  if (cfg.output.svg)
    for (const auto& [name, svg] : plots) write_text(dir / name, svg);
  write_text(dir / "report.json", report.dump(2) + "\n");
}

lp::StreamKey path_key(std::uint64_t seed, std::uint64_t path) {
  return lp::StreamKey{seed, path, 0, lp::StreamTag::Skeleton, 0};
}

}  // namespace lpapp::detail
