#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "table.hpp"

namespace {

using nlohmann::json;

lpapp::Config config(json j) { return lpapp::parse_config(j); }

std::string schema_message(const json& j) {
  try {
    lpapp::parse_config(j);
  } catch (const lp::Error& e) {
    EXPECT_EQ(e.kind(), lp::ErrorKind::Schema);
    return e.what();
  }
  ADD_FAILURE() << "accepted: " << j.dump();
  return {};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("lentparticle_app_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

TEST(Config, SchemaErrorsNameTheField) {
  EXPECT_NE(schema_message({{"scenario", {{"name", "compound"}}}}).find("run.seed"), std::string::npos);
  EXPECT_NE(schema_message({{"scenario", {{"name", "compound"}}}, {"run", {{"seed", 1}, {"pathz", 3}}}}).find("run.pathz"),
            std::string::npos);
  EXPECT_NE(schema_message({{"scenario", {{"name", "compound"}}}, {"run", {{"seed", -1}}}}).find("run.seed"),
            std::string::npos);
  EXPECT_NE(schema_message({{"scenario", {{"name", "nope"}}}, {"run", {{"seed", 1}}}}).find("scenario.name"),
            std::string::npos);
  EXPECT_NE(schema_message({{"scenario", {{"name", "compound"}, {"x0", {1, "a"}}}}, {"run", {{"seed", 1}}}})
                .find("scenario.x0[1]"),
            std::string::npos);
  EXPECT_NE(schema_message({{"scenario", {{"name", "compound"}}}, {"run", {{"seed", 1}}}, {"tauber", {{"psi", "y3"}}}})
                .find("tauber.psi"),
            std::string::npos);
}

TEST(Config, EpsilonOutsideRange) {
  const auto msg = schema_message({{"scenario", {{"name", "compound"}, {"params", {{"epsilon", 1.5}}}}}, {"run", {{"seed", 1}}}});
  EXPECT_NE(msg.find("scenario.params.epsilon"), std::string::npos);
  EXPECT_NE(msg.find("[0, 1)"), std::string::npos) << msg;
}

TEST(Config, HashIgnoresWorkersAndOutput) {
  const json a = {{"scenario", {{"name", "compound"}}}, {"run", {{"seed", 1}, {"workers", 2}}}, {"output", {{"dir", "x"}}}};
  const json b = {{"scenario", {{"name", "compound"}}}, {"run", {{"seed", 1}, {"workers", 8}}}};
  const json c = {{"scenario", {{"name", "compound"}}}, {"run", {{"seed", 2}}}};
  EXPECT_EQ(lpapp::config_hash(a), lpapp::config_hash(b));
  EXPECT_NE(lpapp::config_hash(a), lpapp::config_hash(c));
  EXPECT_FALSE(lpapp::canonical_config(a).contains("output"));
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(lpapp::exit_code(lp::ErrorKind::Schema), 2);
  EXPECT_EQ(lpapp::exit_code(lp::ErrorKind::Capability), 2);
  EXPECT_EQ(lpapp::exit_code(lp::ErrorKind::Hypothesis), 3);
  EXPECT_EQ(lpapp::exit_code(lp::ErrorKind::Numeric), 4);
}

TEST(Validate, CatalogDefaultsAreAccepted) {
  for (const auto& e : lp::catalog()) {
    const auto out = lpapp::validate_command(config({{"scenario", {{"name", e.name}}}, {"run", {{"seed", 1}}}}));
    EXPECT_EQ(out.exit_code, 0) << e.name;
    EXPECT_FALSE(out.report["hypotheses"]["hard_failure"].get<bool>()) << e.name;
  }
}

TEST(Validate, SingularJumpIsAHypothesisFailure) {
  const auto out = lpapp::validate_command(
      config({{"scenario", {{"name", "compound-linear"}, {"params", {{"beta", -1.0}}}}}, {"run", {{"seed", 1}}}}));
  EXPECT_EQ(out.exit_code, 3);
  bool named = false;
  for (const auto& it : out.report["hypotheses"]["items"])
    if (it["id"] == "1.d") named = it["status"] == "fail";
  EXPECT_TRUE(named);
}

TEST(Table, CsvRoundTripIsExact) {
  lpapp::Table t;
  t.columns = {"a", "b", "c"};
  t.add_row({0.1, 1.0 / 3.0, -2.5e-300});
  t.add_row({1e300, std::nextafter(1.0, 2.0), 0.0});
  std::stringstream ss;
  t.write_csv(ss);
  const auto r = lpapp::Table::read_csv(ss);
  EXPECT_EQ(r.columns, t.columns);
  EXPECT_EQ(r.rows, t.rows);
  EXPECT_EQ(r.column("b")[1], std::nextafter(1.0, 2.0));
  EXPECT_THROW(r.index("d"), std::exception);
}

TEST(Crosscheck, NeedsTheSubordinationScenario) {
  try {
    lpapp::crosscheck_command(config({{"scenario", {{"name", "compound"}}}, {"run", {{"seed", 1}}}}), 1);
    ADD_FAILURE();
  } catch (const lp::Error& e) {
    EXPECT_EQ(e.kind(), lp::ErrorKind::Capability);
    EXPECT_EQ(lpapp::exit_code(e.kind()), 2);
  }
}

TEST(Crosscheck, NoJumpsLeavesBothRoutesAtTheStart) {
  const auto out = lpapp::crosscheck_command(
      config({{"scenario", {{"name", "subordination-linear"}, {"x0", {0.5, -1.0}}, {"params", {{"truncation", 0.9999999}}}}},
              {"run", {{"seed", 3}}},
              {"crosscheck", {{"paths", 200}}}}),
      1);
  EXPECT_EQ(out.exit_code, 0);
  EXPECT_TRUE(out.report["verdicts"]["law_identity"]["pass"].get<bool>()) << out.report["verdicts"].dump();
  const auto& est = out.report["estimates"];
  for (const char* route : {"jump", "direct"}) {
    EXPECT_EQ(est[std::string(route) + "_mean_0"]["value"].get<double>(), 0.5);
    EXPECT_EQ(est[std::string(route) + "_mean_1"]["value"].get<double>(), -1.0);
    EXPECT_EQ(est[std::string(route) + "_mean_0"]["se"].get<double>(), 0.0);
  }
}

TEST(Run, ReportIsReproducibleAndConsistentWithItsTables) {
  const auto dir = scratch("run");
  json j = {{"scenario", {{"name", "compound"}}},
            {"run", {{"seed", 7}, {"paths", 2000}, {"rho_replicas", 200}, {"adjoint_paths", 200}, {"adjoint_draws", 10}}},
            {"output", {{"dir", dir.string()}}}};
  const auto a = lpapp::run_command(config(j), 1);
  j["output"]["dir"] = "";
  const auto b = lpapp::run_command(config(j), 8);
  EXPECT_EQ(a.exit_code, 0);
  EXPECT_EQ(lpapp::report_body(a.report).dump(), lpapp::report_body(b.report).dump());
  EXPECT_TRUE(std::filesystem::exists(dir / "paths.csv"));
  const auto rep = lpapp::report_command(dir);
  EXPECT_EQ(rep.exit_code, 0) << rep.report.dump();
  EXPECT_TRUE(rep.report["consistent"].get<bool>());
  EXPECT_FALSE(rep.report["plots"].empty());
  for (const auto& p : rep.report["plots"]) EXPECT_TRUE(std::filesystem::exists(dir / p.get<std::string>()));
  std::filesystem::remove_all(dir);
}

TEST(Report, MissingDirectoryContentsIsASchemaError) {
  const auto dir = scratch("empty");
  std::filesystem::create_directories(dir);
  try {
    lpapp::report_command(dir);
    ADD_FAILURE();
  } catch (const lp::Error& e) {
    EXPECT_EQ(e.kind(), lp::ErrorKind::Schema);
  }
  std::filesystem::remove_all(dir);
}

}  // namespace
