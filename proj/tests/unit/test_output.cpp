#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "frw/errors.hpp"
#include "frw/output.hpp"
#include "frw/scenario.hpp"

using namespace frw;
namespace fs = std::filesystem;

namespace {

const std::string kData = FRW_TEST_DATA;

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::size_t count(const std::string& s, char c) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), c)); }

}  // namespace

TEST(Format, SeventeenDigitsShortestForm) {
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(-2.5e-20), "-2.4999999999999999e-20"  /* printf %.17g */);
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Csv, HeaderColumnsAndEmptyFields) {
  const Scenario s = load_scenario(kData + "/intrinsic_k1.json");
  const auto r = run_scenario(s);
  const auto rows = lines(to_csv(r.trajectory));
  ASSERT_EQ(rows.size(), r.trajectory.samples.size() + 1);
  EXPECT_EQ(rows[0].rfind(std::string(kCsvFixedColumns), 0), 0u);
  const std::size_t commas = count(rows[0], ',');
  for (const auto& row : rows) EXPECT_EQ(count(row, ','), commas);
  // flow runs define no density, pressure or dilaton: rho,P,phi,phi_dot are empty
  EXPECT_NE(rows[1].find(",,,,"), std::string::npos);
  EXPECT_EQ(to_csv(r.trajectory).back(), '\n');
}

TEST(Csv, IdenticalConfigsGiveIdenticalBytes) {
  const Scenario s = load_scenario(kData + "/bd_inflaton.json");
  EXPECT_EQ(to_csv(run_scenario(s).trajectory), to_csv(run_scenario(s).trajectory));
}

TEST(Status, FromTerminalEvent) {
  EXPECT_EQ(run_status(run_scenario(load_scenario(kData + "/desitter.json")).trajectory), RunStatus::Completed);
  EXPECT_EQ(run_status(run_scenario(load_scenario(kData + "/intrinsic_k1.json")).trajectory), RunStatus::Event);
  EXPECT_EQ(to_string(RunStatus::NumericFailure), "numeric-failure");
}

TEST(Summary, CarriesEventsAndCalibration) {
  const Scenario s = load_scenario(kData + "/flow_direct.json");
  const auto j = run_summary(s, run_scenario(s));
  EXPECT_EQ(j["model"], "flow");
  EXPECT_EQ(j["status"], "completed");
  EXPECT_EQ(j["rows"], 101);
  EXPECT_EQ(j["sigma"], -1);
  EXPECT_FALSE(j["sigma_calibration"]["published_consistent"].get<bool>());
  EXPECT_TRUE(j["terminal_event"].is_null());

  const Scenario k1 = load_scenario(kData + "/intrinsic_k1.json");
  const auto e = run_summary(k1, run_scenario(k1));
  EXPECT_EQ(e["status"], "event");
  EXPECT_NEAR(e["terminal_event"]["t"].get<double>(), 0.25, 1e-6);
  EXPECT_FALSE(e.contains("sigma"));
}

TEST(Summary, EmptySpanHasOneRow) {
  const Scenario s = load_scenario(kData + "/empty_span.json");
  const auto r = run_scenario(s);
  ASSERT_EQ(r.trajectory.samples.size(), 1u);
  EXPECT_EQ(run_summary(s, r)["final_state"]["a"], 1.0);
}

TEST(Plot, ScriptReferencesCsvAndDiagnostics) {
  const auto r = run_scenario(load_scenario(kData + "/desitter.json"));
  const std::string script = plot_script("run.csv", r.trajectory);
  EXPECT_NE(script.find("run.csv"), std::string::npos);
  for (const auto& name : r.trajectory.diagnostic_names) EXPECT_NE(script.find(name), std::string::npos);
}

TEST(Paths, SiblingsOfCsv) {
  const auto p = output_paths("out/run.csv");
  EXPECT_EQ(p.csv, fs::path("out/run.csv"));
  EXPECT_EQ(p.summary, fs::path("out/run.summary.json"));
  EXPECT_EQ(p.plot, fs::path("out/run.plot.py"));
}

TEST(Paths, WriteAllThreeFiles) {
  const fs::path dir = fs::temp_directory_path() / "frw_test_output";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const Scenario s = load_scenario(kData + "/desitter.json");
  const auto r = run_scenario(s);
  const auto p = write_outputs(dir / "ds.csv", s, r);
  for (const auto& f : {p.csv, p.summary, p.plot}) EXPECT_TRUE(fs::exists(f)) << f;
  std::ifstream in(p.summary);
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["model"], "friedmann");
  EXPECT_THROW(write_outputs(dir / "missing" / "x.csv", s, r), Error);
  fs::remove_all(dir);
}
