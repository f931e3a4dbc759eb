#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kCli = FRW_CLI;
const std::string kData = FRW_TEST_DATA;

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult run(const std::string& args) {
  CliResult r;
  const std::string cmd = kCli + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("frw_cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, DeSitterTracksExponential) {
  const CliResult r = run("simulate --config " + kData + "/desitter.json --out " + path("ds.csv"));
  ASSERT_EQ(r.code, 0) << r.out;
  std::ifstream csv(path("ds.csv"));
  std::string line;
  std::getline(csv, line);
  std::size_t rows = 0;
  while (std::getline(csv, line)) {
    std::istringstream fields(line);
    std::string t, a;
    std::getline(fields, t, ',');
    std::getline(fields, a, ',');
    const double exact = std::exp(std::stod(t));  // Lambda = 3 gives omega = 1
    EXPECT_LE(std::abs(std::stod(a) - exact) / exact, 1e-6) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 101u);
  std::ifstream sum(path("ds.summary.json"));
  const json j = json::parse(sum);
  EXPECT_LE(j["max_abs_diagnostics"]["constraint"].get<double>(), 1e-8);
  EXPECT_TRUE(fs::exists(path("ds.plot.py")));
}

TEST_F(Cli, IntrinsicClosedRunEndsAtCrunch) {
  const CliResult r = run("simulate --config " + kData + "/intrinsic_k1.json --out " + path("k1.csv"));
  ASSERT_EQ(r.code, 0) << r.out;
  std::ifstream sum(path("k1.summary.json"));
  const json j = json::parse(sum);
  EXPECT_EQ(j["status"], "event");
  EXPECT_NEAR(j["terminal_event"]["t"].get<double>(), 0.25, 1e-6);
}

TEST_F(Cli, EmptySpanWritesOneRow) {
  const CliResult r = run("simulate --config " + kData + "/empty_span.json --out " + path("e.csv"));
  ASSERT_EQ(r.code, 0) << r.out;
  const std::string csv = slurp(path("e.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
}

TEST_F(Cli, IdenticalRunsGiveIdenticalFiles) {
  ASSERT_EQ(run("simulate --config " + kData + "/bd_inflaton.json --out " + path("a.csv")).code, 0);
  ASSERT_EQ(run("simulate --config " + kData + "/bd_inflaton.json --out " + path("b.csv")).code, 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
}

TEST_F(Cli, ValidationErrorsExitOne) {
  CliResult r = run("simulate --config " + kData + "/malformed.json --out " + path("m.csv"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("friedmann.fluids[0].w"), std::string::npos) << r.out;
  EXPECT_FALSE(fs::exists(path("m.csv")));

  r = run("simulate --config " + kData + "/inconsistent_bd.json --out " + path("bd.csv"));
  EXPECT_EQ(r.code, 1) << r.out;

  EXPECT_EQ(run("classify --rho 1 --H 0 --a 1 --kappa 0").code, 1);
  EXPECT_EQ(run("verify --suite nonsense").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
}

TEST_F(Cli, VerifyPasses) {
  const CliResult r = run("verify --suite all");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  EXPECT_EQ(run("verify --suite flow --tol-scale 1e-12").code, 3);
}

TEST_F(Cli, ClassifyPrintsLabel) {
  // rho = 3 H^2 / (8 pi) is critical.
  const double rho = 3.0 / (8.0 * std::acos(-1.0));
  const CliResult r = run("classify --rho " + std::to_string(rho) + " --H 1 --a 1 --kappa 0");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("label="), std::string::npos);
}

TEST_F(Cli, SweepWritesTable) {
  CliResult r = run("sweep --config " + kData + "/fluid_sweep.json --param friedmann.fluids.0.w --values 0,0.3333333333333333 --out " +
              path("w.csv"));
  ASSERT_EQ(r.code, 0) << r.out;
  const std::string csv = slurp(path("w.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_TRUE(fs::exists(path("w.plot.py")));

  r = run("sweep --config " + kData + "/fluid_sweep.json --param kappa --values \"\" --out " + path("e.csv"));
  EXPECT_EQ(r.code, 0) << r.out;

  r = run("sweep --config " + kData + "/fluid_sweep.json --param no.such --values 1 --out " + path("x.csv"));
  EXPECT_EQ(r.code, 1) << r.out;
}
