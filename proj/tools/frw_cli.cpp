// frw: command-line front end for the FRW / Ricci-flow laboratory.
//
// Exit codes: 0 success, 1 validation error, 2 numeric failure,
// 3 identity-suite failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#if __has_include("CLI11.hpp")
#include "CLI11.hpp"
#else
#include <CLI/CLI.hpp>
#endif
#include "frw/errors.hpp"
#include "frw/friedmann.hpp"
#include "frw/output.hpp"
#include "frw/scenario.hpp"
#include "frw/sweep.hpp"
#include "frw/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitIdentity = 3;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("frw");
  logger->set_pattern("[%l] %v");
  logger->set_level(spdlog::level::warn);
  if (const char* env = std::getenv("FRW_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only accept what was asked for.
    if (level != spdlog::level::off || std::string(env) == "off") {
      logger->set_level(level);
    } else {
      logger->warn("ignoring FRW_LOG='{}' (expected error, warn, info or debug)", env);
    }
  }
  spdlog::set_default_logger(logger);
}

int simulate(const std::string& config, const std::string& out) {
  const frw::Scenario scenario = frw::load_scenario(config);
  spdlog::info("loaded {} scenario from {}", scenario.model_name(), config);
  const frw::RunResult result = frw::run_scenario(scenario);
  const auto paths = frw::write_outputs(out, scenario, result);
  const auto& traj = result.trajectory;
  const auto status = frw::run_status(traj);

  spdlog::info("{} rows, {} accepted / {} rejected steps", traj.samples.size(), traj.accepted_steps,
               traj.rejected_steps);
  if (result.sigma_calibration && !result.sigma_calibration->published_consistent()) {
    spdlog::warn("published sigma sign is inconsistent with the direct flow equation; using {}",
                 static_cast<int>(result.sigma_calibration->calibrated));
  }
  std::string line = fmt::format("status={} rows={}", frw::to_string(status), traj.samples.size());
  if (traj.terminal_event) {
    line += fmt::format(" event={} t={}", frw::ode::to_string(traj.terminal_event->kind),
                        frw::format_number(traj.terminal_event->t));
  }
  std::cout << line << "\n"
            << "wrote " << paths.csv.string() << ", " << paths.summary.string() << ", "
            << paths.plot.string() << "\n";
  return status == frw::RunStatus::NumericFailure ? kExitNumeric : kExitOk;
}

int verify(const std::string& suite_name, double tol_scale) {
  const auto suite = frw::parse_suite(suite_name);
  if (!suite) throw frw::ValidationError("--suite", "unknown suite '" + suite_name + "'");
  const frw::VerifyReport report = frw::verify(*suite, tol_scale);
  std::cout << frw::format_report(report);
  return report.all_passed() ? kExitOk : kExitIdentity;
}

int sweep(const std::string& config, const std::string& param, const std::string& values_text,
          const std::string& out, std::size_t jobs) {
  const auto values = frw::parse_values(values_text);
  nlohmann::json base;
  {
    std::ifstream in(config);
    if (!in) throw frw::ValidationError("--config", "cannot open '" + config + "'");
    try {
      base = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw frw::ValidationError("<config>", e.what());
    }
  }
  const frw::SweepTable table = frw::run_sweep(base, param, values, jobs);
  const auto script = frw::write_sweep_outputs(out, table);
  std::size_t failed = 0;
  for (const auto& cell : table.cells) {
    if (cell.status == "invalid" || cell.status == "error" || cell.status == "numeric-failure") {
      spdlog::warn("{} = {}: {} {}", param, frw::format_number(cell.value), cell.status, cell.message);
      ++failed;
    }
  }
  std::cout << fmt::format("{} cells, {} failed\nwrote {}, {}\n", table.cells.size(), failed, out,
                           script.string());
  return kExitOk;
}

int classify(double rho, double H, double a, double kappa, double G) {
  const auto c = frw::friedmann::classify_omega(rho, H, a, frw::geometry::SpatialCurvature(kappa), G);
  std::cout << fmt::format("Omega={}\nlabel={}\nkappa_sign={}\nidentity_residual={}\n",
                           frw::format_number(c.omega), frw::friedmann::to_string(c.label),
                           c.kappa_sign, frw::format_number(c.identity_residual));
  const int given = (kappa > 0.0) - (kappa < 0.0);
  if (given != c.kappa_sign) {
    spdlog::warn("kappa = {} has sign {}, but Omega implies sign {}", kappa, given, c.kappa_sign);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"frw: FRW cosmology under Ricci flow, Friedmann, Brans-Dicke and Wheeler-DeWitt"};
  app.require_subcommand(1);
  app.footer(fmt::format(
      "Trajectory CSV columns: {},<diagnostics...>; undefined quantities are empty fields.\n"
      "Sweep CSV columns: {}.\n"
      "Exit codes: 0 success, 1 validation error, 2 numeric failure, 3 identity-suite failure.\n"
      "FRW_LOG=error|warn|info|debug sets the log level (stderr).",
      frw::kCsvFixedColumns, frw::kSweepColumns));

  std::string config, out;
  auto* sim = app.add_subcommand("simulate", "Run one scenario; writes CSV, summary JSON and plot script");
  sim->add_option("--config", config, "Scenario JSON")->required();
  sim->add_option("--out", out, "Trajectory CSV path")->required();

  std::string suite = "all";
  double tol_scale = 1.0;
  auto* ver = app.add_subcommand("verify", "Run identity suites and print PASS/FAIL/INFO lines");
  ver->add_option("--suite", suite, "geometry | flow | friedmann | bd | wdw | all")->required();
  ver->add_option("--tol-scale", tol_scale, "Multiply every tolerance by this factor")
      ->check(CLI::PositiveNumber);

  std::string param, values;
  std::size_t jobs = 1;
  auto* swp = app.add_subcommand("sweep", "Run one scenario per parameter value");
  swp->add_option("--config", config, "Base scenario JSON")->required();
  swp->add_option("--param", param, "Dotted path into the scenario, or c0 (= a0^2 a0')")->required();
  swp->add_option("--values", values, "v1,v2,... or start:stop:count")->required();
  swp->add_option("--out", out, "Table CSV path")->required();
  swp->add_option("--jobs", jobs, "Concurrent cells (0 = hardware threads)");

  double rho = 0.0, H = 0.0, a = 1.0, kappa = 0.0, G = 1.0;
  auto* cls = app.add_subcommand("classify", "Density parameter and curvature sign of a state");
  cls->add_option("--rho", rho, "Energy density")->required();
  cls->add_option("--H", H, "Hubble rate (nonzero)")->required();
  cls->add_option("--a", a, "Scale factor")->required();
  cls->add_option("--kappa", kappa, "Spatial curvature")->required();
  cls->add_option("--G", G, "Newton constant");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*sim) return simulate(config, out);
    if (*ver) return verify(suite, tol_scale);
    if (*swp) return sweep(config, param, values, out, jobs);
    if (*cls) return classify(rho, H, a, kappa, G);
  } catch (const frw::ValidationError& e) {
    spdlog::error("invalid input: {}", e.what());
    return kExitValidation;
  } catch (const frw::BudgetExceededError& e) {
    spdlog::error("numeric failure: {}", e.what());
    return kExitNumeric;
  } catch (const frw::DomainError& e) {
    spdlog::error("{}", e.what());
    return kExitValidation;
  } catch (const frw::PreconditionError& e) {
    spdlog::error("{}", e.what());
    return kExitValidation;
  } catch (const frw::InadmissibleStateError& e) {
    spdlog::error("{}", e.what());
    return kExitValidation;
  } catch (const frw::Error& e) {
    spdlog::error("{}", e.what());
    return kExitNumeric;
  }
  return kExitValidation;
}
