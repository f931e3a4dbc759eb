#pragma once

// Identity suites behind `frw verify`. Each check compares a measured
// residual with a tolerance; informational lines carry values that are
// reported but not judged (sigma calibration, literal-reading residuals).

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace frw {

enum class Suite { Geometry, Flow, Friedmann, BransDicke, WheelerDeWitt, All };

/// Accepts geometry, flow, friedmann, bd, wdw, all.
std::optional<Suite> parse_suite(std::string_view name);
std::string_view to_string(Suite suite);

struct Check {
  std::string suite;
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;  // already multiplied by tol_scale; unused when informational
  bool passed = true;
  bool informational = false;
  std::string note;
};

struct VerifyReport {
  std::vector<Check> checks;

  bool all_passed() const;
  std::size_t failures() const;
};

/// Runs the suite(s). Tolerances are multiplied by `tol_scale` (> 0).
VerifyReport verify(Suite suite, double tol_scale = 1.0);

/// One line per check: "PASS|FAIL|INFO  suite  name  measured=...  tol=...  note".
std::string format_report(const VerifyReport& report);

}  // namespace frw
