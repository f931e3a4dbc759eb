#pragma once

// Flat-file outputs of a run: the trajectory CSV, a JSON run summary and a
// matplotlib script that plots the CSV.
//
// CSV columns, in this order:
//   t, a, a_dot, H, rho, P, phi, phi_dot, then one column per diagnostic.
// Quantities a model does not define are empty fields. Numbers use 17
// significant digits with '.' as decimal point; lines end in '\n'.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "frw/scenario.hpp"
#include "frw/trajectory.hpp"

namespace frw {

inline constexpr std::string_view kCsvFixedColumns = "t,a,a_dot,H,rho,P,phi,phi_dot";

/// Shortest text that formats `x` with 17 significant digits.
std::string format_number(double x);

void write_csv(std::ostream& out, const Trajectory& traj);
std::string to_csv(const Trajectory& traj);

enum class RunStatus {
  Completed,       // reached t_end
  Event,           // ended on a floor or ceiling event
  NumericFailure,  // divergence or step underflow
};

RunStatus run_status(const Trajectory& traj);
std::string_view to_string(RunStatus status);

/// Events, final state, max |diagnostic| per column, step counts, status, and
/// for flow runs the sigma calibration.
nlohmann::json run_summary(const Scenario& scenario, const RunResult& result);

/// Python script that reads `csv_name` (relative to the script) and plots a(t)
/// and every diagnostic column.
std::string plot_script(const std::string& csv_name, const Trajectory& traj);

struct OutputPaths {
  std::filesystem::path csv;
  std::filesystem::path summary;
  std::filesystem::path plot;
};

/// <out>, <out stem>.summary.json and <out stem>.plot.py next to it.
OutputPaths output_paths(const std::filesystem::path& csv_path);

/// Writes all three files; throws Error when a file cannot be written.
OutputPaths write_outputs(const std::filesystem::path& csv_path, const Scenario& scenario,
                          const RunResult& result);

}  // namespace frw
