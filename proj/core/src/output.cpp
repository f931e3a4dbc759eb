#include "frw/output.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "frw/errors.hpp"

namespace frw {

using nlohmann::json;

std::string format_number(double x) { return fmt::format("{:.17g}", x); }

namespace {

void put(std::ostream& out, const std::optional<double>& v) {
  if (v) out << format_number(*v);
}

// JSON has no NaN or infinity; such values are written as null.
json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json optional_number(const std::optional<double>& v) {
  return v ? number_or_null(*v) : json(nullptr);
}

json event_json(const ode::Event& e) {
  json j = {{"kind", std::string(ode::to_string(e.kind))},
            {"t", number_or_null(e.t)},
            {"t_lo", number_or_null(e.t_lo)},
            {"t_hi", number_or_null(e.t_hi)}};
  if (!e.state.empty()) j["a"] = number_or_null(e.state.front());
  return j;
}

}  // namespace

void write_csv(std::ostream& out, const Trajectory& traj) {
  out << kCsvFixedColumns;
  for (const auto& name : traj.diagnostic_names) out << ',' << name;
  out << '\n';
  for (const auto& row : traj.samples) {
    out << format_number(row.t) << ',' << format_number(row.a) << ','
        << format_number(row.a_dot) << ',' << format_number(row.hubble()) << ',';
    put(out, row.rho);
    out << ',';
    put(out, row.pressure);
    out << ',';
    put(out, row.phi);
    out << ',';
    put(out, row.phi_dot);
    for (double d : row.diagnostics) out << ',' << format_number(d);
    out << '\n';
  }
}

std::string to_csv(const Trajectory& traj) {
  std::ostringstream out;
  write_csv(out, traj);
  return out.str();
}

RunStatus run_status(const Trajectory& traj) {
  if (!traj.terminal_event) return RunStatus::Completed;
  switch (traj.terminal_event->kind) {
    case ode::EventKind::Divergence:
    case ode::EventKind::StepUnderflow:
      return RunStatus::NumericFailure;
    default:
      return RunStatus::Event;
  }
}

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Completed: return "completed";
    case RunStatus::Event: return "event";
    case RunStatus::NumericFailure: return "numeric-failure";
  }
  return "unknown";
}

json run_summary(const Scenario& scenario, const RunResult& result) {
  const Trajectory& traj = result.trajectory;
  json j;
  j["model"] = scenario.model_name();
  j["status"] = std::string(to_string(run_status(traj)));
  j["rows"] = traj.samples.size();
  j["accepted_steps"] = traj.accepted_steps;
  j["rejected_steps"] = traj.rejected_steps;

  j["events"] = json::array();
  for (const auto& e : traj.events) j["events"].push_back(event_json(e));
  j["terminal_event"] = traj.terminal_event ? event_json(*traj.terminal_event) : json(nullptr);

  if (!traj.samples.empty()) {
    const Sample& last = traj.samples.back();
    j["final_state"] = {{"t", number_or_null(last.t)},
                        {"a", number_or_null(last.a)},
                        {"a_dot", number_or_null(last.a_dot)},
                        {"H", number_or_null(last.hubble())},
                        {"rho", optional_number(last.rho)},
                        {"P", optional_number(last.pressure)},
                        {"phi", optional_number(last.phi)},
                        {"phi_dot", optional_number(last.phi_dot)}};
  } else {
    j["final_state"] = nullptr;
  }

  json maxima = json::object();
  for (const auto& name : traj.diagnostic_names) {
    maxima[name] = number_or_null(traj.max_abs_diagnostic(name));
  }
  j["max_abs_diagnostics"] = maxima;

  if (result.sigma_used) j["sigma"] = static_cast<int>(*result.sigma_used);
  if (result.sigma_calibration) {
    const auto& c = *result.sigma_calibration;
    j["sigma_calibration"] = {{"calibrated", static_cast<int>(c.calibrated)},
                              {"published", static_cast<int>(c.published)},
                              {"published_consistent", c.published_consistent()},
                              {"calibrated_residual", number_or_null(c.calibrated_residual)},
                              {"published_residual", number_or_null(c.published_residual)},
                              {"samples", c.samples}};
  }
  return j;
}

std::string plot_script(const std::string& csv_name, const Trajectory& traj) {
  std::string diag_list;
  for (const auto& name : traj.diagnostic_names) diag_list += fmt::format("\"{}\", ", name);
  return fmt::format(R"(#!/usr/bin/env python3
"""Plot a(t) and the diagnostic columns of {csv}."""
import csv
import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = pathlib.Path(__file__).resolve().parent
rows = list(csv.DictReader(open(here / "{csv}", newline="")))
if not rows:
    sys.exit("no rows in {csv}")


def column(name):
    return [float(r[name]) if r[name] != "" else float("nan") for r in rows]


t = column("t")
diagnostics = [{diags}]
fig, axes = plt.subplots(1 + (1 if diagnostics else 0), 1, figsize=(7, 7), squeeze=False)
axes[0][0].plot(t, column("a"), label="a")
axes[0][0].set_xlabel("t")
axes[0][0].set_ylabel("a")
axes[0][0].set_title("{model}")
if diagnostics:
    ax = axes[1][0]
    for name in diagnostics:
        values = [abs(v) if v == v else float("nan") for v in column(name)]
        ax.semilogy(t, [max(v, 1e-300) for v in values], label=name)
    ax.set_xlabel("t")
    ax.set_ylabel("|diagnostic|")
    ax.legend()
fig.tight_layout()
out = here / "{stem}.png"
fig.savefig(out, dpi=120)
print(out)
)",
                     fmt::arg("csv", csv_name), fmt::arg("diags", diag_list),
                     fmt::arg("model", traj.model),
                     fmt::arg("stem", std::filesystem::path(csv_name).stem().string()));
}

OutputPaths output_paths(const std::filesystem::path& csv_path) {
  auto sibling = [&](const std::string& suffix) {
    return csv_path.parent_path() / (csv_path.stem().string() + suffix);
  };
  return {csv_path, sibling(".summary.json"), sibling(".plot.py")};
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("failed while writing '" + path.string() + "'");
}

}  // namespace

OutputPaths write_outputs(const std::filesystem::path& csv_path, const Scenario& scenario,
                          const RunResult& result) {
  const OutputPaths paths = output_paths(csv_path);
  write_file(paths.csv, to_csv(result.trajectory));
  write_file(paths.summary, run_summary(scenario, result).dump(2) + "\n");
  write_file(paths.plot, plot_script(paths.csv.filename().string(), result.trajectory));
  return paths;
}

}  // namespace frw
