#include "frw/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "frw/errors.hpp"
#include "frw/output.hpp"
#include "frw/scenario.hpp"

namespace frw {

using nlohmann::json;

namespace {

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = text.find(sep, start);
    parts.emplace_back(text.substr(start, end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return parts;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ValidationError("values", "not a finite number: '" + text + "'");
  }
  return v;
}

std::optional<std::size_t> parse_index(const std::string& text) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return v;
}

}  // namespace

json set_parameter(json config, const std::string& path, double value) {
  if (path == "c0") {
    if (!config.is_object() || config.value("model", std::string()) != "flow") {
      throw ValidationError(path, "c0 applies to flow scenarios only");
    }
    json& initial = config["flow"]["initial"];
    const double a0 = initial.contains("a") && initial["a"].is_number() ? initial["a"].get<double>()
                                                                        : FlowConfig{}.a0;
    if (!(a0 > 0.0)) throw ValidationError(path, "flow.initial.a must be positive");
    initial["a_dot"] = value / (a0 * a0);
    return config;
  }

  const auto segments = split(path, '.');
  json* node = &config;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const std::string& seg = segments[i];
    if (seg.empty()) throw ValidationError(path, "empty path segment");
    const bool leaf = i + 1 == segments.size();
    if (node->is_array()) {
      const auto index = parse_index(seg);
      if (!index || *index >= node->size()) {
        throw ValidationError(path, "'" + seg + "' is not an index of the array");
      }
      node = &(*node)[*index];
    } else if (node->is_object()) {
      if (!node->contains(seg) && !leaf) {
        throw ValidationError(path, "no key '" + seg + "'");
      }
      node = &(*node)[seg];
    } else {
      throw ValidationError(path, "'" + seg + "' addresses into a scalar");
    }
    if (leaf && !node->is_null() && !node->is_number()) {
      throw ValidationError(path, "parameter is not numeric");
    }
  }
  *node = value;
  return config;
}

std::vector<double> parse_values(std::string_view text) {
  const std::string body = trim(text);
  if (body.empty()) return {};
  if (body.find(':') != std::string::npos) {
    const auto parts = split(body, ':');
    if (parts.size() != 3) throw ValidationError("values", "range form is start:stop:count");
    const double start = parse_double(trim(parts[0]));
    const double stop = parse_double(trim(parts[1]));
    const auto count = parse_index(trim(parts[2]));
    if (!count || *count == 0) throw ValidationError("values", "range count must be >= 1");
    std::vector<double> out(*count);
    for (std::size_t i = 0; i < *count; ++i) {
      out[i] = *count == 1 ? start : start + (stop - start) * static_cast<double>(i) / (*count - 1);
    }
    return out;
  }
  std::vector<double> out;
  for (const auto& part : split(body, ',')) out.push_back(parse_double(trim(part)));
  return out;
}

namespace {

std::optional<double> density_exponent(const Trajectory& traj) {
  if (traj.samples.size() < 2) return std::nullopt;
  const Sample& first = traj.samples.front();
  const Sample& last = traj.samples.back();
  if (!first.rho || !last.rho || !(*first.rho > 0.0) || !(*last.rho > 0.0)) return std::nullopt;
  if (!(first.a > 0.0) || !(last.a > 0.0)) return std::nullopt;
  const double dlna = std::log(last.a / first.a);
  if (std::abs(dlna) < 1e-12) return std::nullopt;
  return std::log(*last.rho / *first.rho) / dlna;
}

SweepCell run_cell(const json& base, const std::string& param, double value) {
  SweepCell cell;
  cell.value = value;
  try {
    const Scenario s = scenario_from_json(set_parameter(base, param, value));
    const RunResult result = run_scenario(s);
    const Trajectory& traj = result.trajectory;
    cell.status = std::string(to_string(run_status(traj)));
    if (!traj.samples.empty()) {
      cell.t_final = traj.samples.back().t;
      cell.a_final = traj.samples.back().a;
    }
    if (traj.terminal_event) {
      cell.event = std::string(ode::to_string(traj.terminal_event->kind));
      cell.event_t = traj.terminal_event->t;
    }
    cell.density_exponent = density_exponent(traj);
  } catch (const ValidationError& e) {
    cell.status = "invalid";
    cell.message = e.what();
  } catch (const BudgetExceededError& e) {
    cell.status = "numeric-failure";
    cell.message = e.what();
  } catch (const Error& e) {
    cell.status = "error";
    cell.message = e.what();
  }
  return cell;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

void put(std::ostream& out, const std::optional<double>& v) {
  if (v) out << format_number(*v);
}

}  // namespace

SweepTable run_sweep(const json& base, const std::string& param, const std::vector<double>& values,
                     std::size_t jobs) {
  // Resolve the path once so a bad path fails the sweep instead of every cell.
  set_parameter(base, param, values.empty() ? 0.0 : values.front());

  SweepTable table;
  table.param = param;
  table.cells.resize(values.size());
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, values.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      table.cells[i] = run_cell(base, param, values[i]);
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  return table;
}

void write_sweep_csv(std::ostream& out, const SweepTable& table) {
  out << kSweepColumns << '\n';
  for (const auto& c : table.cells) {
    out << format_number(c.value) << ',' << c.status << ',';
    put(out, c.t_final);
    out << ',';
    put(out, c.a_final);
    out << ',' << c.event << ',';
    put(out, c.event_t);
    out << ',';
    put(out, c.density_exponent);
    out << ',' << csv_field(c.message) << '\n';
  }
}

std::string sweep_to_csv(const SweepTable& table) {
  std::ostringstream out;
  write_sweep_csv(out, table);
  return out.str();
}

std::string sweep_plot_script(const std::string& csv_name, const SweepTable& table) {
  return fmt::format(R"(#!/usr/bin/env python3
"""Plot the sweep table {csv} against {param}."""
import csv
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = pathlib.Path(__file__).resolve().parent
rows = list(csv.DictReader(open(here / "{csv}", newline="")))


def column(name):
    return [float(r[name]) if r[name] != "" else float("nan") for r in rows]


x = column("value")
fig, (top, bottom) = plt.subplots(2, 1, figsize=(7, 7), sharex=True)
top.semilogy(x, column("a_final"), "o-")
top.set_ylabel("a at end of run")
top.set_title("sweep over {param}")
bottom.plot(x, column("event_t"), "s")
for r, xv in zip(rows, x):
    if r["event"] != "none":
        bottom.annotate(r["event"], (xv, float(r["event_t"] or "nan")), fontsize=7)
bottom.set_xlabel("{param}")
bottom.set_ylabel("terminal event time")
fig.tight_layout()
out = here / "{stem}.png"
fig.savefig(out, dpi=120)
print(out)
)",
                     fmt::arg("csv", csv_name), fmt::arg("param", table.param),
                     fmt::arg("stem", std::filesystem::path(csv_name).stem().string()));
}

std::filesystem::path write_sweep_outputs(const std::filesystem::path& csv_path,
                                          const SweepTable& table) {
  const auto script = csv_path.parent_path() / (csv_path.stem().string() + ".plot.py");
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw Error("cannot write '" + csv_path.string() + "'");
    write_sweep_csv(out, table);
  }
  std::ofstream out(script, std::ios::binary);
  if (!out) throw Error("cannot write '" + script.string() + "'");
  out << sweep_plot_script(csv_path.filename().string(), table);
  return script;
}

}  // namespace frw
