#pragma once

// Parameter sweeps: one scenario per value of a single addressable parameter.
//
// A parameter path is a dotted path into the scenario JSON, with array
// elements addressed by index ("kappa", "friedmann.Lambda",
// "friedmann.fluids.0.w", "flow.initial.a_dot"). The path "c0" is special: it
// sets the flow constant c0 = a0^2 a0' through flow.initial.a_dot.
//
// Table columns, in this order:
//   value, status, t_final, a_final, event, event_t, density_exponent, message
// status is completed | event | numeric-failure | invalid | error. event is
// the terminal event kind or "none". density_exponent is the slope of
// ln rho against ln a between the first and last rows, empty when rho is
// undefined or a did not change.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace frw {

/// Returns `config` with the parameter at `path` set to `value`. Throws
/// ValidationError when the path does not resolve (missing parent, index out
/// of range, non-numeric existing leaf) or "c0" is used on a non-flow scenario.
nlohmann::json set_parameter(nlohmann::json config, const std::string& path, double value);

/// Parses "v1,v2,..." or "start:stop:count" (count >= 1, endpoints included).
/// An empty string gives an empty list. Throws ValidationError("values", ...).
std::vector<double> parse_values(std::string_view text);

struct SweepCell {
  double value = 0.0;
  std::string status;
  std::optional<double> t_final;
  std::optional<double> a_final;
  std::string event = "none";
  std::optional<double> event_t;
  std::optional<double> density_exponent;
  std::string message;
};

struct SweepTable {
  std::string param;
  std::vector<SweepCell> cells;  // in the order of the requested values
};

/// Runs every cell on up to `jobs` threads (0 = hardware concurrency). Cell
/// failures are recorded in the table; only an unresolvable path throws.
SweepTable run_sweep(const nlohmann::json& base, const std::string& param,
                     const std::vector<double>& values, std::size_t jobs = 1);

inline constexpr std::string_view kSweepColumns =
    "value,status,t_final,a_final,event,event_t,density_exponent,message";

void write_sweep_csv(std::ostream& out, const SweepTable& table);
std::string sweep_to_csv(const SweepTable& table);

/// Python script plotting a_final and event_t against the swept value.
std::string sweep_plot_script(const std::string& csv_name, const SweepTable& table);

/// Writes <out> and <out stem>.plot.py; returns the script path.
std::filesystem::path write_sweep_outputs(const std::filesystem::path& csv_path,
                                          const SweepTable& table);

}  // namespace frw
