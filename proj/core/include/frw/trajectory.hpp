#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "frw/odekit.hpp"

namespace frw {

/// One output row of a simulation. Quantities a model does not define stay empty.
struct Sample {
  double t = 0.0;
  double a = 1.0;
  double a_dot = 0.0;
  std::optional<double> a_ddot;
  std::optional<double> rho;
  std::optional<double> pressure;
  std::optional<double> phi;
  std::optional<double> phi_dot;
  std::vector<double> diagnostics;  // aligned with Trajectory::diagnostic_names

  double hubble() const { return a_dot / a; }
};

struct Trajectory {
  std::string model;
  std::vector<std::string> diagnostic_names;
  std::vector<Sample> samples;
  std::vector<ode::Event> events;
  std::optional<ode::Event> terminal_event;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t max_consecutive_rejections = 0;

  /// Column index of a diagnostic, or nullopt.
  std::optional<std::size_t> diagnostic_index(const std::string& name) const {
    for (std::size_t i = 0; i < diagnostic_names.size(); ++i) {
      if (diagnostic_names[i] == name) return i;
    }
    return std::nullopt;
  }

  /// Largest |value| of a diagnostic over all rows (0 for an empty trajectory).
  double max_abs_diagnostic(const std::string& name) const;
};

}  // namespace frw
