#pragma once

// Shared explicit Runge-Kutta machinery: a fixed-step classical RK4 and an
// adaptive Dormand-Prince 5(4) pair with PI step control, 4th-order dense
// output and bisection-located events.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace frw::ode {

using State = std::vector<double>;

/// dy/dt = f(t, y). Writes the derivative into `dydt` (same size as `y`).
using VectorField =
    std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

enum class EventKind {
  SingularityFloor,
  Ceiling,
  TurningPoint,
  Divergence,
  StepUnderflow,
};

std::string_view to_string(EventKind kind);

enum class Crossing { Any, Falling, Rising };

/// Zero crossing of `g` along the solution. Terminal events stop the run.
struct EventSpec {
  EventKind kind = EventKind::SingularityFloor;
  std::function<double(double t, std::span<const double> y)> g;
  Crossing crossing = Crossing::Any;
  bool terminal = true;
};

struct Event {
  EventKind kind = EventKind::StepUnderflow;
  double t = 0.0;
  double t_lo = 0.0;  // bracket enclosing the crossing
  double t_hi = 0.0;
  State state;
};

struct IntegratorSettings {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  double h_init = 1e-3;
  double h_min = 1e-14;
  double h_max = 1.0;
  std::size_t max_steps = 1'000'000;

  /// Throws PreconditionError unless h_min <= h_init <= h_max and tolerances > 0.
  void validate() const;

  bool operator==(const IntegratorSettings&) const = default;
};

struct Span {
  double t0 = 0.0;
  double t1 = 0.0;
};

struct Solution {
  std::vector<double> t;
  std::vector<State> y;
  std::vector<Event> events;       // every event in time order, terminal included
  std::optional<Event> terminal;   // set when the run stopped before span.t1
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t max_consecutive_rejections = 0;
};

/// Event bracket width targeted by the locator.
inline constexpr double kEventBracket = 1e-10;

/// Adaptive integration over `span` (t1 >= t0).
///
/// With an empty `grid` every accepted step is recorded; otherwise the
/// solution is sampled on `grid` (ascending, inside the span) through the
/// dense interpolant. A terminal event truncates output and appends the
/// event state as the last sample.
///
/// Step-size collapse (h < h_min) ends the run with a typed event: if a
/// terminal event function is predicted to cross within kEventBracket by
/// linearisation, that event is reported at the predicted time; otherwise
/// Divergence (non-finite trial states) or StepUnderflow. Such events carry
/// the last accepted state (at t_lo), which is also the last sample.
/// Throws BudgetExceededError once
/// `max_steps` is exhausted.
Solution integrate(const VectorField& rhs, State y0, Span span,
                   const IntegratorSettings& settings,
                   std::span<const EventSpec> events = {},
                   std::span<const double> grid = {});

/// Classical fixed-step RK4; returns the state at span.t1.
State rk4(const VectorField& rhs, State y0, Span span, std::size_t steps);

/// `points` equally spaced samples including both endpoints (one sample if
/// the span is empty or points == 1).
std::vector<double> uniform_grid(Span span, std::size_t points);

}  // namespace frw::ode
