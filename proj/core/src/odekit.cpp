#include "frw/odekit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "frw/errors.hpp"

namespace frw::ode {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::SingularityFloor: return "singularity-floor";
    case EventKind::Ceiling: return "ceiling";
    case EventKind::TurningPoint: return "turning-point";
    case EventKind::Divergence: return "divergence";
    case EventKind::StepUnderflow: return "step-underflow";
  }
  return "unknown";
}

void IntegratorSettings::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(abs_tol) || !positive(rel_tol)) {
    throw PreconditionError("integrator tolerances must be positive and finite");
  }
  if (!positive(h_min) || !positive(h_init) || !positive(h_max)) {
    throw PreconditionError("integrator step sizes must be positive and finite");
  }
  if (!(h_min <= h_init && h_init <= h_max)) {
    throw PreconditionError("integrator steps must satisfy h_min <= h_init <= h_max");
  }
  if (max_steps == 0) {
    throw PreconditionError("integrator max_steps must be positive");
  }
}

std::vector<double> uniform_grid(Span span, std::size_t points) {
  std::vector<double> grid;
  if (points == 0) {
    return grid;
  }
  if (points == 1 || span.t1 == span.t0) {
    grid.push_back(span.t0);
    return grid;
  }
  grid.reserve(points);
  const double width = span.t1 - span.t0;
  const auto last = static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    grid.push_back(span.t0 + width * (static_cast<double>(i) / last));
  }
  grid.back() = span.t1;
  return grid;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// Difference between the 5th- and 4th-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension (Hairer, Norsett & Wanner).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;
constexpr double kFacMax = 5.0;
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - kBeta * 0.75;

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

class DormandPrince {
 public:
  DormandPrince(const VectorField& rhs, std::size_t n) : rhs_(rhs), n_(n) {
    for (auto& k : k_) {
      k.assign(n, 0.0);
    }
    tmp_.assign(n, 0.0);
    y_new_.assign(n, 0.0);
    for (auto& r : rcont_) {
      r.assign(n, 0.0);
    }
  }

  // k_[0] must hold f(t, y) on entry. Returns the scaled error norm, or a
  // non-finite value if any stage left the finite range.
  double attempt(double t, const State& y, double h, double abs_tol, double rel_tol) {
    stage(t + c2 * h, y, h, {a21});
    eval(t + c2 * h, 1);
    stage(t + c3 * h, y, h, {a31, a32});
    eval(t + c3 * h, 2);
    stage(t + c4 * h, y, h, {a41, a42, a43});
    eval(t + c4 * h, 3);
    stage(t + c5 * h, y, h, {a51, a52, a53, a54});
    eval(t + c5 * h, 4);
    stage(t + h, y, h, {a61, a62, a63, a64, a65});
    eval(t + h, 5);
    for (std::size_t i = 0; i < n_; ++i) {
      y_new_[i] = y[i] + h * (a71 * k_[0][i] + a73 * k_[2][i] + a74 * k_[3][i] +
                              a75 * k_[4][i] + a76 * k_[5][i]);
    }
    if (!all_finite(y_new_)) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    rhs_(t + h, y_new_, k_[6]);
    if (!all_finite(k_[6])) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double err = h * (e1 * k_[0][i] + e3 * k_[2][i] + e4 * k_[3][i] + e5 * k_[4][i] +
                              e6 * k_[5][i] + e7 * k_[6][i]);
      const double scale = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(y_new_[i]));
      sum += (err / scale) * (err / scale);
    }
    return std::sqrt(sum / static_cast<double>(n_));
  }

  void prepare_dense(const State& y, double h) {
    for (std::size_t i = 0; i < n_; ++i) {
      const double dy = y_new_[i] - y[i];
      const double bspl = h * k_[0][i] - dy;
      rcont_[0][i] = y[i];
      rcont_[1][i] = dy;
      rcont_[2][i] = bspl;
      rcont_[3][i] = dy - h * k_[6][i] - bspl;
      rcont_[4][i] = h * (d1 * k_[0][i] + d3 * k_[2][i] + d4 * k_[3][i] + d5 * k_[4][i] +
                          d6 * k_[5][i] + d7 * k_[6][i]);
    }
  }

  // Interpolated state at fraction theta of the last accepted step.
  void dense(double theta, State& out) const {
    out.resize(n_);
    const double theta1 = 1.0 - theta;
    for (std::size_t i = 0; i < n_; ++i) {
      out[i] = rcont_[0][i] +
               theta * (rcont_[1][i] +
                        theta1 * (rcont_[2][i] + theta * (rcont_[3][i] + theta1 * rcont_[4][i])));
    }
  }

  void first_same_as_last() { std::swap(k_[0], k_[6]); }

  std::vector<double>& k1() { return k_[0]; }
  const State& y_new() const { return y_new_; }

 private:
  void stage(double, const State& y, double h, std::initializer_list<double> coeffs) {
    for (std::size_t i = 0; i < n_; ++i) {
      double acc = 0.0;
      std::size_t j = 0;
      for (double c : coeffs) {
        acc += c * k_[j++][i];
      }
      tmp_[i] = y[i] + h * acc;
    }
  }
  void eval(double t, std::size_t slot) { rhs_(t, tmp_, k_[slot]); }

  const VectorField& rhs_;
  std::size_t n_;
  std::array<std::vector<double>, 7> k_;
  std::array<std::vector<double>, 5> rcont_;
  State tmp_;
  State y_new_;
};

bool crosses(double g_old, double g_new, Crossing direction) {
  const bool falling = g_old > 0.0 && g_new <= 0.0;
  const bool rising = g_old < 0.0 && g_new >= 0.0;
  switch (direction) {
    case Crossing::Falling: return falling;
    case Crossing::Rising: return rising;
    case Crossing::Any: return falling || rising;
  }
  return false;
}

struct Located {
  std::size_t index;
  double theta_lo;
  double theta_hi;
};

}  // namespace

Solution integrate(const VectorField& rhs, State y0, Span span,
                   const IntegratorSettings& settings, std::span<const EventSpec> events,
                   std::span<const double> grid) {
  settings.validate();
  if (!std::isfinite(span.t0) || !std::isfinite(span.t1) || span.t1 < span.t0) {
    throw PreconditionError("integration span must be finite with t1 >= t0");
  }
  if (y0.empty() || !all_finite(y0)) {
    throw PreconditionError("initial state must be non-empty and finite");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < span.t0 || grid[i] > span.t1 || (i > 0 && grid[i] < grid[i - 1])) {
      throw PreconditionError("output grid must be ascending and inside the span");
    }
  }

  const std::size_t n = y0.size();
  DormandPrince stepper(rhs, n);
  rhs(span.t0, y0, stepper.k1());
  if (!all_finite(stepper.k1())) {
    throw PreconditionError("vector field is not finite at the initial state");
  }

  Solution sol;
  const bool record_steps = grid.empty();
  std::size_t next_grid = 0;
  auto emit = [&](double t, const State& y) {
    sol.t.push_back(t);
    sol.y.push_back(y);
  };
  if (record_steps) {
    emit(span.t0, y0);
  } else {
    while (next_grid < grid.size() && grid[next_grid] <= span.t0) {
      emit(grid[next_grid++], y0);
    }
  }

  std::vector<double> g_old(events.size());
  for (std::size_t e = 0; e < events.size(); ++e) {
    g_old[e] = events[e].g(span.t0, y0);
  }

  double t = span.t0;
  State y = std::move(y0);
  double h = std::min({settings.h_init, settings.h_max, span.t1 - span.t0});
  double err_old = 1e-4;
  bool last_rejected = false;
  bool last_nonfinite = false;
  std::size_t consecutive_rejections = 0;
  State probe(n);

  auto finish_collapsed = [&]() {
    // Step size collapsed: the solution cannot be continued from (t, y).
    std::vector<double> f(n);
    rhs(t, y, f);
    std::optional<Event> best;
    if (all_finite(f)) {
      const double eta = settings.h_min;
      for (std::size_t i = 0; i < n; ++i) {
        probe[i] = y[i] + eta * f[i];
      }
      for (const auto& spec : events) {
        if (!spec.terminal) {
          continue;
        }
        const double g0 = spec.g(t, y);
        const double slope = (spec.g(t + eta, probe) - g0) / eta;
        if (!(std::isfinite(slope) && slope != 0.0)) {
          continue;
        }
        const double dt = -g0 / slope;
        const bool direction_ok = spec.crossing == Crossing::Any ||
                                  (spec.crossing == Crossing::Falling && slope < 0.0) ||
                                  (spec.crossing == Crossing::Rising && slope > 0.0);
        if (direction_ok && dt >= 0.0 && dt <= kEventBracket && (!best || t + dt < best->t)) {
          // Extrapolating the state across a singular crossing is meaningless,
          // so the event carries the last accepted state (at t_lo).
          best = Event{spec.kind, t + dt, t, t + dt, y};
        }
      }
    }
    if (!best) {
      const EventKind kind =
          (last_nonfinite || !all_finite(f)) ? EventKind::Divergence : EventKind::StepUnderflow;
      best = Event{kind, t, t, t, y};
    }
    sol.events.push_back(*best);
    sol.terminal = best;
    if (sol.t.empty() || t > sol.t.back()) {
      emit(t, y);
    }
  };

  std::size_t steps = 0;
  State dense_state(n);
  while (t < span.t1) {
    if (++steps > settings.max_steps) {
      throw BudgetExceededError("integration exceeded max_steps = " +
                                std::to_string(settings.max_steps) + " at t = " +
                                std::to_string(t));
    }
    h = std::min(h, span.t1 - t);
    const bool at_end = (span.t1 - t) <= h;
    if (h < settings.h_min && !at_end) {
      finish_collapsed();
      return sol;
    }
    if (t + h == t) {
      finish_collapsed();
      return sol;
    }

    const double err = stepper.attempt(t, y, h, settings.abs_tol, settings.rel_tol);
    if (!std::isfinite(err) || err > 1.0) {
      last_nonfinite = !std::isfinite(err);
      const double fac =
          last_nonfinite ? kFacMin : std::max(kFacMin, kSafety * std::pow(err, -0.2));
      ++sol.rejected_steps;
      ++consecutive_rejections;
      sol.max_consecutive_rejections =
          std::max(sol.max_consecutive_rejections, consecutive_rejections);
      last_rejected = true;
      const double h_next = h * std::min(1.0, fac);
      if (h_next < settings.h_min) {
        finish_collapsed();
        return sol;
      }
      h = h_next;
      continue;
    }

    // Accepted.
    ++sol.accepted_steps;
    consecutive_rejections = 0;
    last_nonfinite = false;
    const double t_new = (at_end && span.t1 - t <= h) ? span.t1 : t + h;
    stepper.prepare_dense(y, h);

    // Events inside (t, t_new].
    std::vector<Located> hits;
    std::vector<double> g_new(events.size());
    for (std::size_t e = 0; e < events.size(); ++e) {
      g_new[e] = events[e].g(t_new, stepper.y_new());
      if (!crosses(g_old[e], g_new[e], events[e].crossing)) {
        continue;
      }
      double lo = 0.0;
      double hi = 1.0;
      const double g_lo = g_old[e];
      for (int it = 0; it < 200 && (hi - lo) * h > 1e-3 * kEventBracket; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
          break;
        }
        stepper.dense(mid, dense_state);
        const double g_mid = events[e].g(t + mid * h, dense_state);
        if ((g_mid > 0.0) == (g_lo > 0.0) && g_mid != 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      hits.push_back({e, lo, hi});
    }
    std::sort(hits.begin(), hits.end(),
              [](const Located& a, const Located& b) { return a.theta_hi < b.theta_hi; });

    std::optional<Event> stop;
    for (const auto& hit : hits) {
      const double theta = 0.5 * (hit.theta_lo + hit.theta_hi);
      Event ev{events[hit.index].kind, t + theta * h, t + hit.theta_lo * h,
               t + hit.theta_hi * h, State(n)};
      stepper.dense(theta, ev.state);
      sol.events.push_back(ev);
      if (events[hit.index].terminal) {
        stop = std::move(ev);
        break;
      }
    }

    const double t_limit = stop ? stop->t : t_new;
    if (record_steps) {
      if (!stop) {
        emit(t_new, stepper.y_new());
      }
    } else {
      while (next_grid < grid.size() && grid[next_grid] <= t_limit) {
        const double tg = grid[next_grid++];
        if (tg == t_new) {
          emit(tg, stepper.y_new());
        } else {
          stepper.dense((tg - t) / h, dense_state);
          emit(tg, dense_state);
        }
      }
    }
    if (stop) {
      if (sol.t.empty() || stop->t > sol.t.back()) {
        emit(stop->t, stop->state);
      }
      sol.terminal = std::move(stop);
      return sol;
    }

    g_old = std::move(g_new);
    t = t_new;
    y = stepper.y_new();
    stepper.first_same_as_last();

    double fac = kSafety * std::pow(std::max(err, 1e-16), -kExpo) * std::pow(err_old, kBeta);
    fac = std::clamp(fac, kFacMin, kFacMax);
    if (last_rejected) {
      fac = std::min(fac, 1.0);
    }
    err_old = std::max(err, 1e-4);
    last_rejected = false;
    h = std::min(h * fac, settings.h_max);
  }

  // Grid points that coincide with t1 but were skipped by rounding.
  while (!record_steps && next_grid < grid.size()) {
    emit(grid[next_grid++], y);
  }
  return sol;
}

State rk4(const VectorField& rhs, State y0, Span span, std::size_t steps) {
  if (steps == 0) {
    throw PreconditionError("rk4 needs at least one step");
  }
  const std::size_t n = y0.size();
  State k1(n), k2(n), k3(n), k4(n), tmp(n);
  const double h = (span.t1 - span.t0) / static_cast<double>(steps);
  State y = std::move(y0);
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = span.t0 + static_cast<double>(s) * h;
    rhs(t, y, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    rhs(t + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    rhs(t + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    rhs(t + h, tmp, k4);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
  }
  return y;
}

}  // namespace frw::ode
