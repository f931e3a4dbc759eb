#include "frw/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "frw/errors.hpp"

namespace frw::flow {

std::string_view to_string(FormulationKind kind) {
  switch (kind) {
    case FormulationKind::Direct: return "direct";
    case FormulationKind::Hubble: return "hubble";
    case FormulationKind::Chi: return "chi";
    case FormulationKind::Intrinsic: return "intrinsic";
  }
  return "unknown";
}

double flow_rhs_direct(const ScaleState& s, SpatialCurvature kappa) {
  geometry::require_positive_scale(s);
  return -s.a * s.a * s.a_dot - 2.0 * s.a_dot * s.a_dot / s.a - 2.0 * kappa.value() / s.a;
}

double flow_rhs_hubble(double H, double a, SpatialCurvature kappa, Sigma sigma) {
  if (!(std::isfinite(a) && a > 0.0)) {
    throw DomainError("scale factor must be positive, got a = " + std::to_string(a));
  }
  return -3.0 * H * H - 2.0 * kappa.value() / (a * a) + value(sigma) * a * a * H;
}

double flow_equation_residual(const ScaleState& s, SpatialCurvature kappa) {
  if (!s.a_ddot) {
    throw PreconditionError("flow residual requires a_ddot");
  }
  const double h = s.a_dot / s.a;
  return 6.0 * s.a * s.a_dot +
         2.0 * (3.0 * *s.a_ddot / s.a + 6.0 * h * h + 6.0 * kappa.value() / (s.a * s.a));
}

SigmaCalibration calibrate_sigma() {
  constexpr std::size_t kSamples = 100;
  constexpr double kTolerance = 1e-12;
  std::mt19937_64 rng(0x5eedf10aULL);
  std::uniform_real_distribution<double> a_dist(0.5, 3.0);
  std::uniform_real_distribution<double> a_dot_dist(0.1, 2.0);
  std::uniform_real_distribution<double> k_dist(-1.0, 1.0);
  std::bernoulli_distribution flip(0.5);

  double worst_minus = 0.0;
  double worst_plus = 0.0;
  for (std::size_t i = 0; i < kSamples; ++i) {
    ScaleState s;
    s.a = a_dist(rng);
    s.a_dot = a_dot_dist(rng) * (flip(rng) ? -1.0 : 1.0);  // |a'| >= 0.1 keeps the signs apart
    const SpatialCurvature k(k_dist(rng));
    const double H = s.hubble();
    const double reference = flow_rhs_direct(s, k) / s.a - H * H;
    const double scale = std::max(1.0, std::abs(reference));
    worst_minus = std::max(worst_minus,
                           std::abs(flow_rhs_hubble(H, s.a, k, Sigma::Minus) - reference) / scale);
    worst_plus = std::max(worst_plus,
                          std::abs(flow_rhs_hubble(H, s.a, k, Sigma::Plus) - reference) / scale);
  }

  SigmaCalibration out;
  out.samples = kSamples;
  if (worst_minus <= kTolerance) {
    out.calibrated = Sigma::Minus;
  } else if (worst_plus <= kTolerance) {
    out.calibrated = Sigma::Plus;
  } else {
    throw InconsistencyError("no sign of the Hubble-form a^2 H term matches the direct flow");
  }
  const double worst_calibrated = out.calibrated == Sigma::Minus ? worst_minus : worst_plus;
  out.calibrated_residual = worst_calibrated;
  out.published_residual = kPublishedSigma == Sigma::Minus ? worst_minus : worst_plus;
  return out;
}

namespace {

Sigma calibrated_sigma() {
  static const Sigma sigma = calibrate_sigma().calibrated;
  return sigma;
}

double chi_row_residual(double a, double a_dot, double a_ddot, double kappa, Sigma sigma) {
  const double chi = a * a * a;
  const double chi_tau = a * a * a_dot;
  const double chi_tautau = (2.0 * a * a_dot * a_dot + a * a * a_ddot) / 3.0;
  const double drag = value(sigma) * (a * a / 3.0) * chi_tau;
  const double spring = (2.0 * kappa / (3.0 * a * a)) * chi;
  const double scale = std::max({1.0, std::abs(chi_tautau), std::abs(drag), std::abs(spring)});
  return (chi_tautau - drag + spring) / scale;
}

// Flow residual divided by max(1, largest term) so that rows near a
// singularity stay comparable with the rest.
double scaled_flow_residual(const ScaleState& s, SpatialCurvature kappa) {
  const double h = s.a_dot / s.a;
  const double scale = std::max({1.0, std::abs(6.0 * s.a * s.a_dot), std::abs(6.0 * *s.a_ddot / s.a),
                                 12.0 * h * h, std::abs(12.0 * kappa.value() / (s.a * s.a))});
  return flow_equation_residual(s, kappa) / scale;
}

// Integral over [lo, hi] of the quadratic interpolating (x_i, f_i).
double quadratic_integral(double x0, double x1, double x2, double f0, double f1, double f2,
                          double lo, double hi) {
  const double d1 = (f1 - f0) / (x1 - x0);
  const double d2 = ((f2 - f1) / (x2 - x1) - d1) / (x2 - x0);
  auto primitive = [&](double x) {
    const double u = x - x0;
    return f0 * u + d1 * u * u / 2.0 + d2 * (u * u * u / 3.0 - (x1 - x0) * u * u / 2.0);
  };
  return primitive(hi) - primitive(lo);
}

void validate(const FlowProblem& p) {
  p.settings.validate();
  if (!(p.guard.eps_min > 0.0 && p.guard.eps_min < p.guard.a_max)) {
    throw PreconditionError("flow guard requires 0 < eps_min < a_max");
  }
  if (!(std::isfinite(p.a0) && p.a0 >= p.guard.eps_min && p.a0 <= p.guard.a_max)) {
    throw DomainError("initial scale factor must lie in [eps_min, a_max]");
  }
  if (!std::isfinite(p.a_dot0)) {
    throw DomainError("initial a_dot must be finite");
  }
  if (!(std::isfinite(p.t_end) && p.t_end >= 0.0)) {
    throw PreconditionError("flow span end must be finite and >= 0");
  }
}

}  // namespace

double intrinsic_exact(double a0, SpatialCurvature kappa, double t) {
  const double sq = a0 * a0 - 4.0 * kappa.value() * t;
  return sq >= 0.0 ? std::sqrt(sq) : std::numeric_limits<double>::quiet_NaN();
}

Trajectory integrate_flow(const FlowProblem& p) {
  validate(p);
  const double k = p.kappa.value();
  const FormulationKind kind = p.formulation.kind;
  const Sigma sigma = p.formulation.sigma;
  const Guard guard = p.guard;

  // Chi runs on the tau = 3t clock.
  const double clock = kind == FormulationKind::Chi ? 3.0 : 1.0;

  ode::VectorField rhs;
  ode::State y0;
  std::function<double(std::span<const double>)> scale_of;
  switch (kind) {
    case FormulationKind::Direct:
      y0 = {p.a0, p.a_dot0};
      rhs = [k](double, std::span<const double> y, std::span<double> dy) {
        dy[0] = y[1];
        dy[1] = -y[0] * y[0] * y[1] - 2.0 * y[1] * y[1] / y[0] - 2.0 * k / y[0];
      };
      scale_of = [](std::span<const double> y) { return y[0]; };
      break;
    case FormulationKind::Hubble:
      y0 = {p.a0, p.a_dot0 / p.a0};
      rhs = [k, sigma](double, std::span<const double> y, std::span<double> dy) {
        const double a = y[0];
        const double H = y[1];
        dy[0] = a * H;
        dy[1] = -3.0 * H * H - 2.0 * k / (a * a) + value(sigma) * a * a * H;
      };
      scale_of = [](std::span<const double> y) { return y[0]; };
      break;
    case FormulationKind::Chi:
      y0 = {p.a0 * p.a0 * p.a0, p.a0 * p.a0 * p.a_dot0};
      rhs = [k, sigma](double, std::span<const double> y, std::span<double> dy) {
        const double a = std::cbrt(y[0]);
        dy[0] = y[1];
        dy[1] = value(sigma) * (a * a / 3.0) * y[1] - (2.0 * k / (3.0 * a * a)) * y[0];
      };
      scale_of = [](std::span<const double> y) { return std::cbrt(y[0]); };
      break;
    case FormulationKind::Intrinsic:
      y0 = {p.a0};
      rhs = [k](double, std::span<const double> y, std::span<double> dy) { dy[0] = -2.0 * k / y[0]; };
      scale_of = [](std::span<const double> y) { return y[0]; };
      break;
  }

  const ode::EventSpec event_specs[] = {
      {ode::EventKind::SingularityFloor,
       [scale_of, guard](double, std::span<const double> y) { return scale_of(y) - guard.eps_min; },
       ode::Crossing::Falling, true},
      {ode::EventKind::Ceiling,
       [scale_of, guard](double, std::span<const double> y) { return scale_of(y) - guard.a_max; },
       ode::Crossing::Rising, true},
  };

  std::vector<double> grid = p.grid;
  for (double& t : grid) t *= clock;
  ode::IntegratorSettings settings = p.settings;
  if (clock != 1.0) {
    settings.h_init *= clock;
    settings.h_max *= clock;
  }
  const ode::Solution sol =
      ode::integrate(rhs, y0, {0.0, clock * p.t_end}, settings, event_specs, grid);

  Trajectory traj;
  traj.model = "flow";
  traj.accepted_steps = sol.accepted_steps;
  traj.rejected_steps = sol.rejected_steps;
  traj.max_consecutive_rejections = sol.max_consecutive_rejections;
  const bool intrinsic = kind == FormulationKind::Intrinsic;
  traj.diagnostic_names = intrinsic ? std::vector<std::string>{"a_exact", "rel_err_exact"}
                                    : std::vector<std::string>{"flow_residual", "chi_residual"};
  const Sigma reference_sigma = calibrated_sigma();

  traj.samples.reserve(sol.t.size());
  std::vector<double> dy(y0.size());
  for (std::size_t i = 0; i < sol.t.size(); ++i) {
    const auto& y = sol.y[i];
    Sample row;
    row.t = sol.t[i] / clock;
    rhs(sol.t[i], y, dy);
    switch (kind) {
      case FormulationKind::Direct:
        row.a = y[0];
        row.a_dot = y[1];
        row.a_ddot = dy[1];
        break;
      case FormulationKind::Hubble:
        row.a = y[0];
        row.a_dot = y[0] * y[1];
        row.a_ddot = y[0] * (dy[1] + y[1] * y[1]);
        break;
      case FormulationKind::Chi: {
        const double a = std::cbrt(y[0]);
        row.a = a;
        row.a_dot = y[1] / (a * a);
        row.a_ddot = (3.0 * dy[1] - 2.0 * a * row.a_dot * row.a_dot) / (a * a);
        break;
      }
      case FormulationKind::Intrinsic:
        row.a = y[0];
        row.a_dot = dy[0];
        row.a_ddot = 2.0 * k * row.a_dot / (y[0] * y[0]);
        break;
    }
    if (intrinsic) {
      // Past the crunch by rounding (event rows) the exact value is clamped to 0.
      const double sq = p.a0 * p.a0 - 4.0 * k * row.t;
      const double exact = std::sqrt(std::max(sq, 0.0));
      row.diagnostics = {exact, std::abs(row.a - exact) / std::max(exact, row.a)};
    } else {
      ScaleState s{row.t, row.a, row.a_dot, row.a_ddot};
      row.diagnostics = {scaled_flow_residual(s, p.kappa),
                         chi_row_residual(row.a, row.a_dot, *row.a_ddot, k, reference_sigma)};
    }
    traj.samples.push_back(std::move(row));
  }

  auto rescale = [&](ode::Event ev) {
    ev.t /= clock;
    ev.t_lo /= clock;
    ev.t_hi /= clock;
    return ev;
  };
  for (const auto& ev : sol.events) traj.events.push_back(rescale(ev));
  if (sol.terminal) traj.terminal_event = rescale(*sol.terminal);
  return traj;
}

double chi_residual(const Trajectory& traj, SpatialCurvature kappa, Sigma sigma) {
  double worst = 0.0;
  for (const auto& row : traj.samples) {
    if (!row.a_ddot) {
      throw PreconditionError("chi residual requires a_ddot on every row");
    }
    worst = std::max(worst,
                     std::abs(chi_row_residual(row.a, row.a_dot, *row.a_ddot, kappa.value(), sigma)));
  }
  return worst;
}

IntegralIdentityReport integral_identity(const Trajectory& traj, SpatialCurvature kappa,
                                         Sigma sigma) {
  constexpr std::size_t kMinRows = 100;
  const auto& rows = traj.samples;
  if (rows.size() < kMinRows) {
    throw QuadratureError("integral identity needs at least 100 trajectory rows, got " +
                          std::to_string(rows.size()));
  }
  if (rows.front().t != 0.0) {
    throw PreconditionError("integral identity needs the trajectory to start at t = 0");
  }
  const double k = kappa.value();
  const std::size_t n = rows.size();

  // Cumulative integral in tau = 3t; each interval integrates the quadratic
  // through it and one neighbour (trapezoid where rows coincide).
  auto cumulative = [&](auto&& f) {
    std::vector<double> val(n), out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) val[i] = f(i);
    auto tau = [&](std::size_t i) { return 3.0 * rows[i].t; };
    for (std::size_t i = 1; i < n; ++i) {
      const double lo = tau(i - 1), hi = tau(i);
      double piece = 0.5 * (hi - lo) * (val[i - 1] + val[i]);
      if (hi > lo && n >= 3) {
        const std::size_t j = i + 1 < n ? i - 1 : i - 2;  // stencil j, j+1, j+2
        const double x0 = tau(j), x1 = tau(j + 1), x2 = tau(j + 2);
        if (x0 < x1 && x1 < x2) {
          piece = quadratic_integral(x0, x1, x2, val[j], val[j + 1], val[j + 2], lo, hi);
        }
      }
      out[i] = out[i - 1] + piece;
    }
    return out;
  };

  const double a0 = rows.front().a;
  IntegralIdentityReport rep;
  rep.c0 = a0 * a0 * rows.front().a_dot;

  const auto drag = cumulative([&](std::size_t i) { return rows[i].a * rows[i].a / 3.0; });
  std::vector<double> mu(n);
  for (std::size_t i = 0; i < n; ++i) mu[i] = std::exp(-value(sigma) * drag[i]);
  const auto source = cumulative([&](std::size_t i) { return mu[i] * rows[i].a; });
  std::vector<double> flux(n);
  for (std::size_t i = 0; i < n; ++i) flux[i] = (rep.c0 - (2.0 * k / 3.0) * source[i]) / mu[i];
  const auto volume = cumulative([&](std::size_t i) { return flux[i]; });

  // Published forms: exponent without the a^2/3 weight in the chi_tau
  // identity, coefficient 2 a^2 a_tau, and a + sign on the k integral.
  const auto linear = cumulative([&](std::size_t i) { return rows[i].a; });
  std::vector<double> published_rate(n);
  for (std::size_t i = 0; i < n; ++i) {
    published_rate[i] = std::exp(-drag[i]) * (rep.c0 + (2.0 * k / 3.0) * linear[i]);
  }
  const auto published_volume = cumulative([&](std::size_t i) { return published_rate[i]; });

  for (std::size_t i = 0; i < n; ++i) {
    const double a = rows[i].a;
    const double chi = a * a * a;
    const double chi_tau = a * a * rows[i].a_dot;
    const double tau = 3.0 * rows[i].t;
    rep.corrected_flux = std::max(rep.corrected_flux,
                                  std::abs(mu[i] * chi_tau - (rep.c0 - (2.0 * k / 3.0) * source[i])));
    rep.corrected_volume = std::max(rep.corrected_volume, std::abs(chi - (a0 * a0 * a0 + volume[i])));
    rep.published_chi_rate = std::max(
        rep.published_chi_rate, std::abs(chi_tau - std::exp(-tau) * (rep.c0 + (2.0 * k / 3.0) * linear[i])));
    rep.published_scale_rate = std::max(rep.published_scale_rate,
                                 std::abs(2.0 * a * a * rows[i].a_dot / 3.0 - published_rate[i]));
    rep.published_volume =
        std::max(rep.published_volume, std::abs(chi - (a0 * a0 * a0 + published_volume[i])));
  }
  return rep;
}

double integral_identity_residual(const Trajectory& traj, SpatialCurvature kappa, Sigma sigma) {
  return integral_identity(traj, kappa, sigma).corrected();
}

FlowDiagnostics flow_diagnostics(const Trajectory& traj, SpatialCurvature kappa, Sigma sigma) {
  FlowDiagnostics out;
  for (const auto& row : traj.samples) {
    const ScaleState s{row.t, row.a, row.a_dot, row.a_ddot};
    out.flow_residual = std::max(out.flow_residual, std::abs(scaled_flow_residual(s, kappa)));
  }
  out.chi_residual = chi_residual(traj, kappa, sigma);
  const IntegralIdentityReport rep = integral_identity(traj, kappa, sigma);
  out.integral_residual = rep.corrected();
  out.c0 = rep.c0;
  return out;
}

}  // namespace frw::flow
