#include "frw/friedmann.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "frw/errors.hpp"

namespace frw::friedmann {

namespace {
constexpr double kPi = std::numbers::pi;

double tolerance_scale(std::initializer_list<double> terms) {
  double s = 1.0;
  for (double t : terms) s = std::max(s, std::abs(t));
  return 1e-12 * s;
}
}  // namespace

DensityPressure fluid_density(double a, const FluidModel& fluid) {
  if (!(a > 0.0)) {
    throw DomainError("fluid density requires a > 0");
  }
  const double rho = fluid.rho0 * std::pow(a, -3.0 * (1.0 + fluid.w));
  return {rho, fluid.w * rho};
}

DensityPressure total_density(double a, const std::vector<FluidModel>& fluids) {
  DensityPressure total;
  for (const auto& f : fluids) {
    const auto dp = fluid_density(a, f);
    total.rho += dp.rho;
    total.pressure += dp.pressure;
  }
  return total;
}

double friedmann_h_squared(double a, double rho, SpatialCurvature kappa, double Lambda, double G) {
  if (!(a > 0.0)) {
    throw DomainError("Friedmann constraint requires a > 0");
  }
  return Lambda / 3.0 + (8.0 * kPi * G / 3.0) * rho - kappa.value() / (a * a);
}

Acceleration acceleration(double rho, double pressure, double Lambda, double G) {
  return {Lambda / 3.0 - (4.0 * kPi * G / 3.0) * (rho + 3.0 * pressure), rho + 3.0 * pressure < 0.0};
}

double reduced_planck_G() { return 1.0 / (8.0 * kPi); }

double initial_h_squared(const FriedmannProblem& p) {
  const auto& bg = p.background;
  const double rho = total_density(p.a0, bg.fluids).rho;
  const double h2 = friedmann_h_squared(p.a0, rho, bg.kappa, bg.Lambda, bg.G);
  if (h2 < 0.0) {
    throw InadmissibleStateError("initial data violates H^2 >= 0 (H^2 = " + std::to_string(h2) +
                                 ")");
  }
  return h2;
}

namespace {

void validate(const FriedmannProblem& p) {
  p.settings.validate();
  const auto& bg = p.background;
  if (!(bg.G > 0.0 && std::isfinite(bg.G))) {
    throw PreconditionError("Newton constant G must be positive");
  }
  if (!std::isfinite(bg.Lambda)) {
    throw PreconditionError("Lambda must be finite");
  }
  for (const auto& f : bg.fluids) {
    if (!(f.rho0 >= 0.0 && std::isfinite(f.rho0) && std::isfinite(f.w))) {
      throw PreconditionError("fluid requires finite w and rho0 >= 0");
    }
  }
  if (!(p.guard.eps_min > 0.0 && p.guard.eps_min < p.guard.a_max)) {
    throw PreconditionError("guard requires 0 < eps_min < a_max");
  }
  if (!(std::isfinite(p.a0) && p.a0 >= p.guard.eps_min && p.a0 <= p.guard.a_max)) {
    throw DomainError("initial scale factor must lie in [eps_min, a_max]");
  }
  if (p.expansion_sign != 1 && p.expansion_sign != -1) {
    throw PreconditionError("expansion sign must be +1 or -1");
  }
  if (!(std::isfinite(p.t_end) && p.t_end >= 0.0)) {
    throw PreconditionError("span end must be finite and >= 0");
  }
}

// Closed-form a(t) for the backgrounds that have one.
std::function<double(double)> closed_form(const FriedmannProblem& p, double H0) {
  const auto& bg = p.background;
  if (bg.kappa.value() != 0.0) return {};
  std::vector<FluidModel> active;
  for (const auto& f : bg.fluids) {
    if (f.rho0 > 0.0) active.push_back(f);
  }
  const double a0 = p.a0;
  if (active.empty() && bg.Lambda >= 0.0) {
    return [a0, H0](double t) { return a0 * std::exp(H0 * t); };
  }
  if (active.size() == 1 && bg.Lambda == 0.0 && active[0].w > -1.0) {
    const double q = 1.5 * (1.0 + active[0].w);
    return [a0, H0, q](double t) { return a0 * std::pow(1.0 + q * H0 * t, 1.0 / q); };
  }
  return {};
}

}  // namespace

Trajectory integrate_friedmann(const FriedmannProblem& p) {
  validate(p);
  const double h2 = initial_h_squared(p);
  const Background bg = p.background;
  const std::size_t nf = bg.fluids.size();
  const bool evolve = p.density == DensityMode::Evolve;
  const double H0 = p.expansion_sign * std::sqrt(h2);

  // Evolved densities are carried as ln rho_i so each component keeps its
  // relative accuracy while it falls many decades below the total. Components
  // with rho0 = 0 stay identically zero.
  ode::State y0 = {p.a0, p.a0 * H0};
  if (evolve) {
    for (const auto& f : bg.fluids) {
      y0.push_back(f.rho0 > 0.0 ? std::log(fluid_density(p.a0, f).rho) : 0.0);
    }
  }

  // rho_i for state y.
  auto densities = [bg, nf, evolve](std::span<const double> y, std::vector<double>& rho) {
    rho.resize(nf);
    for (std::size_t i = 0; i < nf; ++i) {
      const auto& f = bg.fluids[i];
      if (!evolve) {
        rho[i] = fluid_density(y[0], f).rho;
      } else {
        rho[i] = f.rho0 > 0.0 ? std::exp(y[2 + i]) : 0.0;
      }
    }
  };
  auto rhs = [bg, nf, evolve, densities](double, std::span<const double> y, std::span<double> dy) {
    thread_local std::vector<double> rho;
    densities(y, rho);
    double rho_tot = 0.0;
    double p_tot = 0.0;
    for (std::size_t i = 0; i < nf; ++i) {
      rho_tot += rho[i];
      p_tot += bg.fluids[i].w * rho[i];
    }
    const double a = y[0];
    const double a_dot = y[1];
    dy[0] = a_dot;
    dy[1] = a * acceleration(rho_tot, p_tot, bg.Lambda, bg.G).a_ddot_over_a;
    if (evolve) {
      const double H = a_dot / a;
      for (std::size_t i = 0; i < nf; ++i) {
        dy[2 + i] = bg.fluids[i].rho0 > 0.0 ? -3.0 * H * (1.0 + bg.fluids[i].w) : 0.0;
      }
    }
  };

  const flow::Guard guard = p.guard;
  const ode::EventSpec specs[] = {
      {ode::EventKind::SingularityFloor,
       [guard](double, std::span<const double> y) { return y[0] - guard.eps_min; },
       ode::Crossing::Falling, true},
      {ode::EventKind::Ceiling,
       [guard](double, std::span<const double> y) { return y[0] - guard.a_max; },
       ode::Crossing::Rising, true},
      {ode::EventKind::TurningPoint, [](double, std::span<const double> y) { return y[1]; },
       ode::Crossing::Any, false},
  };
  const ode::Solution sol = ode::integrate(rhs, y0, {0.0, p.t_end}, p.settings, specs, p.grid);

  Trajectory traj;
  traj.model = "friedmann";
  traj.accepted_steps = sol.accepted_steps;
  traj.rejected_steps = sol.rejected_steps;
  traj.max_consecutive_rejections = sol.max_consecutive_rejections;
  traj.events = sol.events;
  traj.terminal_event = sol.terminal;
  const auto exact = closed_form(p, H0);
  traj.diagnostic_names = {"constraint", "conservation"};
  if (exact) traj.diagnostic_names.emplace_back("a_exact");

  std::vector<double> rho;
  std::vector<double> dy(y0.size());
  for (std::size_t i = 0; i < sol.t.size(); ++i) {
    const auto& y = sol.y[i];
    rhs(sol.t[i], y, dy);
    densities(y, rho);
    Sample row;
    row.t = sol.t[i];
    row.a = y[0];
    row.a_dot = y[1];
    row.a_ddot = dy[1];
    double rho_tot = 0.0;
    double p_tot = 0.0;
    double conservation = 0.0;
    for (std::size_t f = 0; f < nf; ++f) {
      const auto& fluid = bg.fluids[f];
      rho_tot += rho[f];
      p_tot += fluid.w * rho[f];
      if (fluid.rho0 > 0.0) {
        const double invariant = rho[f] * std::pow(row.a, 3.0 * (1.0 + fluid.w));
        conservation = std::max(conservation, std::abs(invariant / fluid.rho0 - 1.0));
      }
    }
    row.rho = rho_tot;
    row.pressure = p_tot;
    const double H = row.hubble();
    const double predicted = friedmann_h_squared(row.a, rho_tot, bg.kappa, bg.Lambda, bg.G);
    row.diagnostics = {(H * H - predicted) / std::max(1.0, H * H), conservation};
    if (exact) row.diagnostics.push_back(exact(row.t));
    traj.samples.push_back(std::move(row));
  }
  return traj;
}

DeSitterPoint desitter_solution(double k, double omega, double t) {
  if (!(omega > 0.0)) {
    throw DomainError("de Sitter solution requires omega > 0");
  }
  DeSitterPoint out;
  if (k > 0.0) {
    const double s = std::sqrt(k);
    out.a = s / omega * std::cosh(omega * t);
    out.a_dot = s * std::sinh(omega * t);
    out.a_ddot = s * omega * std::cosh(omega * t);
  } else if (k == 0.0) {
    out.a = std::exp(omega * t);
    out.a_dot = omega * out.a;
    out.a_ddot = omega * omega * out.a;
  } else {
    const double s = std::sqrt(-k);
    out.a = s / omega * std::sinh(omega * t);
    out.a_dot = s * std::cosh(omega * t);
    out.a_ddot = s * omega * std::sinh(omega * t);
  }
  out.singular = out.a == 0.0;
  return out;
}

DeSitterResiduals desitter_residuals(double k, double omega, double t) {
  const DeSitterPoint pt = desitter_solution(k, omega, t);
  if (pt.singular) {
    throw DomainError("de Sitter residuals are undefined at a = 0");
  }
  const double Lambda = 3.0 * omega * omega;
  const double kinetic = (pt.a_dot * pt.a_dot + k) / (pt.a * pt.a);
  DeSitterResiduals r;
  r.constraint = 3.0 * kinetic - Lambda;
  r.acceleration = -2.0 * pt.a_ddot / pt.a - kinetic + Lambda;
  r.first_integral = pt.a_dot * pt.a_dot - omega * omega * pt.a * pt.a + k;
  return r;
}

std::string_view to_string(OmegaLabel label) {
  switch (label) {
    case OmegaLabel::Open: return "open";
    case OmegaLabel::Flat: return "flat";
    case OmegaLabel::Closed: return "closed";
  }
  return "unknown";
}

OmegaClassification classify_omega(double rho, double H, double a, SpatialCurvature kappa, double G) {
  if (H == 0.0) {
    throw DomainError("density parameter is undefined for H = 0 (static universe)");
  }
  if (!(a > 0.0)) {
    throw DomainError("classification requires a > 0");
  }
  OmegaClassification out;
  out.omega = 8.0 * kPi * G * rho / (3.0 * H * H);
  const double excess = out.omega - 1.0;
  if (std::abs(excess) <= kOmegaFlatBand) {
    out.label = OmegaLabel::Flat;
    out.kappa_sign = 0;
  } else if (excess < 0.0) {
    out.label = OmegaLabel::Open;
    out.kappa_sign = -1;
  } else {
    out.label = OmegaLabel::Closed;
    out.kappa_sign = 1;
  }
  out.identity_residual = std::abs(excess - kappa.value() / (H * H * a * a));
  return out;
}

double coupled_flow_rate(double rho, double pressure, double G) {
  return 8.0 * kPi * G * (pressure - rho);
}

CoupledChain coupled_chain(double a, double rho, double pressure, SpatialCurvature kappa, double G) {
  const double h2 = friedmann_h_squared(a, rho, kappa, 0.0, G);
  if (h2 < 0.0) {
    throw InadmissibleStateError("state is not Friedmann-consistent (H^2 < 0)");
  }
  const double acc = acceleration(rho, pressure, 0.0, G).a_ddot_over_a;
  CoupledChain out;
  out.flow_combination = 3.0 * acc + 6.0 * h2 + 6.0 * kappa.value() / (a * a);
  out.combined_residual = out.flow_combination - 12.0 * kPi * G * (rho - pressure);
  out.rate_from_flow = -2.0 * out.flow_combination / 3.0;
  out.rate_residual = out.rate_from_flow - coupled_flow_rate(rho, pressure, G);
  return out;
}

RepulsiveBound repulsive_bound(double a, SpatialCurvature kappa, double Lambda, double rho, double G) {
  if (!(a > 0.0)) {
    throw DomainError("repulsive bound requires a > 0");
  }
  const double matter = 8.0 * kPi * G * rho / 3.0;
  const double curv = kappa.value() / (a * a);
  if (matter + Lambda / 3.0 < curv - tolerance_scale({matter, Lambda, curv})) {
    throw InadmissibleStateError("state violates (8 pi G/3) rho + Lambda/3 >= k/a^2");
  }
  RepulsiveBound out;
  out.lhs = 2.0 * Lambda / 3.0 - matter;
  out.bound = Lambda - curv;
  out.predicate = out.bound > 0.0;
  const double tol = tolerance_scale({out.lhs, out.bound});
  out.upper_bound_holds = out.lhs <= out.bound + tol;
  out.published_direction_holds = out.lhs >= out.bound - tol;
  return out;
}

}  // namespace frw::friedmann
