#include "frw/bransdicke.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "frw/errors.hpp"

namespace frw::bd {

namespace {
constexpr double kPi = std::numbers::pi;
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double Polynomial::derivative(double x) const {
  double acc = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 1;) acc = acc * x + static_cast<double>(k) * coeffs[k];
  return acc;
}

void BDParams::validate() const {
  if (!std::isfinite(coupling) || 2.0 * coupling + 3.0 == 0.0) {
    throw PreconditionError("Brans-Dicke coupling must be finite with 2w + 3 != 0");
  }
}

MatterState matter_state(const BDState& s, const BDParams& params) {
  if (const auto* fluid = std::get_if<FluidMatter>(&params.matter)) {
    return {s.rho, fluid->w * s.rho};
  }
  const auto& inflaton = std::get<InflatonMatter>(params.matter);
  if (!s.field) {
    throw PreconditionError("inflaton matter requires the psi field in the state");
  }
  const double kinetic = 0.5 * s.field->psi_dot * s.field->psi_dot;
  const double potential = inflaton.U(s.field->psi);
  return {kinetic + potential, kinetic - potential};
}

double box_phi_kinematic(double phi_ddot, double H, double phi_dot) {
  return -(phi_ddot + 3.0 * H * phi_dot);
}

double box_phi_dynamic(const BDState& s, const BDParams& params) {
  params.validate();
  const MatterState m = matter_state(s, params);
  const double trace = 3.0 * m.pressure - m.rho;
  return (8.0 * kPi * trace + s.phi * params.V.derivative(s.phi) - 2.0 * params.V(s.phi)) /
         (2.0 * params.coupling + 3.0);
}

namespace {

void require_state(const BDState& s) {
  if (!(s.a > 0.0)) throw DomainError("Brans-Dicke state requires a > 0");
  if (!(s.phi > 0.0)) throw DomainError("Brans-Dicke state requires phi > 0");
}

double h_dot_with(const BDState& s, const BDParams& params, SpatialCurvature kappa,
                  double potential_denominator) {
  const double w = params.coupling;
  const MatterState m = matter_state(s, params);
  const double ratio = s.phi_dot / s.phi;
  const double V = params.V(s.phi);
  const double Vp = params.V.derivative(s.phi);
  return -8.0 * kPi / ((2.0 * w + 3.0) * s.phi) * ((w + 2.0) * m.rho + w * m.pressure) -
         0.5 * w * ratio * ratio + 2.0 * s.H * ratio + kappa.value() / (s.a * s.a) +
         (s.phi * Vp - 2.0 * V) / potential_denominator;
}

}  // namespace

BDRates bd_rhs(const BDState& s, const BDParams& params, SpatialCurvature kappa) {
  params.validate();
  require_state(s);
  const double w = params.coupling;
  const MatterState m = matter_state(s, params);
  const double V = params.V(s.phi);
  const double Vp = params.V.derivative(s.phi);

  BDRates r;
  r.a_dot = s.a * s.H;
  r.H_dot = h_dot_with(s, params, kappa, 2.0 * (2.0 * w + 3.0) * s.phi);
  r.phi_dot = s.phi_dot;
  r.phi_ddot = -3.0 * s.H * s.phi_dot +
               (8.0 * kPi * (m.rho - 3.0 * m.pressure) - s.phi * Vp + 2.0 * V) / (2.0 * w + 3.0);
  r.rho_dot = -3.0 * s.H * (m.rho + m.pressure);
  if (const auto* inflaton = std::get_if<InflatonMatter>(&params.matter)) {
    r.psi_dot = s.field->psi_dot;
    r.psi_ddot = -3.0 * s.H * s.field->psi_dot - inflaton->U.derivative(s.field->psi);
  }
  return r;
}

double h_dot_published_denominator(const BDState& s, const BDParams& params,
                                   SpatialCurvature kappa) {
  params.validate();
  require_state(s);
  return h_dot_with(s, params, kappa, 2.0 * (2.0 + 3.0) * s.phi);
}

double bd_constraint_residual(const BDState& s, const BDParams& params, SpatialCurvature kappa) {
  const MatterState m = matter_state(s, params);
  const double ratio = s.phi_dot / s.phi;
  const double rhs = 8.0 * kPi / (3.0 * s.phi) * m.rho + params.coupling / 6.0 * ratio * ratio -
                     s.H * ratio - kappa.value() / (s.a * s.a) + params.V(s.phi) / (6.0 * s.phi);
  return s.H * s.H - rhs;
}

BDRicci bd_ricci_scalar(const BDState& s, const BDParams& params, SpatialCurvature kappa) {
  const BDRates r = bd_rhs(s, params, kappa);
  const MatterState m = matter_state(s, params);
  const double trace = 3.0 * m.pressure - m.rho;
  const double grad2 = -s.phi_dot * s.phi_dot;  // grad^c phi grad_c phi for phi(t)
  const double box = box_phi_dynamic(s, params);
  BDRicci out;
  out.from_matter = -8.0 * kPi * trace / s.phi + params.coupling * grad2 / (s.phi * s.phi) +
                    3.0 * box / s.phi + 2.0 * params.V(s.phi) / s.phi;
  out.from_geometry = 6.0 * (r.H_dot + 2.0 * s.H * s.H + kappa.value() / (s.a * s.a));
  out.difference = out.from_matter - out.from_geometry;
  return out;
}

std::string_view to_string(Completion c) {
  switch (c) {
    case Completion::Rho: return "rho";
    case Completion::Hubble: return "H";
    case Completion::PsiDot: return "psi_dot";
  }
  return "unknown";
}

BDState complete_initial_data(BDState s, const BDParams& params, SpatialCurvature kappa,
                              Completion unknown) {
  params.validate();
  require_state(s);
  const double w = params.coupling;
  const double ratio = s.phi_dot / s.phi;
  const double curv = kappa.value() / (s.a * s.a);
  const double potential = params.V(s.phi) / (6.0 * s.phi);
  const bool inflaton = params.is_inflaton();
  if (inflaton && !s.field) {
    throw PreconditionError("inflaton matter requires initial psi and psi_dot");
  }

  // Density demanded by the constraint at the current H.
  auto demanded_rho = [&] {
    return 3.0 * s.phi / (8.0 * kPi) * (s.H * s.H - w / 6.0 * ratio * ratio + s.H * ratio + curv - potential);
  };

  switch (unknown) {
    case Completion::Rho: {
      if (inflaton) {
        throw PreconditionError("inflaton density is fixed by the field; complete H or psi_dot");
      }
      const double rho = demanded_rho();
      if (rho < 0.0) {
        throw InadmissibleStateError("constraint requires negative density (rho = " +
                                     std::to_string(rho) + ")");
      }
      s.rho = rho;
      break;
    }
    case Completion::Hubble: {
      const double rho = matter_state(s, params).rho;
      const double c = 8.0 * kPi / (3.0 * s.phi) * rho + w / 6.0 * ratio * ratio - curv + potential;
      const double disc = ratio * ratio + 4.0 * c;
      if (disc < 0.0) {
        throw InadmissibleStateError("constraint has no real Hubble rate for this data");
      }
      const double root = std::sqrt(disc);
      s.H = s.H >= 0.0 ? 0.5 * (-ratio + root) : 0.5 * (-ratio - root);
      break;
    }
    case Completion::PsiDot: {
      if (!inflaton) {
        throw PreconditionError("psi_dot completion needs inflaton matter");
      }
      const auto& U = std::get<InflatonMatter>(params.matter).U;
      const double kinetic2 = 2.0 * (demanded_rho() - U(s.field->psi));
      if (kinetic2 < 0.0) {
        throw InadmissibleStateError("constraint requires negative inflaton kinetic energy");
      }
      s.field->psi_dot = std::copysign(std::sqrt(kinetic2), s.field->psi_dot);
      break;
    }
  }
  if (inflaton) s.rho = matter_state(s, params).rho;
  return s;
}

Trajectory integrate_bransdicke(const BDProblem& p) {
  p.params.validate();
  p.settings.validate();
  BDState start = p.completion
                      ? complete_initial_data(p.initial, p.params, p.kappa, *p.completion)
                      : p.initial;
  require_state(start);
  if (p.params.is_inflaton()) {
    if (!start.field) throw PreconditionError("inflaton matter requires initial psi and psi_dot");
    start.rho = matter_state(start, p.params).rho;
  }
  if (!(start.a >= p.guard.eps_min && start.a <= p.guard.a_max)) {
    throw DomainError("initial scale factor must lie in [eps_min, a_max]");
  }
  if (!(std::isfinite(p.t_end) && p.t_end >= 0.0)) {
    throw PreconditionError("span end must be finite and >= 0");
  }

  const BDParams params = p.params;
  const SpatialCurvature kappa = p.kappa;
  const bool inflaton = params.is_inflaton();

  ode::State y0 = {start.a, start.H, start.phi, start.phi_dot};
  if (inflaton) {
    y0.insert(y0.end(), {start.field->psi, start.field->psi_dot, start.rho});
  } else {
    y0.push_back(start.rho);
  }

  auto unpack = [inflaton](double t, std::span<const double> y) {
    BDState s{t, y[0], y[1], y[2], y[3], 0.0, std::nullopt};
    if (inflaton) {
      s.field = InflatonField{y[4], y[5]};
    } else {
      s.rho = y[4];
    }
    return s;
  };

  auto rhs = [params, kappa, inflaton, unpack](double t, std::span<const double> y,
                                                std::span<double> dy) {
    BDState s = unpack(t, y);
    if (inflaton) s.rho = matter_state(s, params).rho;
    const BDRates r = bd_rhs(s, params, kappa);
    dy[0] = r.a_dot;
    dy[1] = r.H_dot;
    dy[2] = r.phi_dot;
    dy[3] = r.phi_ddot;
    if (inflaton) {
      dy[4] = r.psi_dot;
      dy[5] = r.psi_ddot;
      // Continuity with P = rho - 2U(psi), independent of psi'.
      const double U = std::get<InflatonMatter>(params.matter).U(y[4]);
      dy[6] = -3.0 * y[1] * (2.0 * y[6] - 2.0 * U);
    } else {
      dy[4] = r.rho_dot;
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
      {ode::EventKind::SingularityFloor,
       [guard](double, std::span<const double> y) { return y[2] - guard.eps_min; },
       ode::Crossing::Falling, true},
  };
  const ode::Solution sol = ode::integrate(rhs, y0, {0.0, p.t_end}, p.settings, specs, p.grid);

  Trajectory traj;
  traj.model = "bransdicke";
  traj.accepted_steps = sol.accepted_steps;
  traj.rejected_steps = sol.rejected_steps;
  traj.max_consecutive_rejections = sol.max_consecutive_rejections;
  traj.events = sol.events;
  traj.terminal_event = sol.terminal;
  traj.diagnostic_names = {"constraint", "ricci_gap"};
  if (inflaton) traj.diagnostic_names.emplace_back("rho_continuity_gap");

  for (std::size_t i = 0; i < sol.t.size(); ++i) {
    BDState s = unpack(sol.t[i], sol.y[i]);
    const MatterState m = matter_state(s, params);
    s.rho = m.rho;
    const BDRates r = bd_rhs(s, params, kappa);
    Sample row;
    row.t = s.t;
    row.a = s.a;
    row.a_dot = r.a_dot;
    row.a_ddot = s.a * (r.H_dot + s.H * s.H);
    row.rho = m.rho;
    row.pressure = m.pressure;
    row.phi = s.phi;
    row.phi_dot = s.phi_dot;
    row.diagnostics = {bd_constraint_residual(s, params, kappa),
                       bd_ricci_scalar(s, params, kappa).difference};
    if (inflaton) row.diagnostics.push_back(sol.y[i][6] - m.rho);
    traj.samples.push_back(std::move(row));
  }
  return traj;
}

}  // namespace frw::bd
