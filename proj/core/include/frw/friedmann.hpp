#pragma once

// Friedmann dynamics with barotropic fluids P = w rho and a cosmological
// constant; de Sitter closed forms; density-parameter classification; and
// the combination of the flow equation with the Friedmann relations.

#include <string_view>
#include <vector>

#include "frw/flow.hpp"
#include "frw/geometry.hpp"
#include "frw/odekit.hpp"
#include "frw/trajectory.hpp"

namespace frw::friedmann {

using geometry::SpatialCurvature;

/// Barotropic fluid with density rho0 at a = 1.
struct FluidModel {
  double w = 0.0;
  double rho0 = 0.0;

  static FluidModel dust(double rho0) { return {0.0, rho0}; }
  static FluidModel radiation(double rho0) { return {1.0 / 3.0, rho0}; }
  static FluidModel vacuum(double rho0) { return {-1.0, rho0}; }

  bool operator==(const FluidModel&) const = default;
};

struct DensityPressure {
  double rho = 0.0;
  double pressure = 0.0;
};

/// rho = rho0 a^{-3(1+w)}, P = w rho.
DensityPressure fluid_density(double a, const FluidModel& fluid);

/// Sum over fluids.
DensityPressure total_density(double a, const std::vector<FluidModel>& fluids);

/// H^2 = Lambda/3 + (8 pi G/3) rho - k/a^2. May be negative.
double friedmann_h_squared(double a, double rho, SpatialCurvature kappa, double Lambda, double G);

struct Acceleration {
  double a_ddot_over_a = 0.0;  // Lambda/3 - (4 pi G/3)(rho + 3P)
  bool repulsive = false;      // rho + 3P < 0
};

Acceleration acceleration(double rho, double pressure, double Lambda, double G);

struct Background {
  std::vector<FluidModel> fluids;
  double G = 1.0;
  double Lambda = 0.0;
  SpatialCurvature kappa;

  bool operator==(const Background&) const = default;
};

/// G with 8 pi G = 1.
double reduced_planck_G();

enum class DensityMode {
  Evolve,      // continuity equation for ln rho_i integrated alongside a
  ClosedForm,  // rho0 a^{-3(1+w)} evaluated from a
};

struct FriedmannProblem {
  Background background;
  double a0 = 1.0;
  int expansion_sign = 1;  // sign of a'(0); |a'(0)| follows from the constraint
  double t_end = 1.0;
  DensityMode density = DensityMode::Evolve;
  ode::IntegratorSettings settings;
  flow::Guard guard;
  std::vector<double> grid;
};

/// Initial H^2 implied by the constraint; throws InadmissibleStateError if negative.
double initial_h_squared(const FriedmannProblem& problem);

/// Evolves (a, a', ln rho_i). Non-terminal turning-point events mark a' = 0;
/// the floor and ceiling of the guard are terminal.
///
/// Diagnostics: constraint = (H^2 - [Lambda/3 + 8piG rho/3 - k/a^2]) / max(1, H^2),
/// conservation = max_i |rho_i a^{3(1+w_i)} / rho0_i - 1|, and a_exact when
/// the background has a closed form (pure Lambda with k = 0, or a single
/// fluid with w > -1, k = 0, Lambda = 0).
Trajectory integrate_friedmann(const FriedmannProblem& problem);

struct DeSitterPoint {
  double a = 0.0;
  double a_dot = 0.0;
  double a_ddot = 0.0;
  bool singular = false;  // a = 0 (k < 0 branch at t = 0)
};

/// Vacuum Lambda = 3 omega^2 solutions: (sqrt k/omega) cosh(omega t) for k > 0,
/// exp(omega t) for k = 0, (sqrt|k|/omega) sinh(omega t) for k < 0.
DeSitterPoint desitter_solution(double k, double omega, double t);

struct DeSitterResiduals {
  double constraint = 0.0;    // 3 (a'^2 + k)/a^2 - Lambda
  double acceleration = 0.0;  // -2 a''/a - (a'^2 + k)/a^2 + Lambda
  double first_integral = 0.0;  // a'^2 - omega^2 a^2 + k
};

DeSitterResiduals desitter_residuals(double k, double omega, double t);

enum class OmegaLabel { Open, Flat, Closed };

std::string_view to_string(OmegaLabel label);

struct OmegaClassification {
  double omega = 0.0;
  int kappa_sign = 0;
  OmegaLabel label = OmegaLabel::Flat;
  double identity_residual = 0.0;  // |Omega - 1 - k/(H^2 a^2)|
};

/// Relative band |Omega - 1| <= kOmegaFlatBand counts as flat.
inline constexpr double kOmegaFlatBand = 1e-12;

/// Omega = 8 pi G rho / (3 H^2). Throws DomainError for H = 0 (static universe).
OmegaClassification classify_omega(double rho, double H, double a, SpatialCurvature kappa, double G);

/// d(a^2)/dt = 8 pi G (P - rho), independent of k.
double coupled_flow_rate(double rho, double pressure, double G);

struct CoupledChain {
  double flow_combination = 0.0;  // 3a''/a + 6H^2 + 6k/a^2 from the Friedmann relations
  double combined_residual = 0.0; // flow_combination - 12 pi G (rho - P)
  double rate_from_flow = 0.0;    // 2 a a' implied by the flow equation
  double rate_residual = 0.0;     // rate_from_flow - coupled_flow_rate
};

/// Substitutes the Friedmann relations (Lambda = 0) into the flow equation at
/// a Friedmann-consistent state. Throws InadmissibleStateError if H^2 < 0.
CoupledChain coupled_chain(double a, double rho, double pressure, SpatialCurvature kappa, double G);

struct RepulsiveBound {
  double lhs = 0.0;      // 2 a''/a = 2 Lambda/3 - (8 pi G/3) rho
  double bound = 0.0;    // Lambda - k/a^2
  bool predicate = false;  // bound > 0
  bool upper_bound_holds = false;      // lhs <= bound
  bool published_direction_holds = false;  // lhs >= bound
};

/// Pressure-free matter with Lambda. Requires (8 pi G/3) rho + Lambda/3 >= k/a^2,
/// otherwise throws InadmissibleStateError.
RepulsiveBound repulsive_bound(double a, SpatialCurvature kappa, double Lambda, double rho, double G);

}  // namespace frw::friedmann
