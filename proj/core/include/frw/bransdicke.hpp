#pragma once

// Brans-Dicke scalar-tensor cosmology on an FRW background with scalar
// potential V(phi) and either a barotropic fluid or an inflaton field psi
// with potential U(psi). Units with c = 1; the Newton constant is 1/phi.

#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "frw/flow.hpp"
#include "frw/geometry.hpp"
#include "frw/odekit.hpp"
#include "frw/trajectory.hpp"

namespace frw::bd {

using geometry::SpatialCurvature;

/// sum_k c_k x^k
struct Polynomial {
  std::vector<double> coeffs;

  double operator()(double x) const;
  double derivative(double x) const;
  bool operator==(const Polynomial&) const = default;
};

struct FluidMatter {
  double w = 0.0;  // P = w rho
  bool operator==(const FluidMatter&) const = default;
};

/// rho = psi'^2/2 + U(psi), P = psi'^2/2 - U(psi).
struct InflatonMatter {
  Polynomial U;
  bool operator==(const InflatonMatter&) const = default;
};

using Matter = std::variant<FluidMatter, InflatonMatter>;

struct BDParams {
  double coupling = 1.0;  // Brans-Dicke w; 2w + 3 != 0
  Polynomial V;           // empty = V identically 0
  Matter matter = FluidMatter{};

  /// Throws PreconditionError for a degenerate coupling (2w + 3 = 0).
  void validate() const;
  bool is_inflaton() const { return std::holds_alternative<InflatonMatter>(matter); }
  bool operator==(const BDParams&) const = default;
};

struct InflatonField {
  double psi = 0.0;
  double psi_dot = 0.0;
  bool operator==(const InflatonField&) const = default;
};

struct BDState {
  double t = 0.0;
  double a = 1.0;
  double H = 0.0;
  double phi = 1.0;
  double phi_dot = 0.0;
  double rho = 0.0;  // fluid density; derived from the field for inflaton matter
  std::optional<InflatonField> field;
  bool operator==(const BDState&) const = default;
};

struct MatterState {
  double rho = 0.0;
  double pressure = 0.0;
};

/// Density and pressure of the matter sector at `state`.
MatterState matter_state(const BDState& state, const BDParams& params);

/// Box phi = -(phi'' + 3 H phi').
double box_phi_kinematic(double phi_ddot, double H, double phi_dot);

/// Box phi = [8 pi (3P - rho) + phi V'(phi) - 2 V(phi)] / (2w + 3).
double box_phi_dynamic(const BDState& state, const BDParams& params);

struct BDRates {
  double a_dot = 0.0;
  double H_dot = 0.0;
  double phi_dot = 0.0;
  double phi_ddot = 0.0;
  double rho_dot = 0.0;
  double psi_dot = 0.0;   // inflaton only
  double psi_ddot = 0.0;  // inflaton only
};

/// Time derivatives of the state. rho' = -3H(rho + P); for inflaton matter
/// psi'' = -3H psi' - U'(psi).
BDRates bd_rhs(const BDState& state, const BDParams& params, SpatialCurvature kappa);

/// H' with the potential term's denominator taken literally as 10 phi
/// (coefficient 2(2+3)) instead of 2(2w+3) phi.
double h_dot_published_denominator(const BDState& state, const BDParams& params,
                                   SpatialCurvature kappa);

/// H^2 - [(8 pi/3phi) rho + (w/6)(phi'/phi)^2 - H phi'/phi - k/a^2 + V/(6 phi)].
double bd_constraint_residual(const BDState& state, const BDParams& params, SpatialCurvature kappa);

struct BDRicci {
  double from_matter = 0.0;    // -8 pi T/phi + w grad^2 phi/phi^2 + 3 Box phi/phi + 2V/phi
  double from_geometry = 0.0;  // 6 [H' + 2H^2 + k/a^2]
  double difference = 0.0;
};

BDRicci bd_ricci_scalar(const BDState& state, const BDParams& params, SpatialCurvature kappa);

/// Which unknown the constraint is solved for when completing initial data.
enum class Completion { Rho, Hubble, PsiDot };

std::string_view to_string(Completion c);

/// Solves the first-integral constraint for the designated unknown. Hubble
/// keeps the sign of state.H (non-negative root for H = 0). Throws
/// InadmissibleStateError when no real/non-negative solution exists.
BDState complete_initial_data(BDState state, const BDParams& params, SpatialCurvature kappa,
                              Completion unknown);

struct BDProblem {
  BDParams params;
  SpatialCurvature kappa;
  BDState initial;
  std::optional<Completion> completion = Completion::Rho;  // nullopt = integrate data as given
  double t_end = 1.0;
  ode::IntegratorSettings settings;
  flow::Guard guard;
  std::vector<double> grid;
};

/// State vector (a, H, phi, phi', rho) or, for inflaton matter,
/// (a, H, phi, phi', psi, psi', rho_continuity) where rho_continuity is
/// evolved by the continuity equation as an independent check of the field
/// mapping. Diagnostics: constraint, ricci_gap, and for inflaton matter
/// rho_continuity_gap = rho_continuity - rho(psi, psi').
Trajectory integrate_bransdicke(const BDProblem& problem);

}  // namespace frw::bd
