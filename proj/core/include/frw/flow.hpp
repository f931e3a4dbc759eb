#pragma once

// Ricci flow of the FRW spatial metric reduced to an ODE for a(t):
//
//   6 a a' = -2 [3 a''/a + 6 (a'/a)^2 + 6 k/a^2]
//
// integrated directly in (a, a'), in Hubble form (a, H), in the cube-volume
// variables chi = a^3 with clock tau = 3t, and, separately, the intrinsic
// flow a a' = -2k driven by the 3-metric Ricci tensor R_ij = 2k gamma_ij.

#include <cstddef>
#include <string_view>
#include <vector>

#include "frw/geometry.hpp"
#include "frw/odekit.hpp"
#include "frw/trajectory.hpp"

namespace frw::flow {

using geometry::ScaleState;
using geometry::SpatialCurvature;

/// Sign in front of the a^2 H term of the Hubble form: H' = -3H^2 - 2k/a^2 + sigma a^2 H.
enum class Sigma : int { Minus = -1, Plus = +1 };

inline double value(Sigma s) { return static_cast<double>(static_cast<int>(s)); }

/// Sign printed in the published Hubble form (H' + 3H^2 + 2k/a^2 - a^2 H = 0).
inline constexpr Sigma kPublishedSigma = Sigma::Plus;

enum class FormulationKind { Direct, Hubble, Chi, Intrinsic };

std::string_view to_string(FormulationKind kind);

struct FlowFormulation {
  FormulationKind kind = FormulationKind::Direct;
  Sigma sigma = Sigma::Minus;  // used by Hubble and Chi only

  static FlowFormulation direct() { return {FormulationKind::Direct, Sigma::Minus}; }
  static FlowFormulation hubble(Sigma s) { return {FormulationKind::Hubble, s}; }
  static FlowFormulation chi(Sigma s) { return {FormulationKind::Chi, s}; }
  static FlowFormulation intrinsic() { return {FormulationKind::Intrinsic, Sigma::Minus}; }

  bool operator==(const FlowFormulation&) const = default;
};

/// Admissible band eps_min <= a <= a_max; leaving it ends the run with an event.
struct Guard {
  double eps_min = 1e-8;
  double a_max = 1e8;

  bool operator==(const Guard&) const = default;
};

/// a'' solved from the flow equation: -a^2 a' - 2 a'^2/a - 2k/a.
double flow_rhs_direct(const ScaleState& state, SpatialCurvature kappa);

/// H' = -3H^2 - 2k/a^2 + sigma a^2 H.
double flow_rhs_hubble(double H, double a, SpatialCurvature kappa, Sigma sigma);

/// 6 a a' + 2 [3 a''/a + 6 (a'/a)^2 + 6 k/a^2]; requires state.a_ddot.
double flow_equation_residual(const ScaleState& state, SpatialCurvature kappa);

struct SigmaCalibration {
  Sigma calibrated = Sigma::Minus;
  Sigma published = kPublishedSigma;
  double calibrated_residual = 0.0;  // max scaled mismatch against the direct form
  double published_residual = 0.0;
  std::size_t samples = 0;

  bool published_consistent() const { return calibrated == published; }
};

/// Picks the sigma for which the Hubble form reproduces the direct form
/// through H' = a''/a - H^2 on 100 seeded random states with |a'| >= 0.1.
/// Throws InconsistencyError if neither sign is consistent to 1e-12.
SigmaCalibration calibrate_sigma();

struct FlowProblem {
  SpatialCurvature kappa;
  FlowFormulation formulation;
  double a0 = 1.0;
  double a_dot0 = 0.0;
  double t_end = 1.0;
  ode::IntegratorSettings settings;
  Guard guard;
  std::vector<double> grid;  // output times in [0, t_end]; empty = every step
};

/// Integrates the selected formulation from t = 0. Rows carry a, a', a''
/// (a'' from the formulation's own vector field). Diagnostics columns:
/// Direct/Hubble/Chi -> flow_residual, chi_residual (calibrated sign), each
/// divided by max(1, largest term of its equation);
/// Intrinsic -> a_exact, rel_err_exact.
Trajectory integrate_flow(const FlowProblem& problem);

/// Exact intrinsic flow sqrt(a0^2 - 4 k t) (NaN past the crunch).
double intrinsic_exact(double a0, SpatialCurvature kappa, double t);

/// Residual of chi_tautau - sigma (a^2/3) chi_tau + (2k/3a^2) chi along `traj`,
/// with chi = a^3, chi_tau = a^2 a', chi_tautau = (2 a a'^2 + a^2 a'')/3.
/// Returns the max |residual| / max(1, largest term). Requires a'' on every row.
double chi_residual(const Trajectory& traj, SpatialCurvature kappa, Sigma sigma);

struct IntegralIdentityReport {
  double corrected_flux = 0.0;        // mu chi_tau vs c0 - (2k/3) int mu a
  double corrected_volume = 0.0;      // chi vs chi0 + int mu^-1 [c0 - (2k/3) int mu a]
  double published_chi_rate = 0.0;    // chi_tau = e^{-tau} [c + (2k/3) int chi/a^2]
  double published_scale_rate = 0.0;  // 2 a^2 a_tau = e^{-int a^2/3} [c + (2k/3) int a]
  double published_volume = 0.0;      // a^3 = a0^3 + int e^{-int a^2/3} [c + (2k/3) int a]
  double c0 = 0.0;

  double corrected() const {
    return corrected_flux > corrected_volume ? corrected_flux : corrected_volume;
  }
};

/// Integrating-factor identities of the chi equation evaluated by cumulative
/// piecewise-quadratic quadrature in tau over the trajectory rows. The corrected form
/// uses mu(tau) = exp(-sigma int_0^tau a^2/3 ds). Throws QuadratureError with
/// fewer than 100 rows.
IntegralIdentityReport integral_identity(const Trajectory& traj, SpatialCurvature kappa,
                                         Sigma sigma);

/// Max of the two corrected-form residuals.
double integral_identity_residual(const Trajectory& traj, SpatialCurvature kappa, Sigma sigma);

struct FlowDiagnostics {
  double flow_residual = 0.0;
  double chi_residual = 0.0;
  double integral_residual = 0.0;
  double c0 = 0.0;  // chi_tau(0) = a0^2 a0'
};

FlowDiagnostics flow_diagnostics(const Trajectory& traj, SpatialCurvature kappa, Sigma sigma);

}  // namespace frw::flow
