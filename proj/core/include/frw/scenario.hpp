#pragma once

// Versioned JSON scenario describing one simulation run, and the runner that
// dispatches it to the flow, friedmann or bransdicke integrator.
//
// {
//   "spec_version": 1,
//   "model": "flow" | "friedmann" | "bransdicke",
//   "kappa": 0,
//   "span": {"t_end": 1},
//   "output": {"points": 201},            // 0 records every accepted step
//   "integrator": {"abs_tol": ..., "rel_tol": ..., "h_init": ..., "h_min": ...,
//                  "h_max": ..., "max_steps": ...},
//   "guard": {"eps_min": 1e-8, "a_max": 1e8},
//   "flow": {"formulation": "direct" | "hubble" | "chi" | "intrinsic",
//            "sigma": "calibrated" | -1 | 1,
//            "initial": {"a": 1, "a_dot": 0}},
//   "friedmann": {"units": "geometric" | "reduced_planck", "G": 1, "Lambda": 0,
//                 "fluids": [{"w": 0, "rho0": 1}], "density": "evolve" | "closed_form",
//                 "initial": {"a": 1, "a_dot_sign": 1}},
//   "bransdicke": {"coupling": 1000, "V": [c0, c1, ...],
//                  "matter": {"type": "fluid", "w": 0} | {"type": "inflaton", "U": [...]},
//                  "initial": {"a": 1, "H": 1, "phi": 1, "phi_dot": 0, "rho": 0,
//                              "psi": 0, "psi_dot": 0},
//                  "complete": "rho" | "H" | "psi_dot" | "none"}
// }
//
// Exactly the section named by "model" may appear. Unknown keys are rejected.

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "frw/bransdicke.hpp"
#include "frw/flow.hpp"
#include "frw/friedmann.hpp"
#include "frw/odekit.hpp"
#include "frw/trajectory.hpp"

namespace frw {

inline constexpr int kScenarioVersion = 1;

struct FlowConfig {
  flow::FormulationKind formulation = flow::FormulationKind::Direct;
  std::optional<flow::Sigma> sigma;  // nullopt = calibrated at run time
  double a0 = 1.0;
  double a_dot0 = 0.0;

  bool operator==(const FlowConfig&) const = default;
};

enum class Units {
  Geometric,      // G as given (default 1)
  ReducedPlanck,  // 8 pi G = 1
};

struct FriedmannConfig {
  Units units = Units::Geometric;
  double G = 1.0;
  double Lambda = 0.0;
  std::vector<friedmann::FluidModel> fluids;
  friedmann::DensityMode density = friedmann::DensityMode::Evolve;
  double a0 = 1.0;
  int a_dot_sign = 1;

  double effective_G() const;
  bool operator==(const FriedmannConfig&) const = default;
};

struct BransDickeConfig {
  bd::BDParams params;
  bd::BDState initial;
  std::optional<bd::Completion> completion;  // nullopt = data must already satisfy the constraint

  bool operator==(const BransDickeConfig&) const = default;
};

using ModelConfig = std::variant<FlowConfig, FriedmannConfig, BransDickeConfig>;

struct Scenario {
  int spec_version = kScenarioVersion;
  double kappa = 0.0;
  double t_end = 1.0;
  std::size_t output_points = 201;
  ode::IntegratorSettings integrator;
  flow::Guard guard;
  ModelConfig model = FlowConfig{};

  std::string model_name() const;
  /// Output times, or empty when every accepted step is recorded.
  std::vector<double> output_grid() const;

  bool operator==(const Scenario&) const = default;
};

/// Parses and validates. Throws ValidationError naming the offending field.
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);
nlohmann::json scenario_to_json(const Scenario& s);

/// Checks the model preconditions at t = 0, including on-constraint initial
/// data. Throws ValidationError.
void validate(const Scenario& s);

/// Tolerance on the first-integral residual of completed initial data,
/// relative to max(1, H^2).
inline constexpr double kInitialConstraintTolerance = 1e-12;

struct RunResult {
  Trajectory trajectory;
  std::optional<flow::SigmaCalibration> sigma_calibration;  // Hubble/Chi flow runs with "calibrated"
  std::optional<flow::Sigma> sigma_used;                    // flow Hubble/Chi runs
};

/// Validates and integrates. Numerical failures surface as events or
/// BudgetExceededError.
RunResult run_scenario(const Scenario& s);

}  // namespace frw
