#pragma once

// FRW line element ds^2 = -dt^2 + a^2(t) [dr^2/(1 - k r^2) + r^2 dOmega^2]:
// closed-form connection and curvature, plus a finite-difference curvature
// oracle that works for any smooth metric field in 3 or 4 dimensions.
//
// Coordinates are ordered (t, r, theta, phi) = (0, 1, 2, 3), signature (-,+,+,+).

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

namespace frw::geometry {

/// Spatial curvature parameter kappa. Any finite value.
class SpatialCurvature {
 public:
  SpatialCurvature() = default;
  explicit SpatialCurvature(double kappa);

  double value() const { return kappa_; }
  /// -1, 0 or +1.
  int sign() const { return (kappa_ > 0.0) - (kappa_ < 0.0); }

  bool operator==(const SpatialCurvature&) const = default;

 private:
  double kappa_ = 0.0;
};

/// Kinematics of the scale factor at time t. a > 0.
struct ScaleState {
  double t = 0.0;
  double a = 1.0;
  double a_dot = 0.0;
  std::optional<double> a_ddot;

  double hubble() const { return a_dot / a; }
};

/// Throws DomainError unless a is finite and positive.
void require_positive_scale(const ScaleState& s);

struct SpacePoint {
  double r = 0.5;
  double theta = 1.0;
  double phi = 0.0;
};

/// Dense Gamma^lambda_{mu nu} table of dimension dim^3.
class Christoffel {
 public:
  Christoffel() = default;
  explicit Christoffel(int dim) : dim_(dim), values_(static_cast<std::size_t>(dim * dim * dim)) {}

  int dim() const { return dim_; }
  double operator()(int upper, int lower1, int lower2) const {
    return values_[index(upper, lower1, lower2)];
  }
  double& at(int upper, int lower1, int lower2) { return values_[index(upper, lower1, lower2)]; }

 private:
  std::size_t index(int l, int m, int n) const {
    return static_cast<std::size_t>((l * dim_ + m) * dim_ + n);
  }
  int dim_ = 0;
  std::vector<double> values_;
};

struct CurvatureSample {
  Christoffel christoffel;
  Eigen::MatrixXd ricci;  // R_{mu nu}; empty until computed
  std::optional<double> ricci_scalar_4;
  std::optional<double> spatial_scalar_with_extrinsic;  // 3 a''/a + 6 (a'/a)^2 + 6 k/a^2
  std::optional<double> spatial_scalar_intrinsic;  // 6 k / a^2
};

struct RicciScalars {
  double four = 0.0;               // 6 [a''/a + (a'/a)^2 + k/a^2]
  double spatial_with_extrinsic = 0.0;  // four - 3 a''/a
  double spatial_intrinsic = 0.0;  // 6 k / a^2
};

/// Non-zero FRW Christoffel symbols at `p`; all other entries are zero.
/// Throws DomainError at r = 0, theta in {0, pi}, 1 - k r^2 <= 0, or a <= 0.
CurvatureSample christoffels(const ScaleState& state, SpatialCurvature kappa, const SpacePoint& p);

/// Diagonal FRW Ricci tensor. Requires state.a_ddot (PreconditionError otherwise).
CurvatureSample ricci_components(const ScaleState& state, SpatialCurvature kappa,
                                 const SpacePoint& p);

RicciScalars ricci_scalar_4(const ScaleState& state, SpatialCurvature kappa);

/// Christoffels, Ricci tensor and both curvature scalars in one sample.
CurvatureSample curvature(const ScaleState& state, SpatialCurvature kappa, const SpacePoint& p);

/// Metric components g_{mu nu}(x); the dimension is taken from the result.
using MetricField = std::function<Eigen::MatrixXd(const Eigen::VectorXd& x)>;

/// FRW metric with a(t) expanded to second order about `state.t` using
/// (a, a_dot, a_ddot); a_ddot defaults to 0.
MetricField frw_metric(const ScaleState& state, SpatialCurvature kappa);

/// Spatial metric scale^2 * gamma_ij over (r, theta, phi).
MetricField spatial_metric(SpatialCurvature kappa, double scale = 1.0);

MetricField minkowski_metric();

/// Coordinates of an FRW event as an oracle evaluation point.
Eigen::VectorXd frw_coordinates(double t, const SpacePoint& p);

inline constexpr double kDefaultOracleStep = 1e-5;

/// Finite-difference Christoffels and Ricci tensor of `metric` at `x`.
///
/// First derivatives of g use central differences with `step`; second
/// derivatives use the larger step 0.3*sqrt(step) so that rounding stays below
/// truncation. Both are Richardson-extrapolated over steps h and h/2, so the
/// truncation error is fourth order in the step. Throws PreconditionError unless
/// step in [1e-6, 1e-3], DegenerateMetricError if det g vanishes at x.
CurvatureSample numeric_curvature_oracle(const MetricField& metric, const Eigen::VectorXd& x,
                                         double step = kDefaultOracleStep);

/// Largest |Gamma^l_{mn} - Gamma^l_{nm}|.
double lower_index_asymmetry(const Christoffel& gamma);

}  // namespace frw::geometry
