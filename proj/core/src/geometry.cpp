#include "frw/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "frw/errors.hpp"

namespace frw::geometry {

SpatialCurvature::SpatialCurvature(double kappa) : kappa_(kappa) {
  if (!std::isfinite(kappa)) {
    throw DomainError("spatial curvature must be finite");
  }
}

void require_positive_scale(const ScaleState& s) {
  if (!(std::isfinite(s.a) && s.a > 0.0)) {
    throw DomainError("scale factor must be positive, got a = " + std::to_string(s.a));
  }
}

namespace {

constexpr int T = 0, R = 1, TH = 2, PH = 3;

void require_regular_point(SpatialCurvature kappa, const SpacePoint& p) {
  if (!(p.r > 0.0)) {
    throw DomainError("invalid sample point: r must be > 0 (coordinate origin)");
  }
  if (!(p.theta > 0.0 && p.theta < std::numbers::pi)) {
    throw DomainError("invalid sample point: theta must lie in (0, pi)");
  }
  if (!(1.0 - kappa.value() * p.r * p.r > 0.0)) {
    throw DomainError("invalid sample point: 1 - kappa r^2 must be > 0");
  }
}

double require_a_ddot(const ScaleState& s) {
  if (!s.a_ddot) {
    throw PreconditionError("curvature requires the second derivative a_ddot");
  }
  return *s.a_ddot;
}

}  // namespace

CurvatureSample christoffels(const ScaleState& s, SpatialCurvature kappa, const SpacePoint& p) {
  require_positive_scale(s);
  require_regular_point(kappa, p);
  const double k = kappa.value();
  const double lapse = 1.0 - k * p.r * p.r;
  const double sin_t = std::sin(p.theta);
  const double cos_t = std::cos(p.theta);
  const double h = s.a_dot / s.a;

  Christoffel g(4);
  auto set = [&g](int l, int m, int n, double v) {
    g.at(l, m, n) = v;
    g.at(l, n, m) = v;
  };
  set(T, R, R, s.a * s.a_dot / lapse);
  set(R, R, R, k * p.r / lapse);
  set(T, TH, TH, s.a * s.a_dot * p.r * p.r);
  set(T, PH, PH, s.a * s.a_dot * p.r * p.r * sin_t * sin_t);
  set(R, T, R, h);
  set(TH, T, TH, h);
  set(PH, T, PH, h);
  set(R, TH, TH, -p.r * lapse);
  set(R, PH, PH, -p.r * lapse * sin_t * sin_t);
  set(TH, R, TH, 1.0 / p.r);
  set(PH, R, PH, 1.0 / p.r);
  set(TH, PH, PH, -sin_t * cos_t);
  set(PH, TH, PH, cos_t / sin_t);

  CurvatureSample out;
  out.christoffel = std::move(g);
  return out;
}

CurvatureSample ricci_components(const ScaleState& s, SpatialCurvature kappa,
                                 const SpacePoint& p) {
  const double a_ddot = require_a_ddot(s);
  require_positive_scale(s);
  require_regular_point(kappa, p);
  const double k = kappa.value();
  const double spatial = s.a * a_ddot + 2.0 * s.a_dot * s.a_dot + 2.0 * k;
  const double sin_t = std::sin(p.theta);
  const double r2 = p.r * p.r;

  CurvatureSample out;
  out.ricci = Eigen::MatrixXd::Zero(4, 4);
  out.ricci(T, T) = -3.0 * a_ddot / s.a;
  out.ricci(R, R) = spatial / (1.0 - k * r2);
  out.ricci(TH, TH) = r2 * spatial;
  out.ricci(PH, PH) = r2 * spatial * sin_t * sin_t;
  return out;
}

RicciScalars ricci_scalar_4(const ScaleState& s, SpatialCurvature kappa) {
  const double a_ddot = require_a_ddot(s);
  require_positive_scale(s);
  const double acc = a_ddot / s.a;
  const double h = s.a_dot / s.a;
  const double curv = kappa.value() / (s.a * s.a);
  RicciScalars out;
  out.four = 6.0 * (acc + h * h + curv);
  out.spatial_with_extrinsic = 3.0 * acc + 6.0 * h * h + 6.0 * curv;
  out.spatial_intrinsic = 6.0 * curv;
  return out;
}

CurvatureSample curvature(const ScaleState& s, SpatialCurvature kappa, const SpacePoint& p) {
  CurvatureSample out = christoffels(s, kappa, p);
  out.ricci = ricci_components(s, kappa, p).ricci;
  const RicciScalars scalars = ricci_scalar_4(s, kappa);
  out.ricci_scalar_4 = scalars.four;
  out.spatial_scalar_with_extrinsic = scalars.spatial_with_extrinsic;
  out.spatial_scalar_intrinsic = scalars.spatial_intrinsic;
  return out;
}

MetricField frw_metric(const ScaleState& s, SpatialCurvature kappa) {
  require_positive_scale(s);
  const double a0 = s.a;
  const double a1 = s.a_dot;
  const double a2 = s.a_ddot.value_or(0.0);
  const double t0 = s.t;
  const double k = kappa.value();
  return [=](const Eigen::VectorXd& x) {
    const double dt = x(0) - t0;
    const double a = a0 + a1 * dt + 0.5 * a2 * dt * dt;
    const double r = x(1);
    const double sin_t = std::sin(x(2));
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(4, 4);
    g(0, 0) = -1.0;
    g(1, 1) = a * a / (1.0 - k * r * r);
    g(2, 2) = a * a * r * r;
    g(3, 3) = a * a * r * r * sin_t * sin_t;
    return g;
  };
}

MetricField spatial_metric(SpatialCurvature kappa, double scale) {
  const double k = kappa.value();
  const double s2 = scale * scale;
  return [=](const Eigen::VectorXd& x) {
    const double r = x(0);
    const double sin_t = std::sin(x(1));
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(3, 3);
    g(0, 0) = s2 / (1.0 - k * r * r);
    g(1, 1) = s2 * r * r;
    g(2, 2) = s2 * r * r * sin_t * sin_t;
    return g;
  };
}

MetricField minkowski_metric() {
  return [](const Eigen::VectorXd&) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Identity(4, 4);
    g(0, 0) = -1.0;
    return g;
  };
}

Eigen::VectorXd frw_coordinates(double t, const SpacePoint& p) {
  Eigen::VectorXd x(4);
  x << t, p.r, p.theta, p.phi;
  return x;
}

CurvatureSample numeric_curvature_oracle(const MetricField& metric, const Eigen::VectorXd& x,
                                         double step) {
  if (!(step >= 1e-6 && step <= 1e-3)) {
    throw PreconditionError("oracle step must lie in [1e-6, 1e-3]");
  }
  const Eigen::MatrixXd g = metric(x);
  const int n = static_cast<int>(g.rows());
  if (g.cols() != n || x.size() != n) {
    throw PreconditionError("metric field dimension does not match the evaluation point");
  }
  const double det = g.determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-300) {
    throw DegenerateMetricError("metric determinant vanishes at the evaluation point");
  }
  const Eigen::MatrixXd g_inv = g.inverse();
  const double h2 = 0.3 * std::sqrt(step);

  auto shifted = [&](int i, double di, int j, double dj) {
    Eigen::VectorXd y = x;
    y(i) += di;
    y(j) += dj;
    return metric(y);
  };

  // dg[k] = d_k g ; ddg[k][l] = d_k d_l g. Each central difference is
  // Richardson-extrapolated from steps h and h/2, leaving O(h^4) truncation.
  auto first = [&](int k, double h) {
    return Eigen::MatrixXd((shifted(k, h, k, 0.0) - shifted(k, -h, k, 0.0)) / (2.0 * h));
  };
  auto second_pure = [&](int k, double h) {
    return Eigen::MatrixXd((shifted(k, h, k, 0.0) - 2.0 * g + shifted(k, -h, k, 0.0)) / (h * h));
  };
  auto second_mixed = [&](int k, int l, double h) {
    return Eigen::MatrixXd((shifted(k, h, l, h) - shifted(k, h, l, -h) - shifted(k, -h, l, h) +
                            shifted(k, -h, l, -h)) /
                           (4.0 * h * h));
  };
  auto richardson = [](const Eigen::MatrixXd& coarse, const Eigen::MatrixXd& fine) {
    return Eigen::MatrixXd((4.0 * fine - coarse) / 3.0);
  };

  std::vector<Eigen::MatrixXd> dg(static_cast<std::size_t>(n));
  std::vector<std::vector<Eigen::MatrixXd>> ddg(static_cast<std::size_t>(n),
                                                std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(n)));
  for (int k = 0; k < n; ++k) {
    dg[k] = richardson(first(k, step), first(k, 0.5 * step));
    ddg[k][k] = richardson(second_pure(k, h2), second_pure(k, 0.5 * h2));
  }
  for (int k = 0; k < n; ++k) {
    for (int l = k + 1; l < n; ++l) {
      ddg[k][l] = richardson(second_mixed(k, l, h2), second_mixed(k, l, 0.5 * h2));
      ddg[l][k] = ddg[k][l];
    }
  }

  // S_{s m v} = d_m g_{s v} + d_v g_{s m} - d_s g_{m v}
  auto lowered = [&](int s, int m, int v) { return dg[m](s, v) + dg[v](s, m) - dg[s](m, v); };
  auto lowered_d = [&](int k, int s, int m, int v) {
    return ddg[k][m](s, v) + ddg[k][v](s, m) - ddg[k][s](m, v);
  };

  Christoffel gamma(n);
  for (int l = 0; l < n; ++l)
    for (int m = 0; m < n; ++m)
      for (int v = 0; v < n; ++v) {
        double acc = 0.0;
        for (int s = 0; s < n; ++s) acc += g_inv(l, s) * lowered(s, m, v);
        gamma.at(l, m, v) = 0.5 * acc;
      }

  // d_k Gamma^l_{mv} = 1/2 (d_k g^{ls}) S_{smv} + 1/2 g^{ls} d_k S_{smv},
  // with d_k g^{-1} = -g^{-1} (d_k g) g^{-1}.
  std::vector<Christoffel> d_gamma(static_cast<std::size_t>(n), Christoffel(n));
  for (int k = 0; k < n; ++k) {
    const Eigen::MatrixXd d_inv = -g_inv * dg[k] * g_inv;
    for (int l = 0; l < n; ++l)
      for (int m = 0; m < n; ++m)
        for (int v = 0; v < n; ++v) {
          double acc = 0.0;
          for (int s = 0; s < n; ++s) {
            acc += d_inv(l, s) * lowered(s, m, v) + g_inv(l, s) * lowered_d(k, s, m, v);
          }
          d_gamma[k].at(l, m, v) = 0.5 * acc;
        }
  }

  // R_{mv} = d_l G^l_{mv} - d_v G^l_{ml} + G^l_{ls} G^s_{mv} - G^l_{vs} G^s_{ml}
  Eigen::MatrixXd ricci = Eigen::MatrixXd::Zero(n, n);
  for (int m = 0; m < n; ++m)
    for (int v = 0; v < n; ++v) {
      double acc = 0.0;
      for (int l = 0; l < n; ++l) {
        acc += d_gamma[l](l, m, v) - d_gamma[v](l, m, l);
        for (int s = 0; s < n; ++s) {
          acc += gamma(l, l, s) * gamma(s, m, v) - gamma(l, v, s) * gamma(s, m, l);
        }
      }
      ricci(m, v) = acc;
    }

  CurvatureSample out;
  out.christoffel = std::move(gamma);
  out.ricci = std::move(ricci);
  double scalar = 0.0;
  for (int m = 0; m < n; ++m)
    for (int v = 0; v < n; ++v) scalar += g_inv(m, v) * out.ricci(m, v);
  if (n == 4) {
    out.ricci_scalar_4 = scalar;
  }
  return out;
}

double lower_index_asymmetry(const Christoffel& gamma) {
  double worst = 0.0;
  const int n = gamma.dim();
  for (int l = 0; l < n; ++l)
    for (int m = 0; m < n; ++m)
      for (int v = m + 1; v < n; ++v) worst = std::max(worst, std::abs(gamma(l, m, v) - gamma(l, v, m)));
  return worst;
}

}  // namespace frw::geometry
