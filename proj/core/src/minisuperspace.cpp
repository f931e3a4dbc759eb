#include "frw/minisuperspace.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "frw/errors.hpp"

namespace frw::wdw {

void WDWParams::validate() const {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw PreconditionError("hbar must be positive");
  if (!(m >= 0.0) || !std::isfinite(m)) throw PreconditionError("scalar mass must be >= 0");
  if (!std::isfinite(Lambda)) throw PreconditionError("Lambda must be finite");
}

TestWave gaussian(Coordinate coordinate, double amplitude, double ca, double cphi, double x0,
                  double phi0) {
  TestWave w;
  w.coordinate = coordinate;
  w.jet = [=](double x, double phi) {
    const double dx = x - x0;
    const double dp = phi - phi0;
    const double v = amplitude * std::exp(-ca * dx * dx - cphi * dp * dp);
    const double gx = -2.0 * ca * dx;
    const double gp = -2.0 * cphi * dp;
    return WaveJet{v, gx * v, (gx * gx - 2.0 * ca) * v, gp * v, (gp * gp - 2.0 * cphi) * v};
  };
  return w;
}

namespace {

// x^p and its first two derivatives for integer p >= 0.
struct PowerJet {
  double v, d, dd;
};

PowerJet power_jet(double x, int p) {
  auto ipow = [](double b, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
  };
  const double v = ipow(x, p);
  const double d = p >= 1 ? p * ipow(x, p - 1) : 0.0;
  const double dd = p >= 2 ? p * (p - 1) * ipow(x, p - 2) : 0.0;
  return {v, d, dd};
}

}  // namespace

TestWave polynomial(Coordinate coordinate, std::vector<Monomial> terms) {
  for (const auto& t : terms) {
    if (t.power_x < 0 || t.power_phi < 0) {
      throw PreconditionError("polynomial test waves need non-negative powers");
    }
  }
  TestWave w;
  w.coordinate = coordinate;
  w.jet = [terms = std::move(terms)](double x, double phi) {
    WaveJet j;
    for (const auto& t : terms) {
      const PowerJet px = power_jet(x, t.power_x);
      const PowerJet pp = power_jet(phi, t.power_phi);
      j.value += t.coeff * px.v * pp.v;
      j.d1 += t.coeff * px.d * pp.v;
      j.d11 += t.coeff * px.dd * pp.v;
      j.d2 += t.coeff * px.v * pp.d;
      j.d22 += t.coeff * px.v * pp.dd;
    }
    return j;
  };
  return w;
}

TestWave constant(Coordinate coordinate, double value) {
  return polynomial(coordinate, {{value, 0, 0}});
}

TestWave combine(double c1, const TestWave& psi1, double c2, const TestWave& psi2) {
  if (psi1.coordinate != psi2.coordinate) {
    throw PreconditionError("cannot combine waves in different coordinates");
  }
  TestWave w;
  w.coordinate = psi1.coordinate;
  w.analytic = psi1.analytic && psi2.analytic;
  w.jet = [c1, c2, f = psi1.jet, g = psi2.jet](double x, double phi) {
    const WaveJet a = f(x, phi);
    const WaveJet b = g(x, phi);
    return WaveJet{c1 * a.value + c2 * b.value, c1 * a.d1 + c2 * b.d1, c1 * a.d11 + c2 * b.d11,
                   c1 * a.d2 + c2 * b.d2, c1 * a.d22 + c2 * b.d22};
  };
  return w;
}

TestWave to_alpha(const TestWave& psi_a) {
  if (psi_a.coordinate != Coordinate::A) {
    throw PreconditionError("to_alpha expects a wave in the scale-factor coordinate");
  }
  TestWave w;
  w.coordinate = Coordinate::Alpha;
  w.analytic = psi_a.analytic;
  w.jet = [f = psi_a.jet](double alpha, double phi) {
    const double a = std::exp(alpha);
    const WaveJet j = f(a, phi);
    return WaveJet{j.value, a * j.d1, a * j.d1 + a * a * j.d11, j.d2, j.d22};
  };
  return w;
}

TestWave finite_difference(const TestWave& psi, double h) {
  if (!(h > 0.0)) throw PreconditionError("finite-difference step must be positive");
  TestWave w;
  w.coordinate = psi.coordinate;
  w.analytic = false;
  w.jet = [f = psi.jet, h](double x, double phi) {
    const double c = f(x, phi).value;
    const double xp = f(x + h, phi).value, xm = f(x - h, phi).value;
    const double pp = f(x, phi + h).value, pm = f(x, phi - h).value;
    return WaveJet{c, (xp - xm) / (2.0 * h), (xp - 2.0 * c + xm) / (h * h), (pp - pm) / (2.0 * h),
                   (pp - 2.0 * c + pm) / (h * h)};
  };
  return w;
}

double derivative_self_check(const TestWave& psi, double x, double phi, double h) {
  const WaveJet exact = psi(x, phi);
  const WaveJet approx = finite_difference(psi, h)(x, phi);
  const double scale = std::max({1.0, std::abs(exact.value), std::abs(exact.d11), std::abs(exact.d22)});
  const double gaps[] = {exact.d1 - approx.d1, exact.d11 - approx.d11, exact.d2 - approx.d2,
                         exact.d22 - approx.d22};
  double worst = 0.0;
  for (double g : gaps) worst = std::max(worst, std::abs(g) / scale);
  return worst;
}

double wdw_potential(double alpha, double phi, const WDWParams& params) {
  const double e4 = std::exp(4.0 * alpha);
  const double e6 = std::exp(6.0 * alpha);
  const double v = -e4 + e6 * (params.m * params.m * phi * phi + params.Lambda / 3.0);
  if (!std::isfinite(e6) || !std::isfinite(v)) {
    throw RangeError("Wheeler-DeWitt potential overflows at alpha = " + std::to_string(alpha));
  }
  return v;
}

double apply_wdw_a(const TestWave& psi, double a, double phi, const WDWParams& params) {
  params.validate();
  if (psi.coordinate != Coordinate::A) {
    throw PreconditionError("apply_wdw_a expects a wave in the scale-factor coordinate");
  }
  if (!(a > 0.0)) throw DomainError("Wheeler-DeWitt operator requires a > 0");
  const WaveJet j = psi(a, phi);
  const double h2 = params.hbar * params.hbar;
  const double a3 = a * a * a;
  const double radial = (j.d1 + a * j.d11) / (a * a);  // (1/a^2) d_a(a d_a psi)
  const double potential = -a + params.Lambda * a3 / 3.0 + params.m * params.m * a3 * phi * phi;
  return 0.5 * (h2 * radial - h2 * j.d22 / a3 + potential * j.value);
}

double apply_wdw_alpha(const TestWave& psi, double alpha, double phi, const WDWParams& params) {
  params.validate();
  if (psi.coordinate != Coordinate::Alpha) {
    throw PreconditionError("apply_wdw_alpha expects a wave in the alpha coordinate");
  }
  const WaveJet j = psi(alpha, phi);
  const double h2 = params.hbar * params.hbar;
  const double bracket = h2 * j.d11 - h2 * j.d22 - std::exp(4.0 * alpha) * j.value +
                         std::exp(6.0 * alpha) *
                             (params.m * params.m * phi * phi + params.Lambda / 3.0) * j.value;
  return 0.5 * std::exp(-3.0 * alpha) * bracket;
}

double zeroth_order_coefficient(double alpha, double phi, const WDWParams& params) {
  return 0.5 * std::exp(-3.0 * alpha) * wdw_potential(alpha, phi, params);
}

namespace {

// Sum of the magnitudes of the terms of the scale-factor operator, with the
// potential split into its curvature, Lambda and mass pieces.
double term_scale(const TestWave& psi, double a, double phi, const WDWParams& params) {
  const WaveJet j = psi(a, phi);
  const double h2 = params.hbar * params.hbar;
  const double a3 = a * a * a;
  const double potential =
      a + std::abs(params.Lambda) * a3 / 3.0 + params.m * params.m * a3 * phi * phi;
  return 0.5 * (std::abs(h2 * (j.d1 + a * j.d11) / (a * a)) + std::abs(h2 * j.d22 / a3) +
                potential * std::abs(j.value));
}

}  // namespace

EquivalenceReport change_of_variables_check(const TestWave& psi_a, const WDWParams& params,
                                            const SampleBox& box) {
  if (!(box.a_lo > 0.0) || !(box.a_hi >= box.a_lo) || !(box.phi_hi >= box.phi_lo) || box.n < 2) {
    throw PreconditionError("sample box needs 0 < a_lo <= a_hi, phi_lo <= phi_hi, n >= 2");
  }
  const TestWave psi_alpha = to_alpha(psi_a);
  EquivalenceReport report;
  for (std::size_t i = 0; i < box.n; ++i) {
    const double a = box.a_lo + (box.a_hi - box.a_lo) * static_cast<double>(i) / (box.n - 1);
    for (std::size_t k = 0; k < box.n; ++k) {
      const double phi =
          box.phi_lo + (box.phi_hi - box.phi_lo) * static_cast<double>(k) / (box.n - 1);
      const double lhs = apply_wdw_a(psi_a, a, phi, params);
      const double rhs = apply_wdw_alpha(psi_alpha, std::log(a), phi, params);
      const double scale = std::max({std::abs(lhs), std::abs(rhs), term_scale(psi_a, a, phi, params)});
      const double dev = scale == 0.0 ? 0.0 : std::abs(lhs - rhs) / scale;
      if (dev > report.max_relative_deviation || report.points == 0) {
        report.max_relative_deviation = std::max(report.max_relative_deviation, dev);
        report.worst_a = a;
        report.worst_phi = phi;
      }
      ++report.points;
    }
  }
  return report;
}

}  // namespace frw::wdw
