#pragma once

// Wheeler-DeWitt operators evaluated from values of psi only, with the radial
// part in conservative form d_a(a d_a psi) differenced over half steps.

#include <cmath>
#include <functional>

namespace oracle {

using Wave = std::function<double(double x, double phi)>;

struct WdwConstants {
  double hbar = 1.0;
  double m = 0.0;
  double Lambda = 0.0;
};

inline double wdw_a_fd(const Wave& psi, double a, double phi, const WdwConstants& c,
                       double h = 1e-4) {
  const double p0 = psi(a, phi);
  const double flux_hi = (a + 0.5 * h) * (psi(a + h, phi) - p0) / h;
  const double flux_lo = (a - 0.5 * h) * (p0 - psi(a - h, phi)) / h;
  const double radial = (flux_hi - flux_lo) / h;
  const double pp = (psi(a, phi + h) - 2.0 * p0 + psi(a, phi - h)) / (h * h);
  const double a3 = a * a * a;
  const double h2 = c.hbar * c.hbar;
  return 0.5 * (h2 * radial / (a * a) - h2 * pp / a3 +
                (-a + c.Lambda * a3 / 3.0 + c.m * c.m * a3 * phi * phi) * p0);
}

inline double wdw_alpha_fd(const Wave& psi, double alpha, double phi, const WdwConstants& c,
                           double h = 1e-4) {
  const double p0 = psi(alpha, phi);
  const double aa = (psi(alpha + h, phi) - 2.0 * p0 + psi(alpha - h, phi)) / (h * h);
  const double pp = (psi(alpha, phi + h) - 2.0 * p0 + psi(alpha, phi - h)) / (h * h);
  const double h2 = c.hbar * c.hbar;
  const double V = -std::exp(4.0 * alpha) +
                   std::exp(6.0 * alpha) * (c.m * c.m * phi * phi + c.Lambda / 3.0);
  return 0.5 * std::exp(-3.0 * alpha) * (h2 * aa - h2 * pp + V * p0);
}

}  // namespace oracle
