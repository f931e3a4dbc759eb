#pragma once

// Wheeler-DeWitt operators of the FRW minisuperspace with a massive scalar,
// applied pointwise to test wave functions, in the scale-factor coordinate a
// and in alpha = log a.

#include <cstddef>
#include <functional>
#include <vector>

namespace frw::wdw {

struct WDWParams {
  double hbar = 1.0;
  double m = 0.0;  // scalar mass, >= 0
  double Lambda = 0.0;

  /// Throws PreconditionError unless hbar > 0 and m >= 0.
  void validate() const;
  bool operator==(const WDWParams&) const = default;
};

/// First coordinate of a wave: the scale factor a or alpha = log a.
enum class Coordinate { A, Alpha };

/// psi and its partial derivatives at one point; index 1 is the gravitational
/// coordinate (a or alpha), index 2 is phi.
struct WaveJet {
  double value = 0.0;
  double d1 = 0.0;
  double d11 = 0.0;
  double d2 = 0.0;
  double d22 = 0.0;
};

struct TestWave {
  Coordinate coordinate = Coordinate::A;
  std::function<WaveJet(double x, double phi)> jet;
  bool analytic = true;  // false when derivatives come from finite differences

  WaveJet operator()(double x, double phi) const { return jet(x, phi); }
};

/// amplitude * exp(-ca (x - x0)^2 - cphi (phi - phi0)^2)
TestWave gaussian(Coordinate coordinate, double amplitude = 1.0, double ca = 1.0,
                  double cphi = 1.0, double x0 = 0.0, double phi0 = 0.0);

struct Monomial {
  double coeff = 1.0;
  int power_x = 0;  // >= 0
  int power_phi = 0;  // >= 0
};

/// sum_k coeff_k x^p_k phi^q_k
TestWave polynomial(Coordinate coordinate, std::vector<Monomial> terms);

TestWave constant(Coordinate coordinate, double value);

/// c1 psi1 + c2 psi2 (same coordinate required).
TestWave combine(double c1, const TestWave& psi1, double c2, const TestWave& psi2);

/// psi_alpha(alpha, phi) = psi_a(e^alpha, phi) with chain-rule derivatives
/// psi_alpha = a psi_a and psi_alphaalpha = a psi_a + a^2 psi_aa.
TestWave to_alpha(const TestWave& psi_a);

/// Same values as `psi`, derivatives by second-order central differences
/// with step h; flagged non-analytic.
TestWave finite_difference(const TestWave& psi, double h = 1e-4);

/// Largest relative gap between the wave's derivative evaluators and
/// central differences of its values at (x, phi).
double derivative_self_check(const TestWave& psi, double x, double phi, double h = 1e-4);

/// V(alpha, phi) = -e^{4 alpha} + e^{6 alpha} [m^2 phi^2 + Lambda/3].
/// Throws RangeError when the exponentials overflow.
double wdw_potential(double alpha, double phi, const WDWParams& params);

/// 1/2 [(hbar^2/a^2) d_a(a d_a psi) - (hbar^2/a^3) psi_phiphi
///      + (-a + Lambda a^3/3 + m^2 a^3 phi^2) psi].
/// Throws DomainError for a <= 0 and PreconditionError for an alpha-wave.
double apply_wdw_a(const TestWave& psi, double a, double phi, const WDWParams& params);

/// (e^{-3 alpha}/2) [hbar^2 psi_alphaalpha - hbar^2 psi_phiphi - e^{4 alpha} psi
///                   + e^{6 alpha} (m^2 phi^2 + Lambda/3) psi].
double apply_wdw_alpha(const TestWave& psi, double alpha, double phi, const WDWParams& params);

/// Coefficient of psi in the alpha operator, (e^{-3 alpha}/2) V(alpha, phi).
double zeroth_order_coefficient(double alpha, double phi, const WDWParams& params);

struct SampleBox {
  double a_lo = 0.5;
  double a_hi = 2.0;
  double phi_lo = -1.0;
  double phi_hi = 1.0;
  std::size_t n = 10;  // n x n tensor grid; n >= 2
};

struct EquivalenceReport {
  double max_relative_deviation = 0.0;
  double worst_a = 0.0;
  double worst_phi = 0.0;
  std::size_t points = 0;
};

/// Compares apply_wdw_a(psi_a, a, phi) with apply_wdw_alpha(to_alpha(psi_a),
/// log a, phi) on the grid. Deviation is |A - B| / max(|A|, |B|, S) with S
/// the summed magnitude of the operator terms, so points where the
/// terms cancel are not amplified. 0 when everything vanishes. Requires a_lo > 0.
EquivalenceReport change_of_variables_check(const TestWave& psi_a, const WDWParams& params,
                                            const SampleBox& box);

}  // namespace frw::wdw
