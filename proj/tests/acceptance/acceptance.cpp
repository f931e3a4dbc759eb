// One PASS/FAIL line per acceptance criterion. Reference values come from the
// oracles under tests/oracles; tolerances are fixed here and never scaled.

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "closed_forms.hpp"
#include "curvature_fd.hpp"
#include "frw/bransdicke.hpp"
#include "frw/errors.hpp"
#include "frw/flow.hpp"
#include "frw/friedmann.hpp"
#include "frw/geometry.hpp"
#include "frw/minisuperspace.hpp"
#include "frw/odekit.hpp"
#include "frw/output.hpp"
#include "frw/scenario.hpp"
#include "wdw_fd.hpp"

using namespace frw;
using geometry::SpatialCurvature;

namespace {

constexpr double kPi = oracle::kPi;

struct Criterion {
  int id;
  std::string title;
  bool ok = true;
  std::vector<std::string> details;

  void require(bool cond, const std::string& what) {
    details.push_back(fmt::format("{} {}", cond ? "ok  " : "BAD ", what));
    ok = ok && cond;
  }
  void note(const std::string& what) { details.push_back("    " + what); }
};

ode::IntegratorSettings tight() {
  ode::IntegratorSettings s;
  s.rel_tol = 1e-12;
  s.abs_tol = 1e-14;
  s.h_min = 1e-16;
  return s;
}

double rel(double x, double ref) { return std::abs(x - ref) / std::max(std::abs(ref), 1e-300); }

// ------------------------------------------------------------------ 1

void curvature(Criterion& c) {
  std::mt19937_64 rng(20261017);
  std::uniform_real_distribution<double> ua(0.5, 5.0), ud(-2.0, 2.0), ur(0.1, 0.9), uth(0.3, kPi - 0.3),
      ut(-1.0, 1.0);
  double worst = 0.0, decomposition = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double k = static_cast<double>(i % 3) - 1.0;
    const geometry::ScaleState s{ut(rng), ua(rng), ud(rng), ud(rng)};
    const double r = ur(rng), theta = uth(rng);
    const auto closed = geometry::curvature(s, SpatialCurvature(k), {r, theta, 0.0});
    oracle::Point<4> x;
    x << s.t, r, theta, 0.0;
    const auto fd = oracle::curvature_fd<4>(oracle::frw(s.t, s.a, s.a_dot, *s.a_ddot, k), x);
    for (int l = 0; l < 4; ++l) {
      for (int m = 0; m < 4; ++m) {
        for (int n = 0; n < 4; ++n) {
          const double v = closed.christoffel(l, m, n);
          worst = std::max(worst, std::abs(v - fd.gamma[l][m][n]) / std::max(1e-5, 1e-4 * std::abs(v)));
        }
        const double v = closed.ricci(l, m);
        worst = std::max(worst, std::abs(v - fd.ricci(l, m)) / std::max(1e-5, 1e-4 * std::abs(v)));
      }
    }
    // 4R from the oracle trace; 3R from the library, closed with 3 a''/a.
    double trace = 0.0;
    const auto g = oracle::frw(s.t, s.a, s.a_dot, *s.a_ddot, k)(x);
    for (int m = 0; m < 4; ++m) trace += closed.ricci(m, m) / g(m, m);
    const double R4 = 6.0 * (*s.a_ddot / s.a + s.hubble() * s.hubble() + k / (s.a * s.a));
    decomposition = std::max(decomposition, std::abs(R4 - (*closed.spatial_scalar_with_extrinsic + 3.0 * *s.a_ddot / s.a)) /
                                                std::max(1.0, std::abs(R4)));
    decomposition = std::max(decomposition, std::abs(trace - R4) / std::max(1.0, std::abs(R4)));
  }
  c.require(worst <= 1.0, fmt::format("worst closed-form vs finite-difference error = {:.3g} x max(1e-5, 1e-4|v|), "
                                      "200 points",
                                      worst));
  c.require(decomposition <= 1e-12, fmt::format("4R = 3R + 3a''/a residual = {:.3g} (<= 1e-12)", decomposition));
}

// ------------------------------------------------------------------ 2

flow::FlowProblem flow_problem(double k, double a0, double a_dot0, double T, flow::FlowFormulation f,
                               std::size_t points = 201) {
  flow::FlowProblem p;
  p.kappa = SpatialCurvature(k);
  p.formulation = f;
  p.a0 = a0;
  p.a_dot0 = a_dot0;
  p.t_end = T;
  p.settings = tight();
  p.grid = ode::uniform_grid({0.0, T}, points);
  return p;
}

void intrinsic(Criterion& c) {
  for (double k : {-1.0, 0.0, 1.0}) {
    const double T = k > 0 ? 0.24 : 1.0;
    const auto t = flow::integrate_flow(flow_problem(k, 1.0, 0.0, T, flow::FlowFormulation::intrinsic()));
    double worst = 0.0;
    for (const auto& row : t.samples) worst = std::max(worst, rel(row.a, oracle::intrinsic_a(1.0, k, row.t)));
    c.require(worst <= 1e-9, fmt::format("k = {:+.0f}: max |a - sqrt(a0^2 - 4kt)|/a = {:.3g} over [0, {}]", k, worst, T));
  }
  for (double a0 : {1.0, 2.0}) {
    const double crunch = oracle::intrinsic_crunch(a0, 1.0);
    const auto t = flow::integrate_flow(flow_problem(1.0, a0, 0.0, crunch + 1.0, flow::FlowFormulation::intrinsic()));
    const bool floor = t.terminal_event && t.terminal_event->kind == ode::EventKind::SingularityFloor;
    const double err = floor ? std::abs(t.terminal_event->t - crunch) : INFINITY;
    c.require(floor && err <= 1e-8,
              fmt::format("a0 = {}: crunch event at {:.12f}, a0^2/4 = {}, |error| = {:.3g}", a0,
                          floor ? t.terminal_event->t : NAN, crunch, err));
  }
}

// ------------------------------------------------------------------ 3

void flow_forms(Criterion& c) {
  const auto cal = flow::calibrate_sigma();
  c.note(fmt::format("sigma calibrated to {:+d}; published sign {:+d} is {} (residual {:.3g} vs {:.3g})",
                     static_cast<int>(cal.calibrated), static_cast<int>(cal.published),
                     cal.published_consistent() ? "consistent" : "inconsistent", cal.published_residual,
                     cal.calibrated_residual));
  c.require(cal.calibrated_residual <= 1e-12, "calibrated sign satisfies the reduction");

  double direct_hubble = 0.0, chi = 0.0, identity = 0.0;
  for (double k : {-1.0, 0.0, 1.0}) {
    const double T = k > 0 ? 0.3 : 1.0;
    const auto direct = flow::integrate_flow(flow_problem(k, 1.0, 0.5, T, flow::FlowFormulation::direct(), 1001));
    const auto hubble =
        flow::integrate_flow(flow_problem(k, 1.0, 0.5, T, flow::FlowFormulation::hubble(cal.calibrated), 1001));
    const std::size_t n = std::min(direct.samples.size(), hubble.samples.size());
    for (std::size_t i = 0; i < n; ++i) {
      const auto& d = direct.samples[i];
      const auto& h = hubble.samples[i];
      direct_hubble = std::max({direct_hubble, rel(h.a, d.a),
                                std::abs(h.hubble() - d.hubble()) / std::max(1.0, std::abs(d.hubble()))});
    }
    chi = std::max(chi, flow::chi_residual(direct, SpatialCurvature(k), cal.calibrated));
    identity = std::max(identity, flow::integral_identity(direct, SpatialCurvature(k), cal.calibrated).corrected());
  }
  c.require(direct_hubble <= 1e-6, fmt::format("direct vs Hubble form (calibrated sigma): {:.3g}", direct_hubble));
  c.require(chi <= 1e-6, fmt::format("chi-form residual: {:.3g}", chi));
  c.require(identity <= 1e-5, fmt::format("corrected integrating-factor identity: {:.3g}", identity));
}

// ------------------------------------------------------------------ 4

friedmann::FriedmannProblem friedmann_problem(std::vector<friedmann::FluidModel> fluids, double Lambda, double k,
                                              double T) {
  friedmann::FriedmannProblem p;
  p.background = {std::move(fluids), 1.0, Lambda, SpatialCurvature(k)};
  p.t_end = T;
  p.grid = ode::uniform_grid({0.0, T}, 1001);
  return p;
}

void friedmann_checks(Criterion& c) {
  using friedmann::FluidModel;
  double conservation = 0.0;
  for (double w : {0.0, 1.0 / 3.0, -1.0, 0.5}) {
    for (double k : {-1.0, 0.0}) {
      auto p = friedmann_problem({FluidModel{w, 0.3}}, 0.0, k, 100.0);
      p.settings = tight();
      const auto t = friedmann::integrate_friedmann(p);
      for (const auto& row : t.samples) {
        conservation = std::max(conservation, std::abs(*row.rho * std::pow(row.a, 3.0 * (1.0 + w)) - 0.3) / 0.3);
      }
    }
  }
  c.require(conservation <= 1e-8, fmt::format("rho a^(3(1+w)) relative variation: {:.3g}", conservation));

  // H^2 residual from the rows themselves, not from a library diagnostic.
  double drift = 0.0;
  for (double k : {-1.0, 0.0, 1.0}) {
    const auto t = friedmann::integrate_friedmann(
        friedmann_problem({FluidModel::dust(1.0), FluidModel::radiation(0.2)}, 0.1, k, 100.0));
    std::size_t rows = t.samples.size();
    if (t.terminal_event && t.terminal_event->kind == ode::EventKind::SingularityFloor) --rows;
    for (std::size_t i = 0; i < rows; ++i) {
      const auto& r = t.samples[i];
      const double H2 = r.hubble() * r.hubble();
      const double rhs = 8.0 * kPi / 3.0 * *r.rho - k / (r.a * r.a) + 0.1 / 3.0;
      drift = std::max(drift, std::abs(H2 - rhs) / std::max(1.0, H2));
    }
  }
  c.require(drift <= 1e-6, fmt::format("H^2 constraint drift over T = 100: {:.3g}", drift));

  double desitter = 0.0;
  const double omega = 1.3, Lambda = 3.0 * omega * omega;
  for (double k : {-1.0, 0.0, 1.0}) {
    for (double t : {0.2, 0.9, 2.0}) {
      const auto s = friedmann::desitter_solution(k, omega, t);
      const auto ref = oracle::de_sitter(k, omega, t);
      const double constraint = 3.0 * (s.a_dot * s.a_dot + k) / (s.a * s.a) - Lambda;
      const double accel = -2.0 * s.a_ddot / s.a - (s.a_dot * s.a_dot + k) / (s.a * s.a) + Lambda;
      desitter = std::max({desitter, std::abs(constraint) / Lambda, std::abs(accel) / Lambda, rel(s.a, ref.a),
                           rel(s.a_dot, ref.a_dot)});
    }
  }
  c.require(desitter <= 1e-12, fmt::format("de Sitter branches in the field equations: {:.3g}", desitter));

  const auto dust = friedmann::integrate_friedmann(friedmann_problem({FluidModel::dust(0.1)}, 0.0, 0.0, 100.0));
  double power = 0.0;
  for (const auto& row : dust.samples) power = std::max(power, rel(row.a, oracle::flat_dust_a(1.0, 0.1, 1.0, row.t)));
  c.require(power <= 1e-6, fmt::format("flat dust vs t^(2/3) law over T = 100: {:.3g}", power));
}

// ------------------------------------------------------------------ 5

void coupled(Criterion& c) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ua(0.3, 3.0), urho(0.01, 3.0), uw(-1.0, 1.0);
  double residual = 0.0, invariance = 0.0;
  int states = 0, sign_bad = 0;
  for (int i = 0; i < 300; ++i) {
    const double a = ua(rng), rho = urho(rng), P = uw(rng) * rho;
    std::vector<double> rates;
    for (double k : {-1.0, 0.0, 1.0}) {
      friedmann::CoupledChain ch;
      try {
        ch = friedmann::coupled_chain(a, rho, P, SpatialCurvature(k), 1.0);
      } catch (const InadmissibleStateError&) {
        continue;
      }
      ++states;
      // The chain is checked against 12 pi G (rho - P) and 8 pi G (P - rho) computed here.
      const double scale = std::max(1.0, std::abs(ch.flow_combination));
      residual = std::max(residual, std::abs(ch.flow_combination - 12.0 * kPi * (rho - P)) / scale);
      residual = std::max(residual, std::abs(ch.rate_from_flow - 8.0 * kPi * (P - rho)) /
                                        std::max(1.0, std::abs(ch.rate_from_flow)));
      rates.push_back(ch.rate_from_flow);
      if (P != rho && std::signbit(ch.rate_from_flow) != std::signbit(P - rho)) ++sign_bad;
    }
    for (double r : rates) invariance = std::max(invariance, std::abs(r - rates.front()) / std::max(1.0, std::abs(r)));
  }
  c.require(residual <= 1e-8, fmt::format("chain residuals on {} consistent states: {:.3g}", states, residual));
  c.require(invariance <= 1e-12, fmt::format("d(a^2)/dt independent of k: spread {:.3g}", invariance));
  c.require(sign_bad == 0, fmt::format("sign(d(a^2)/dt) = sign(P - rho): {} mismatches", sign_bad));
}

// ------------------------------------------------------------------ 6

bd::BDParams bd_fluid(double coupling, double w) {
  bd::BDParams p;
  p.coupling = coupling;
  p.matter = bd::FluidMatter{w};
  return p;
}

void bransdicke(Criterion& c) {
  double drift = 0.0, continuity = 0.0;
  for (int matter = 0; matter < 3; ++matter) {
    for (double k : {-1.0, 0.0, 1.0}) {
      bd::BDProblem p;
      p.kappa = SpatialCurvature(k);
      p.t_end = 20.0;
      p.grid = ode::uniform_grid({0.0, 20.0}, 401);
      p.initial = {0.0, 10.0, 0.5, 1.0, 0.1, 0.0, std::nullopt};
      if (matter == 2) {
        p.params.coupling = 10.0;
        p.params.matter = bd::InflatonMatter{bd::Polynomial{{0.0, 0.0, 0.5}}};
        p.initial.field = bd::InflatonField{1.0, 0.0};
        p.completion = bd::Completion::Hubble;
      } else {
        p.params = bd_fluid(10.0, matter == 0 ? 0.0 : 1.0 / 3.0);
        p.completion = bd::Completion::Rho;
      }
      const auto t = bd::integrate_bransdicke(p);
      drift = std::max(drift, t.max_abs_diagnostic("constraint"));
      if (matter == 2) {
        const auto gap = t.diagnostic_index("rho_continuity_gap").value();
        for (const auto& row : t.samples) {
          continuity = std::max(continuity, std::abs(row.diagnostics[gap]) / std::max(1.0, *row.rho));
        }
      }
    }
  }
  c.require(drift <= 1e-6, fmt::format("constraint drift over T = 20: {:.3g}", drift));

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ua(0.5, 3.0), uH(-1.0, 1.0), uphi(0.5, 2.0), ud(-0.5, 0.5), urho(0.0, 2.0),
      uw(1.0, 100.0);
  double algebraic = 0.0;
  for (int i = 0; i < 200; ++i) {
    bd::BDParams params = bd_fluid(uw(rng), i % 2 ? 0.0 : 1.0 / 3.0);
    params.V = bd::Polynomial{{0.1, 0.2, 0.05}};
    const bd::BDState s{0.0, ua(rng), uH(rng), uphi(rng), ud(rng), urho(rng), std::nullopt};
    const auto r = bd::bd_rhs(s, params, SpatialCurvature(static_cast<double>(i % 3 - 1)));
    const double kin = -(r.phi_ddot + 3.0 * s.H * s.phi_dot);
    const double dyn = bd::box_phi_dynamic(s, params);
    algebraic = std::max(algebraic, std::abs(kin - dyn) / std::max({1.0, std::abs(r.phi_ddot),
                                                                   std::abs(3.0 * s.H * s.phi_dot)}));
  }
  c.require(algebraic <= 1e-12, fmt::format("box phi identity on 200 random states: {:.3g}", algebraic));

  const double T = 5.0, rho0 = 0.1;
  const double a_gr = oracle::flat_dust_a(1.0, rho0, 1.0, T);
  const double h = 1e-4;
  const double H_gr = (oracle::flat_dust_a(1.0, rho0, 1.0, T + h) - oracle::flat_dust_a(1.0, rho0, 1.0, T - h)) /
                      (2.0 * h) / a_gr;
  std::vector<double> gaps;
  for (double w : {1e3, 1e4, 1e6}) {
    bd::BDProblem p;
    p.params = bd_fluid(w, 0.0);
    p.initial = {0.0, 1.0, 1.0, 1.0, 0.0, rho0, std::nullopt};
    p.completion = bd::Completion::Hubble;
    p.t_end = T;
    p.settings = tight();
    const auto end = bd::integrate_bransdicke(p).samples.back();
    gaps.push_back(std::max(rel(end.a, a_gr), rel(end.hubble(), H_gr)));
  }
  const double r1 = gaps[0] / gaps[1], r2 = std::sqrt(gaps[1] / gaps[2]);
  c.require(r1 >= 5.0 && r2 >= 5.0,
            fmt::format("GR-limit gap {:.3g}, {:.3g}, {:.3g} at w = 1e3, 1e4, 1e6; per-decade reduction {:.2f}, {:.2f}",
                        gaps[0], gaps[1], gaps[2], r1, r2));
  c.require(continuity <= 1e-8, fmt::format("inflaton: continuity-evolved rho vs field energy along T = 20: {:.3g}",
                                             continuity));

  // d/dt [psi'^2/2 + U(psi)] = psi' (psi'' + U') must equal -3H (rho + P) with rho + P = psi'^2.
  bd::BDParams inflaton;
  inflaton.coupling = 50.0;
  const bd::Polynomial U{{0.05, 0.1, 0.5, 0.02}};
  inflaton.matter = bd::InflatonMatter{U};
  double pointwise = 0.0;
  for (int i = 0; i < 200; ++i) {
    bd::BDState s{0.0, ua(rng), uH(rng), uphi(rng), ud(rng), 0.0, bd::InflatonField{ud(rng), ud(rng)}};
    const double psi = s.field->psi, dpsi = s.field->psi_dot;
    s.rho = 0.5 * dpsi * dpsi + U(psi);
    const auto r = bd::bd_rhs(s, inflaton, SpatialCurvature(static_cast<double>(i % 3 - 1)));
    const double lhs = dpsi * (r.psi_ddot + U.derivative(psi));
    const double rhs = -3.0 * s.H * dpsi * dpsi;
    pointwise = std::max(pointwise, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
  }
  c.require(pointwise <= 1e-8, fmt::format("inflaton: field equation vs continuity on 200 states: {:.3g}", pointwise));
}

// ------------------------------------------------------------------ 7

void wdw_check(Criterion& c) {
  const wdw::WDWParams prm{1.0, 1.0, 1.0};
  const wdw::SampleBox box{0.5, 2.0, -1.0, 1.0, 10};
  const oracle::WdwConstants constants{1.0, 1.0, 1.0};
  for (const auto& [name, psi] : {std::pair{"Gaussian", wdw::gaussian(wdw::Coordinate::A)},
                                  std::pair{"a^2 phi", wdw::polynomial(wdw::Coordinate::A, {{1.0, 2, 1}})}}) {
    const auto rep = wdw::change_of_variables_check(psi, prm, box);
    c.require(rep.points >= 100 && rep.max_relative_deviation <= 1e-8,
              fmt::format("{}: a-form vs alpha-form on {} points, deviation {:.3g}", name, rep.points,
                          rep.max_relative_deviation));
    // Both forms against the value-only finite-difference oracle.
    const auto values = [&psi](double a, double phi) { return psi(a, phi).value; };
    const auto alpha_values = [&psi](double al, double phi) { return psi(std::exp(al), phi).value; };
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 10; ++j) {
        const double a = 0.5 + 1.5 * i / 9.0, phi = -1.0 + 2.0 * j / 9.0;
        const double ref_a = oracle::wdw_a_fd(values, a, phi, constants);
        const double ref_alpha = oracle::wdw_alpha_fd(alpha_values, std::log(a), phi, constants);
        const double scale = std::max(1.0, std::abs(ref_a));
        worst = std::max({worst, std::abs(wdw::apply_wdw_a(psi, a, phi, prm) - ref_a) / scale,
                          std::abs(ref_alpha - ref_a) / scale});
      }
    }
    c.require(worst <= 1e-5, fmt::format("{}: both forms vs finite-difference oracle: {:.3g}", name, worst));
  }
}

// ------------------------------------------------------------------ 8

void numerics(Criterion& c) {
  const ode::VectorField osc = [](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
  };
  std::vector<double> errs;
  for (std::size_t n : {8u, 16u, 32u, 64u}) errs.push_back(std::abs(ode::rk4(osc, {1.0, 0.0}, {0.0, 2.0}, n)[0] - std::cos(2.0)));
  double order = INFINITY;
  for (std::size_t i = 1; i < errs.size(); ++i) order = std::min(order, std::log2(errs[i - 1] / errs[i]));
  c.require(order >= 4.0, fmt::format("RK4 observed order under step halving (n = 8..64): min {:.4f}", order));

  Scenario s;
  s.kappa = 1.0;
  s.t_end = 10.0;
  FriedmannConfig f;
  f.fluids = {friedmann::FluidModel::dust(0.5), friedmann::FluidModel::radiation(0.1)};
  s.model = f;
  const std::string first = to_csv(run_scenario(s).trajectory);
  const std::string second = to_csv(run_scenario(s).trajectory);
  c.require(first == second && !first.empty(), fmt::format("identical configs give identical CSV ({} bytes)", first.size()));
}

}  // namespace

int main() {
  struct Item {
    Criterion c;
    void (*run)(Criterion&);
  };
  std::vector<Item> items = {
      {{1, "curvature closed forms and decomposition"}, curvature},
      {{2, "intrinsic flow closed form and crunch time"}, intrinsic},
      {{3, "flow formulations, sigma and integral identity"}, flow_forms},
      {{4, "Friedmann conservation, constraint, de Sitter, dust"}, friedmann_checks},
      {{5, "coupled flow chain"}, coupled},
      {{6, "Brans-Dicke drift, identity, GR limit, inflaton"}, bransdicke},
      {{7, "Wheeler-DeWitt change of variables"}, wdw_check},
      {{8, "RK4 order and CSV determinism"}, numerics},
  };
  int failed = 0;
  for (auto& item : items) {
    try {
      item.run(item.c);
    } catch (const std::exception& e) {
      item.c.require(false, std::string("exception: ") + e.what());
    }
    std::printf("%s %d %s\n", item.c.ok ? "PASS" : "FAIL", item.c.id, item.c.title.c_str());
    for (const auto& d : item.c.details) std::printf("       %s\n", d.c_str());
    failed += item.c.ok ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(items.size()) - failed, items.size());
  return failed == 0 ? 0 : 1;
}
