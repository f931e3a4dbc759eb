#include "frw/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "frw/bransdicke.hpp"
#include "frw/errors.hpp"
#include "frw/flow.hpp"
#include "frw/friedmann.hpp"
#include "frw/geometry.hpp"
#include "frw/minisuperspace.hpp"

namespace frw {

namespace {

constexpr double kPi = std::numbers::pi;

using geometry::SpatialCurvature;

class Recorder {
 public:
  Recorder(VerifyReport& report, std::string suite, double tol_scale)
      : report_(report), suite_(std::move(suite)), scale_(tol_scale) {}

  void check(std::string name, double measured, double tolerance, std::string note = {}) {
    const double tol = tolerance * scale_;
    report_.checks.push_back(
        {suite_, std::move(name), measured, tol, std::isfinite(measured) && measured <= tol, false,
         std::move(note)});
  }

  // Lower bound instead of upper bound (ratios that must be large enough).
  void check_at_least(std::string name, double measured, double minimum, std::string note = {}) {
    const double bound = minimum / scale_;
    report_.checks.push_back({suite_, std::move(name), measured, bound,
                              std::isfinite(measured) && measured >= bound, false,
                              "lower bound" + (note.empty() ? "" : "; " + note)});
  }

  void info(std::string name, double value, std::string note = {}) {
    report_.checks.push_back({suite_, std::move(name), value, 0.0, true, true, std::move(note)});
  }

 private:
  VerifyReport& report_;
  std::string suite_;
  double scale_;
};

double rel_gap(double x, double y) {
  const double scale = std::max({1e-300, std::abs(x), std::abs(y)});
  return x == y ? 0.0 : std::abs(x - y) / scale;
}

ode::IntegratorSettings tight_settings() {
  ode::IntegratorSettings s;
  s.abs_tol = 1e-14;
  s.rel_tol = 1e-12;
  s.h_min = 1e-16;
  return s;
}

// ---------------------------------------------------------------- geometry

void geometry_suite(Recorder& rec) {
  std::mt19937_64 rng(20260417);
  std::uniform_real_distribution<double> ua(0.5, 2.0), uad(-1.0, 1.0), uth(0.2, kPi - 0.2),
      uph(0.0, 2.0 * kPi), ur(0.05, 0.9);
  std::uniform_int_distribution<int> uk(-1, 1);

  double worst = 0.0, decomposition = 0.0, trace = 0.0, asym = 0.0, spatial = 0.0;
  constexpr int kPoints = 200;
  for (int i = 0; i < kPoints; ++i) {
    const SpatialCurvature kappa(uk(rng));
    const geometry::ScaleState s{0.3, ua(rng), uad(rng), uad(rng)};
    const geometry::SpacePoint p{ur(rng), uth(rng), uph(rng)};
    const auto closed = geometry::curvature(s, kappa, p);
    const auto oracle =
        geometry::numeric_curvature_oracle(geometry::frw_metric(s, kappa), geometry::frw_coordinates(s.t, p));
    auto measure = [&](double c, double o) {
      worst = std::max(worst, std::abs(c - o) / std::max(1e-5, 1e-4 * std::abs(c)));
    };
    for (int l = 0; l < 4; ++l) {
      for (int m = 0; m < 4; ++m) {
        for (int n = 0; n < 4; ++n) measure(closed.christoffel(l, m, n), oracle.christoffel(l, m, n));
        measure(closed.ricci(l, m), oracle.ricci(l, m));
      }
    }
    measure(*closed.ricci_scalar_4, *oracle.ricci_scalar_4);

    const auto scalars = geometry::ricci_scalar_4(s, kappa);
    decomposition = std::max(decomposition,
                             rel_gap(scalars.four, scalars.spatial_with_extrinsic + 3.0 * *s.a_ddot / s.a));
    trace = std::max(trace, rel_gap(*closed.ricci_scalar_4, scalars.four));
    asym = std::max(asym, geometry::lower_index_asymmetry(closed.christoffel));

    // Intrinsic 3-metric: R_ij = 2 k gamma_ij, so R = 6 k / a^2.
    const auto spatial_oracle = geometry::numeric_curvature_oracle(
        geometry::spatial_metric(kappa, s.a), Eigen::Vector3d(p.r, p.theta, p.phi));
    const Eigen::MatrixXd g = geometry::spatial_metric(kappa, s.a)(Eigen::Vector3d(p.r, p.theta, p.phi));
    const double r3 = (g.inverse() * spatial_oracle.ricci).trace();
    spatial = std::max(spatial, std::abs(r3 - scalars.spatial_intrinsic) /
                                    std::max(1e-5, 1e-4 * std::abs(scalars.spatial_intrinsic)));
  }
  rec.check("closed_form_vs_fd_oracle", worst, 1.0,
            "max |closed - oracle| / max(1e-5, 1e-4 |closed|) over Gamma, R_mn, R at 200 points");
  rec.check("scalar_decomposition", decomposition, 1e-12, "4R = spatial part + 3 a''/a");
  rec.check("ricci_trace_vs_scalar", trace, 1e-12, "g^mn R_mn vs 6[a''/a + H^2 + k/a^2]");
  rec.check("christoffel_lower_symmetry", asym, 1e-15);
  rec.check("intrinsic_spatial_scalar_vs_oracle", spatial, 1.0,
            "3-metric R vs 6k/a^2, normalised like the oracle check");
}

// -------------------------------------------------------------------- flow

struct FlowCase {
  double kappa;
  double a_dot0;
};

// Rows strictly before a terminal floor event. The row written at the event
// holds the last accepted state, within the event tolerance of a = 0, where
// relative comparisons carry no information.
std::size_t rows_before_floor(const Trajectory& t) {
  const bool floor = t.terminal_event && t.terminal_event->kind == ode::EventKind::SingularityFloor;
  std::size_t n = t.samples.size();
  if (floor && n > 0 && t.samples.back().t >= t.terminal_event->t_lo) --n;
  return n;
}

double max_abs_before_floor(const Trajectory& t, const std::string& name) {
  const std::size_t col = t.diagnostic_index(name).value();
  const std::size_t n = rows_before_floor(t);
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(t.samples[i].diagnostics[col]));
  return m;
}

void flow_suite(Recorder& rec) {
  const flow::SigmaCalibration cal = flow::calibrate_sigma();
  rec.check("sigma_calibration_residual", cal.calibrated_residual, 1e-12,
            fmt::format("calibrated sigma = {:+d}", static_cast<int>(cal.calibrated)));
  rec.info("sigma_published_residual", cal.published_residual,
           fmt::format("published sigma = {:+d}; published sign {} with the direct flow equation",
                       static_cast<int>(cal.published),
                       cal.published_consistent() ? "is consistent" : "is NOT consistent"));

  // Intrinsic flow against sqrt(a0^2 - 4 k t); k = 1 is compared up to t = 0.24
  // because relative error in a is unbounded at the crunch itself.
  double intrinsic = 0.0;
  for (int k : {-1, 0, 1}) {
    flow::FlowProblem p;
    p.kappa = SpatialCurvature(k);
    p.formulation = flow::FlowFormulation::intrinsic();
    p.a0 = 1.0;
    p.t_end = k == 1 ? 0.24 : 2.0;
    p.settings = tight_settings();
    p.grid = ode::uniform_grid({0.0, p.t_end}, 241);
    intrinsic = std::max(intrinsic, flow::integrate_flow(p).max_abs_diagnostic("rel_err_exact"));
  }
  rec.check("intrinsic_vs_closed_form", intrinsic, 1e-9, "k in {-1, 0, 1}, a0 = 1");

  {
    flow::FlowProblem p;
    p.kappa = SpatialCurvature(1.0);
    p.formulation = flow::FlowFormulation::intrinsic();
    p.a0 = 1.0;
    p.t_end = 1.0;
    p.settings = tight_settings();
    const Trajectory t = flow::integrate_flow(p);
    const bool floor = t.terminal_event && t.terminal_event->kind == ode::EventKind::SingularityFloor;
    rec.check("intrinsic_crunch_time", floor ? std::abs(t.terminal_event->t - 0.25) : INFINITY, 1e-8,
              floor ? fmt::format("singularity-floor at t = {:.15g}", t.terminal_event->t)
                    : "no singularity-floor event");
    if (floor) {
      rec.check("intrinsic_crunch_bracket", t.terminal_event->t_hi - t.terminal_event->t_lo,
                ode::kEventBracket);
    }
  }

  const double T = 2.0;
  const auto grid = ode::uniform_grid({0.0, T}, 2001);
  double hubble_gap = 0.0, chi_res = 0.0, flow_res = 0.0, identity = 0.0, chi_form_gap = 0.0;
  flow::IntegralIdentityReport published{};
  for (double k : {-1.0, 0.0, 1.0}) {
    for (double ad : {-0.5, 0.0, 0.5}) {
      flow::FlowProblem p;
      p.kappa = SpatialCurvature(k);
      p.a0 = 1.0;
      p.a_dot0 = ad;
      p.t_end = T;
      p.settings = tight_settings();
      p.grid = grid;
      const Trajectory direct = flow::integrate_flow(p);
      p.formulation = flow::FlowFormulation::hubble(cal.calibrated);
      const Trajectory hubble = flow::integrate_flow(p);
      p.formulation = flow::FlowFormulation::chi(cal.calibrated);
      const Trajectory chi = flow::integrate_flow(p);

      const bool regular = !direct.terminal_event && !chi.terminal_event;
      const std::size_t n = std::min(rows_before_floor(direct), rows_before_floor(hubble));
      for (std::size_t i = 0; i < n; ++i) {
        hubble_gap = std::max(hubble_gap, rel_gap(direct.samples[i].a, hubble.samples[i].a));
      }
      if (regular) {
        for (std::size_t i = 0; i < direct.samples.size(); ++i) {
          chi_form_gap = std::max(chi_form_gap, rel_gap(direct.samples[i].a, chi.samples[i].a));
        }
        const auto rep = flow::integral_identity(direct, p.kappa, cal.calibrated);
        identity = std::max(identity, rep.corrected());
        published.published_chi_rate = std::max(published.published_chi_rate, rep.published_chi_rate);
        published.published_scale_rate =
            std::max(published.published_scale_rate, rep.published_scale_rate);
        published.published_volume = std::max(published.published_volume, rep.published_volume);
      }
      for (const Trajectory* t : {&direct, &hubble, &chi}) {
        chi_res = std::max(chi_res, max_abs_before_floor(*t, "chi_residual"));
        flow_res = std::max(flow_res, max_abs_before_floor(*t, "flow_residual"));
      }
    }
  }
  rec.check("direct_vs_hubble_form", hubble_gap, 1e-6, "relative gap in a, calibrated sigma, 9 cases, rows before a floor event");
  rec.check("direct_vs_chi_form", chi_form_gap, 1e-6, "relative gap in a on runs without events");
  rec.check("chi_equation_residual", chi_res, 1e-6, "relative to the largest term, rows before a floor event");
  rec.check("flow_equation_residual", flow_res, 1e-8, "relative to the largest term, rows before a floor event");
  rec.check("integrating_factor_identity", identity, 1e-5,
            "mu = exp(-sigma int a^2/3 dtau), runs without events");
  rec.info("published_chi_rate_residual", published.published_chi_rate,
           "chi_tau = e^{-tau}[c + (2k/3) int a] taken literally");
  rec.info("published_scale_rate_residual", published.published_scale_rate,
           "2a^2 a_tau = e^{-int a^2/3}[c + (2k/3) int a] taken literally");
  rec.info("published_volume_residual", published.published_volume,
           "a^3 = a0^3 + int e^{-int a^2/3}[...] taken literally");

  {
    flow::FlowProblem p;
    p.kappa = SpatialCurvature(0.0);
    p.a0 = 1.0;
    p.a_dot0 = 0.5;
    p.t_end = 1.0;
    p.settings = tight_settings();
    p.grid = ode::uniform_grid({0.0, 1.0}, 101);
    const Trajectory direct = flow::integrate_flow(p);
    p.formulation = flow::FlowFormulation::hubble(cal.published);
    const Trajectory literal = flow::integrate_flow(p);
    double gap = 0.0;
    const std::size_t n = std::min(direct.samples.size(), literal.samples.size());
    for (std::size_t i = 0; i < n; ++i) gap = std::max(gap, rel_gap(direct.samples[i].a, literal.samples[i].a));
    rec.info("published_hubble_form_trajectory_gap", gap,
             "relative gap in a, k = 0, a0 = 1, a0' = 0.5, T = 1, published sigma");
  }
}

// --------------------------------------------------------------- friedmann

void friedmann_suite(Recorder& rec) {
  using friedmann::FluidModel;
  {
    const auto d = friedmann::fluid_density(2.0, FluidModel::dust(8.0));
    const auto r = friedmann::fluid_density(2.0, FluidModel::radiation(16.0));
    const auto v = friedmann::fluid_density(3.7, FluidModel::vacuum(5.0));
    const double gap = std::max({std::abs(d.rho - 1.0), std::abs(d.pressure), std::abs(r.rho - 1.0),
                                 std::abs(r.pressure - 1.0 / 3.0), std::abs(v.rho - 5.0),
                                 std::abs(v.pressure + 5.0)});
    rec.check("density_laws", gap, 1e-15, "dust a^-3, radiation a^-4, vacuum a^0");
  }

  struct Run {
    std::vector<FluidModel> fluids;
    double Lambda;
    double kappa;
  };
  const Run runs[] = {
      {{FluidModel::dust(1.0)}, 0.0, 0.0},
      {{FluidModel::radiation(1.0)}, 0.0, 0.0},
      {{FluidModel::dust(1.0)}, 0.0, -1.0},
      {{FluidModel::radiation(0.5)}, 0.0, 1.0},
      {{FluidModel::dust(1.0), FluidModel::radiation(0.1)}, 0.0, 1.0},
      {{FluidModel::dust(0.1), FluidModel::vacuum(0.01)}, 0.0, 0.0},
  };
  // Drift is judged at default tolerances; conservation needs tight ones on the
  // runs that end at a floor, where a is within 1e-7 of the crunch.
  double conservation = 0.0, drift = 0.0;
  for (const auto& r : runs) {
    friedmann::FriedmannProblem p;
    p.background = {r.fluids, 1.0, r.Lambda, SpatialCurvature(r.kappa)};
    p.t_end = 100.0;
    p.grid = ode::uniform_grid({0.0, 100.0}, 1001);
    drift = std::max(drift, friedmann::integrate_friedmann(p).max_abs_diagnostic("constraint"));
    p.settings = tight_settings();
    conservation =
        std::max(conservation, friedmann::integrate_friedmann(p).max_abs_diagnostic("conservation"));
  }
  rec.check("density_conservation", conservation, 1e-8,
            "max |rho a^{3(1+w)}/rho0 - 1|, T = 100, tight tolerances");
  rec.check("constraint_drift", drift, 1e-6, "|H^2 - [...]| / max(1, H^2), T = 100, default tolerances");

  {
    double worst = 0.0;
    for (double k : {-1.0, 0.0, 1.0}) {
      for (double omega : {0.5, 1.0, 2.0}) {
        for (double t : {0.1, 0.5, 1.0, 2.0}) {
          const auto pt = friedmann::desitter_solution(k, omega, t);
          const auto res = friedmann::desitter_residuals(k, omega, t);
          const double scale = std::max(1.0, omega * omega * pt.a * pt.a);
          worst = std::max({worst, std::abs(res.constraint) / std::max(1.0, omega * omega),
                            std::abs(res.acceleration) / std::max(1.0, omega * omega),
                            std::abs(res.first_integral) / scale});
        }
      }
    }
    rec.check("de_sitter_branches", worst, 1e-12, "k in {-1, 0, 1}; constraint, acceleration, first integral");
  }

  auto closed_form_gap = [](const Trajectory& t) {
    const auto idx = *t.diagnostic_index("a_exact");
    double gap = 0.0;
    for (const auto& row : t.samples) gap = std::max(gap, rel_gap(row.a, row.diagnostics[idx]));
    return gap;
  };
  {
    friedmann::FriedmannProblem p;
    p.background = {{FluidModel::dust(1.0)}, 1.0, 0.0, SpatialCurvature(0.0)};
    p.t_end = 100.0;
    p.grid = ode::uniform_grid({0.0, 100.0}, 1001);
    rec.check("dust_flat_power_law", closed_form_gap(friedmann::integrate_friedmann(p)), 1e-6,
              "a = (1 + 3 H0 t / 2)^{2/3}, T = 100");
  }
  {
    friedmann::FriedmannProblem p;
    p.background = {{}, 1.0, 3.0, SpatialCurvature(0.0)};
    p.t_end = 5.0;
    p.grid = ode::uniform_grid({0.0, 5.0}, 501);
    rec.check("vacuum_exponential", closed_form_gap(friedmann::integrate_friedmann(p)), 1e-6,
              "Lambda = 3, a = e^t");
  }

  {
    const double H = 0.7, a = 1.3;
    const double crit = 3.0 * H * H / (8.0 * kPi);
    const auto flat = friedmann::classify_omega(crit, H, a, SpatialCurvature(0.0), 1.0);
    const auto closed = friedmann::classify_omega(2.0 * crit, H, a, SpatialCurvature(H * H * a * a), 1.0);
    const auto open = friedmann::classify_omega(0.0, H, a, SpatialCurvature(-H * H * a * a), 1.0);
    const bool labels = flat.label == friedmann::OmegaLabel::Flat &&
                        closed.label == friedmann::OmegaLabel::Closed &&
                        open.label == friedmann::OmegaLabel::Open;
    rec.check("omega_classification", labels ? std::max({flat.identity_residual, closed.identity_residual,
                                                         open.identity_residual})
                                             : INFINITY,
              1e-12, "critical, twice critical, empty open");
  }

  {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> ua(0.3, 3.0), urho(0.0, 2.0), uw(-1.0, 1.0);
    double combined = 0.0, rate = 0.0, invariance = 0.0;
    std::size_t tested = 0, sign_ok = 0;
    while (tested < 200) {
      const double a = ua(rng), rho = urho(rng), P = uw(rng) * rho;
      double first = NAN;
      bool admissible = true;
      for (double k : {-1.0, 0.0, 1.0}) {
        if (friedmann::friedmann_h_squared(a, rho, SpatialCurvature(k), 0.0, 1.0) < 0.0) admissible = false;
      }
      if (!admissible) continue;
      for (double k : {-1.0, 0.0, 1.0}) {
        const auto c = friedmann::coupled_chain(a, rho, P, SpatialCurvature(k), 1.0);
        const double scale = std::max(1.0, 12.0 * kPi * (rho + std::abs(P)));
        combined = std::max(combined, std::abs(c.combined_residual) / scale);
        rate = std::max(rate, std::abs(c.rate_residual) / scale);
        if (std::isnan(first)) first = c.rate_from_flow;
        invariance = std::max(invariance, rel_gap(first, c.rate_from_flow));
        const double expected = P - rho;
        const bool ok = (c.rate_from_flow > 0) == (expected > 0) && (c.rate_from_flow < 0) == (expected < 0);
        sign_ok += ok ? 1 : 0;
      }
      ++tested;
    }
    rec.check("flow_friedmann_combination", combined, 1e-8,
              "3a''/a + 6H^2 + 6k/a^2 - 12 pi G (rho - P), 200 states x 3 k");
    rec.check("coupled_rate", rate, 1e-8, "d(a^2)/dt vs 8 pi G (P - rho)");
    rec.check("coupled_rate_k_invariance", invariance, 1e-8);
    rec.check("coupled_rate_sign", static_cast<double>(600 - sign_ok), 0.0,
              "states where sign d(a^2)/dt != sign(P - rho)");
  }

  {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> ua(0.3, 3.0), urho(0.0, 1.0), uL(-1.0, 3.0);
    std::size_t tested = 0, upper = 0, published = 0;
    while (tested < 200) {
      const double a = ua(rng), rho = urho(rng), L = uL(rng);
      const SpatialCurvature k(static_cast<double>(static_cast<int>(tested % 3) - 1));
      if ((8.0 * kPi / 3.0) * rho + L / 3.0 < k.value() / (a * a)) continue;
      const auto b = friedmann::repulsive_bound(a, k, L, rho, 1.0);
      upper += b.upper_bound_holds ? 1 : 0;
      published += b.published_direction_holds ? 1 : 0;
      ++tested;
    }
    rec.check("repulsive_upper_bound", static_cast<double>(200 - upper), 0.0,
              "admissible states violating 2a''/a <= Lambda - k/a^2");
    rec.info("repulsive_published_direction", static_cast<double>(published),
             "admissible states (of 200) satisfying 2a''/a >= Lambda - k/a^2 as printed");
  }
}

// ------------------------------------------------------------ brans-dicke

bd::BDParams bd_fluid(double coupling, double w) {
  bd::BDParams p;
  p.coupling = coupling;
  p.matter = bd::FluidMatter{w};
  return p;
}

bd::BDParams bd_inflaton(double coupling) {
  bd::BDParams p;
  p.coupling = coupling;
  p.matter = bd::InflatonMatter{bd::Polynomial{{0.0, 0.0, 0.5}}};
  return p;
}

void bransdicke_suite(Recorder& rec) {
  double drift = 0.0, ricci = 0.0, continuity = 0.0;
  for (int matter = 0; matter < 3; ++matter) {
    for (double k : {-1.0, 0.0, 1.0}) {
      bd::BDProblem p;
      p.kappa = SpatialCurvature(k);
      p.t_end = 20.0;
      p.grid = ode::uniform_grid({0.0, 20.0}, 401);
      p.initial = {0.0, 10.0, 0.5, 1.0, 0.1, 0.0, std::nullopt};
      if (matter == 2) {
        p.params = bd_inflaton(10.0);
        p.initial.field = bd::InflatonField{1.0, 0.0};
        p.completion = bd::Completion::Hubble;
      } else {
        p.params = bd_fluid(10.0, matter == 0 ? 0.0 : 1.0 / 3.0);
        p.completion = bd::Completion::Rho;
      }
      const Trajectory t = bd::integrate_bransdicke(p);
      drift = std::max(drift, t.max_abs_diagnostic("constraint"));
      ricci = std::max(ricci, t.max_abs_diagnostic("ricci_gap"));
      if (matter == 2) continuity = std::max(continuity, t.max_abs_diagnostic("rho_continuity_gap"));
    }
  }
  rec.check("constraint_drift", drift, 1e-6, "dust, radiation, inflaton x k in {-1, 0, 1}, T = 20");
  rec.info("ricci_gap_along_trajectories", ricci,
           "matter-side minus geometric R; grows with the constraint drift");
  rec.check("inflaton_continuity", continuity, 1e-8, "rho evolved by continuity vs rho(psi, psi')");

  {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> ua(0.5, 3.0), uH(-1.0, 1.0), uphi(0.5, 2.0), ud(-0.5, 0.5),
        urho(0.0, 2.0), uw(1.0, 100.0);
    double triangle = 0.0;
    for (int i = 0; i < 200; ++i) {
      bd::BDParams params = i % 2 ? bd_fluid(uw(rng), 1.0 / 3.0) : bd_inflaton(uw(rng));
      params.V = bd::Polynomial{{0.1, 0.2, 0.05}};
      bd::BDState s{0.0, ua(rng), uH(rng), uphi(rng), ud(rng), urho(rng), std::nullopt};
      if (params.is_inflaton()) s.field = bd::InflatonField{ud(rng), ud(rng)};
      const SpatialCurvature k(static_cast<double>(i % 3 - 1));
      const bd::BDRates r = bd::bd_rhs(s, params, k);
      const double kin = bd::box_phi_kinematic(r.phi_ddot, s.H, s.phi_dot);
      const double dyn = bd::box_phi_dynamic(s, params);
      const double scale = std::max({1.0, std::abs(r.phi_ddot), std::abs(3.0 * s.H * s.phi_dot)});
      triangle = std::max(triangle, std::abs(kin - dyn) / scale);
    }
    rec.check("box_phi_triangle", triangle, 1e-12, "kinematic box phi with phi'' from the evolution vs dynamic");

    // The trace identity needs the constraint, so H is completed from it.
    double ricci_state = 0.0;
    int tested = 0;
    for (int i = 0; i < 400 && tested < 200; ++i) {
      bd::BDParams params = i % 2 ? bd_fluid(uw(rng), i % 4 == 1 ? 0.0 : 1.0 / 3.0) : bd_inflaton(uw(rng));
      params.V = bd::Polynomial{{0.1, 0.2, 0.05}};
      bd::BDState s{0.0, ua(rng), uH(rng), uphi(rng), ud(rng), urho(rng), std::nullopt};
      if (params.is_inflaton()) s.field = bd::InflatonField{ud(rng), ud(rng)};
      const SpatialCurvature k(static_cast<double>(i % 3 - 1));
      try {
        s = bd::complete_initial_data(s, params, k, bd::Completion::Hubble);
      } catch (const InadmissibleStateError&) {
        continue;
      }
      const bd::BDRicci r = bd::bd_ricci_scalar(s, params, k);
      ricci_state = std::max(ricci_state, std::abs(r.difference) /
                                              std::max({1.0, std::abs(r.from_matter), std::abs(r.from_geometry)}));
      ++tested;
    }
    rec.check("ricci_two_ways", ricci_state, 1e-12,
              fmt::format("matter-side vs 6[H' + 2H^2 + k/a^2], {} states on the constraint", tested));
    if (tested < 100) rec.check("ricci_two_ways_sample_size", tested, 100.0, "too few admissible states");
  }

  {
    // GR limit: phi0 = 1/G, phi0' = 0, dust, k = 0, against Friedmann with G = 1.
    const double T = 5.0;
    friedmann::FriedmannProblem fp;
    fp.background = {{friedmann::FluidModel::dust(0.1)}, 1.0, 0.0, SpatialCurvature(0.0)};
    fp.t_end = T;
    fp.settings = tight_settings();
    const Trajectory gr = friedmann::integrate_friedmann(fp);
    const Sample& end_gr = gr.samples.back();
    std::vector<double> gaps;
    for (double w : {1e3, 1e4, 1e6}) {
      bd::BDProblem p;
      p.params = bd_fluid(w, 0.0);
      p.kappa = SpatialCurvature(0.0);
      p.initial = {0.0, 1.0, 1.0, 1.0, 0.0, 0.1, std::nullopt};
      p.completion = bd::Completion::Hubble;
      p.t_end = T;
      p.settings = tight_settings();
      const Trajectory t = bd::integrate_bransdicke(p);
      const Sample& end = t.samples.back();
      gaps.push_back(std::max(rel_gap(end.a, end_gr.a), rel_gap(end.hubble(), end_gr.hubble())));
    }
    rec.info("gr_limit_gap_w1e3", gaps[0]);
    rec.info("gr_limit_gap_w1e4", gaps[1]);
    rec.info("gr_limit_gap_w1e6", gaps[2]);
    rec.check_at_least("gr_limit_ratio_1e3_1e4", gaps[0] / gaps[1], 5.0, "per decade of w");
    rec.check_at_least("gr_limit_ratio_1e4_1e6", std::sqrt(gaps[1] / gaps[2]), 5.0,
                       "per decade of w (geometric mean over two decades)");
    rec.check("gr_limit_gap_w1e6_bound", gaps[2], 1e-3, "terminal (a, H) vs Friedmann dust, T = 5");
  }

  {
    bd::BDParams params = bd_fluid(10.0, 0.0);
    params.V = bd::Polynomial{{0.1, 0.2, 0.05}};
    const bd::BDState s{0.0, 1.2, 0.4, 1.5, 0.2, 0.3, std::nullopt};
    const SpatialCurvature k(0.0);
    const double corrected = bd::bd_rhs(s, params, k).H_dot;
    const double literal = bd::h_dot_published_denominator(s, params, k);
    rec.info("literal_potential_denominator_gap", std::abs(literal - corrected),
             "|H'(10 phi) - H'(2(2w+3) phi)| at w = 10, V = 0.1 + 0.2 phi + 0.05 phi^2");
  }
  {
    const bd::BDRates r = bd::bd_rhs({}, bd_fluid(1.0, 0.0), SpatialCurvature(0.0));
    const double m = std::max({std::abs(r.a_dot), std::abs(r.H_dot), std::abs(r.phi_dot),
                               std::abs(r.phi_ddot), std::abs(r.rho_dot)});
    rec.check("static_vacuum_fixed_point", m, 0.0);
  }
}

// --------------------------------------------------------------------- wdw

void wdw_suite(Recorder& rec) {
  using namespace wdw;
  const WDWParams params{1.0, 1.0, 1.0};
  const SampleBox box{0.5, 2.0, -1.0, 1.0, 10};

  {
    const double v1 = wdw_potential(0.0, 0.0, {});
    const double v2 = wdw_potential(0.0, 0.7, {1.0, 0.0, 3.0});
    const double v3 = wdw_potential(std::log(2.0), 1.0, {1.0, 1.0, 0.0});
    rec.check("potential_values", std::max({std::abs(v1 + 1.0), std::abs(v2), std::abs(v3 - 48.0) / 48.0}),
              1e-14, "V(0,0) = -1; zero at alpha = 0 for m = 0, Lambda = 3; 48 at alpha = log 2");
  }

  const auto gauss = change_of_variables_check(gaussian(Coordinate::A), params, box);
  rec.check("equivalence_gaussian", gauss.max_relative_deviation, 1e-8,
            fmt::format("exp(-a^2 - phi^2), {} points", gauss.points));
  const auto poly = change_of_variables_check(polynomial(Coordinate::A, {{1.0, 2, 1}}), params, box);
  rec.check("equivalence_polynomial_a2phi", poly.max_relative_deviation, 1e-10,
            fmt::format("a^2 phi, {} points", poly.points));

  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0.2, 2.0), c(-1.0, 1.0);
  std::uniform_int_distribution<int> pw(0, 4);
  double randomized = 0.0;
  for (int i = 0; i < 10; ++i) {
    const WDWParams prm{u(rng), u(rng), 3.0 * c(rng)};
    randomized = std::max(randomized,
                          change_of_variables_check(gaussian(Coordinate::A, c(rng), u(rng), u(rng), u(rng), c(rng)),
                                                    prm, box)
                              .max_relative_deviation);
    std::vector<Monomial> terms;
    for (int j = 0; j < 3; ++j) terms.push_back({c(rng), pw(rng), pw(rng)});
    randomized = std::max(
        randomized,
        change_of_variables_check(polynomial(Coordinate::A, terms), prm, box).max_relative_deviation);
  }
  rec.check("equivalence_randomized", randomized, 1e-8, "10 Gaussians and 10 polynomials, random parameters");

  const auto flat = change_of_variables_check(constant(Coordinate::A, 2.5), params, box);
  rec.check("equivalence_constant", flat.max_relative_deviation, 1e-14, "potential terms only");

  {
    // Both sides share the finite-difference derivatives, so compare against the analytic operator.
    const TestWave exact = gaussian(Coordinate::A);
    const TestWave fd_a = finite_difference(exact);
    const TestWave fd_alpha = finite_difference(to_alpha(exact));
    double worst = 0.0;
    for (std::size_t i = 0; i < box.n; ++i) {
      const double a = box.a_lo + (box.a_hi - box.a_lo) * i / (box.n - 1.0);
      for (std::size_t k = 0; k < box.n; ++k) {
        const double phi = box.phi_lo + (box.phi_hi - box.phi_lo) * k / (box.n - 1.0);
        const double ref = apply_wdw_a(exact, a, phi, params);
        worst = std::max({worst, rel_gap(ref, apply_wdw_a(fd_a, a, phi, params)),
                          rel_gap(ref, apply_wdw_alpha(fd_alpha, std::log(a), phi, params))});
      }
    }
    rec.check("equivalence_finite_difference", worst, 1e-4, "finite-difference derivatives, h = 1e-4");
  }

  {
    const TestWave p1 = gaussian(Coordinate::A, 1.0, 1.0, 2.0, 0.5, 0.2);
    const TestWave p2 = polynomial(Coordinate::A, {{1.0, 3, 1}, {-0.5, 0, 2}});
    const TestWave mix = combine(1.7, p1, -0.3, p2);
    const TestWave q1 = to_alpha(p1), q2 = to_alpha(p2), qmix = to_alpha(mix);
    double worst = 0.0;
    for (double a : {0.6, 1.0, 1.7}) {
      for (double phi : {-0.8, 0.1, 0.9}) {
        const double l = apply_wdw_a(mix, a, phi, params);
        const double r = 1.7 * apply_wdw_a(p1, a, phi, params) - 0.3 * apply_wdw_a(p2, a, phi, params);
        const double la = apply_wdw_alpha(qmix, std::log(a), phi, params);
        const double ra = 1.7 * apply_wdw_alpha(q1, std::log(a), phi, params) -
                          0.3 * apply_wdw_alpha(q2, std::log(a), phi, params);
        worst = std::max({worst, std::abs(l - r) / std::max(1.0, std::abs(l)),
                          std::abs(la - ra) / std::max(1.0, std::abs(la))});
      }
    }
    rec.check("linearity", worst, 1e-12, "both operators");
  }

  {
    const TestWave even = gaussian(Coordinate::Alpha, 1.0, 1.0, 1.5, 0.2, 0.0);
    const WDWParams massless{1.0, 0.0, 0.0};
    double worst = 0.0;
    for (double alpha : {-0.5, 0.0, 0.4}) {
      for (double phi : {0.1, 0.5, 1.2}) {
        const double p = apply_wdw_alpha(even, alpha, phi, massless);
        const double m = apply_wdw_alpha(even, alpha, -phi, massless);
        worst = std::max(worst, std::abs(p - m) / std::max(1.0, std::abs(p)));
      }
    }
    rec.check("phi_reflection_symmetry", worst, 1e-12, "m = 0, Lambda = 0, even test function");
  }

  {
    const TestWave one = constant(Coordinate::Alpha, 1.0);
    double worst = 0.0;
    for (double alpha : {-1.0, 0.0, 0.5}) {
      for (double phi : {-0.5, 0.7}) {
        worst = std::max(worst, rel_gap(apply_wdw_alpha(one, alpha, phi, params),
                                        zeroth_order_coefficient(alpha, phi, params)));
      }
    }
    rec.check("zeroth_order_coefficient", worst, 1e-14, "(e^{-3 alpha}/2) V(alpha, phi)");
  }
  rec.info("max_change_of_variables_deviation",
           std::max({gauss.max_relative_deviation, poly.max_relative_deviation, randomized}),
           "analytic derivatives");
}

}  // namespace

std::optional<Suite> parse_suite(std::string_view name) {
  if (name == "geometry") return Suite::Geometry;
  if (name == "flow") return Suite::Flow;
  if (name == "friedmann") return Suite::Friedmann;
  if (name == "bd") return Suite::BransDicke;
  if (name == "wdw") return Suite::WheelerDeWitt;
  if (name == "all") return Suite::All;
  return std::nullopt;
}

std::string_view to_string(Suite suite) {
  switch (suite) {
    case Suite::Geometry: return "geometry";
    case Suite::Flow: return "flow";
    case Suite::Friedmann: return "friedmann";
    case Suite::BransDicke: return "bd";
    case Suite::WheelerDeWitt: return "wdw";
    case Suite::All: return "all";
  }
  return "unknown";
}

bool VerifyReport::all_passed() const { return failures() == 0; }

std::size_t VerifyReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [](const Check& c) { return !c.passed; }));
}

VerifyReport verify(Suite suite, double tol_scale) {
  if (!(tol_scale > 0.0) || !std::isfinite(tol_scale)) {
    throw PreconditionError("tolerance scale must be positive and finite");
  }
  VerifyReport report;
  auto run = [&](Suite s, void (*fn)(Recorder&)) {
    if (suite != s && suite != Suite::All) return;
    Recorder rec(report, std::string(to_string(s)), tol_scale);
    try {
      fn(rec);
    } catch (const Error& e) {
      report.checks.push_back({std::string(to_string(s)), "suite_error", INFINITY, 0.0, false, false, e.what()});
    }
  };
  run(Suite::Geometry, geometry_suite);
  run(Suite::Flow, flow_suite);
  run(Suite::Friedmann, friedmann_suite);
  run(Suite::BransDicke, bransdicke_suite);
  run(Suite::WheelerDeWitt, wdw_suite);
  return report;
}

std::string format_report(const VerifyReport& report) {
  std::string out;
  for (const auto& c : report.checks) {
    const char* tag = c.informational ? "INFO" : (c.passed ? "PASS" : "FAIL");
    if (c.informational) {
      out += fmt::format("{}  {:<9} {:<40} value={:.6e}", tag, c.suite, c.name, c.measured);
    } else {
      out += fmt::format("{}  {:<9} {:<40} measured={:.6e}  tol={:.3e}", tag, c.suite, c.name,
                         c.measured, c.tolerance);
    }
    if (!c.note.empty()) out += "  (" + c.note + ")";
    out += '\n';
  }
  out += fmt::format("{} checks, {} failed\n",
                     std::count_if(report.checks.begin(), report.checks.end(),
                                   [](const Check& c) { return !c.informational; }),
                     report.failures());
  return out;
}

}  // namespace frw
