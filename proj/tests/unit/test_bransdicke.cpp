#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "closed_forms.hpp"
#include "frw/bransdicke.hpp"
#include "frw/errors.hpp"
#include "frw/friedmann.hpp"

using namespace frw;
using namespace frw::bd;

namespace {

constexpr double kPi = oracle::kPi;

BDParams fluid(double coupling, double w) {
  BDParams p;
  p.coupling = coupling;
  p.matter = FluidMatter{w};
  return p;
}

BDParams inflaton(double coupling) {
  BDParams p;
  p.coupling = coupling;
  p.matter = InflatonMatter{Polynomial{{0.0, 0.0, 0.5}}};
  return p;
}

}  // namespace

TEST(Polynomial, ValueAndDerivative) {
  const Polynomial p{{1.0, -2.0, 3.0}};
  EXPECT_DOUBLE_EQ(p(2.0), 9.0);
  EXPECT_DOUBLE_EQ(p.derivative(2.0), 10.0);
  EXPECT_EQ(Polynomial{}(5.0), 0.0);
}

TEST(BoxPhi, Kinematic) {
  EXPECT_EQ(box_phi_kinematic(0.7, 0.0, 3.0), -0.7);
  EXPECT_EQ(box_phi_kinematic(1.0, 1.0, 1.0), -4.0);
  // phi' = a^-3 with a = e^t: phi'' = -3 e^{-3t}, H = 1.
  const double t = 0.4, a3 = std::exp(3 * t);
  EXPECT_NEAR(box_phi_kinematic(-3.0 / a3, 1.0, 1.0 / a3), 0.0, 1e-16);
}

TEST(BoxPhi, Dynamic) {
  EXPECT_EQ(box_phi_dynamic(BDState{}, fluid(1.0, 0.0)), 0.0);
  BDState s;
  s.rho = 1.0;
  EXPECT_NEAR(box_phi_dynamic(s, fluid(1.0, 0.0)), -8.0 * kPi / 5.0, 1e-14);
}

TEST(Rates, StaticVacuumFixedPoint) {
  const auto r = bd_rhs(BDState{}, fluid(1.0, 0.0), SpatialCurvature(0.0));
  EXPECT_EQ(r.a_dot, 0.0);
  EXPECT_EQ(r.H_dot, 0.0);
  EXPECT_EQ(r.phi_ddot, 0.0);
  EXPECT_EQ(r.rho_dot, 0.0);
}

TEST(Rates, DegenerateCouplingRejected) {
  EXPECT_THROW(bd_rhs(BDState{}, fluid(-1.5, 0.0), SpatialCurvature(0.0)), PreconditionError);
}

TEST(Rates, TriangleOnRandomStates) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.5, 2.0), w(1.0, 50.0);
  for (int i = 0; i < 200; ++i) {
    BDParams p = i % 2 ? fluid(w(rng), 1.0 / 3.0) : inflaton(w(rng));
    p.V = Polynomial{{0.1, u(rng), 0.05}};
    BDState s{0.0, pos(rng), u(rng), pos(rng), u(rng), pos(rng), std::nullopt};
    if (p.is_inflaton()) s.field = InflatonField{u(rng), u(rng)};
    const auto r = bd_rhs(s, p, SpatialCurvature(static_cast<double>(i % 3 - 1)));
    const double scale = std::max({1.0, std::abs(r.phi_ddot), std::abs(3 * s.H * s.phi_dot)});
    EXPECT_LE(std::abs(box_phi_kinematic(r.phi_ddot, s.H, s.phi_dot) - box_phi_dynamic(s, p)) / scale, 1e-12);
  }
}

TEST(Rates, InflatonContinuityMatchesFieldEquation) {
  const BDParams p = inflaton(20.0);
  BDState s{0.0, 1.3, 0.4, 1.1, 0.05, 0.0, InflatonField{0.7, -0.3}};
  const auto r = bd_rhs(s, p, SpatialCurvature(0.0));
  // d/dt [psi'^2/2 + U] = psi' (psi'' + U')
  const auto m = matter_state(s, p);
  const double drho = s.field->psi_dot * (r.psi_ddot + s.field->psi);
  EXPECT_NEAR(drho, -3.0 * s.H * (m.rho + m.pressure), 1e-12);
}

TEST(Constraint, VacuumReducesToHSquared) {
  BDState s;
  s.H = 0.3;
  EXPECT_NEAR(bd_constraint_residual(s, fluid(5.0, 0.0), SpatialCurvature(0.0)), 0.09, 1e-16);
}

TEST(Completion, EachUnknownLandsOnTheConstraint) {
  const SpatialCurvature k(1.0);
  BDState s{0.0, 1.0, 0.8, 1.0, 0.1, 0.2, std::nullopt};
  const auto by_rho = complete_initial_data(s, fluid(10.0, 0.0), k, Completion::Rho);
  EXPECT_LE(std::abs(bd_constraint_residual(by_rho, fluid(10.0, 0.0), k)), 1e-14);

  s.H = -0.5;
  const auto by_h = complete_initial_data(s, fluid(10.0, 0.0), k, Completion::Hubble);
  EXPECT_LT(by_h.H, 0.0);
  EXPECT_LE(std::abs(bd_constraint_residual(by_h, fluid(10.0, 0.0), k)), 1e-14);

  BDState f{0.0, 1.0, 1.0, 1.0, 0.0, 0.0, InflatonField{0.2, -0.1}};
  const auto by_psi = complete_initial_data(f, inflaton(10.0), SpatialCurvature(0.0), Completion::PsiDot);
  EXPECT_LT(by_psi.field->psi_dot, 0.0);
  EXPECT_LE(std::abs(bd_constraint_residual(by_psi, inflaton(10.0), SpatialCurvature(0.0))), 1e-14);

  BDState empty{0.0, 1.0, 0.0, 1.0, 0.0, 0.0, std::nullopt};
  // Open, static and empty: the constraint asks for rho = -3/(8 pi).
  EXPECT_THROW(complete_initial_data(empty, fluid(10.0, 0.0), SpatialCurvature(-1.0), Completion::Rho),
               InadmissibleStateError);
}

TEST(Ricci, TwoRoutesAgreeOnTheConstraint) {
  BDParams p = fluid(7.0, 1.0 / 3.0);
  p.V = Polynomial{{0.1, 0.2, 0.05}};
  const SpatialCurvature k(-1.0);
  const BDState s = complete_initial_data({0.0, 1.4, 0.3, 1.2, -0.2, 0.6, std::nullopt}, p, k, Completion::Hubble);
  const auto r = bd_ricci_scalar(s, p, k);
  EXPECT_LE(std::abs(r.difference), 1e-12 * std::max(1.0, std::abs(r.from_geometry)));
  const auto vac = bd_ricci_scalar(BDState{}, fluid(3.0, 0.0), SpatialCurvature(0.0));
  EXPECT_EQ(vac.from_matter, 0.0);
  EXPECT_EQ(vac.from_geometry, 0.0);
}

TEST(Integrate, ConstraintDriftForEachMatterAndCurvature) {
  for (int matter = 0; matter < 3; ++matter) {
    for (double k : {-1.0, 0.0, 1.0}) {
      BDProblem p;
      p.kappa = SpatialCurvature(k);
      p.t_end = 20.0;
      p.grid = ode::uniform_grid({0.0, 20.0}, 201);
      p.initial = {0.0, 10.0, 0.5, 1.0, 0.1, 0.0, std::nullopt};
      if (matter == 2) {
        p.params = inflaton(10.0);
        p.initial.field = InflatonField{1.0, 0.0};
        p.completion = Completion::Hubble;
      } else {
        p.params = fluid(10.0, matter == 0 ? 0.0 : 1.0 / 3.0);
      }
      const auto t = integrate_bransdicke(p);
      EXPECT_LE(t.max_abs_diagnostic("constraint"), 1e-6) << matter << " " << k;
      if (matter == 2) EXPECT_LE(t.max_abs_diagnostic("rho_continuity_gap"), 1e-8);
    }
  }
}

TEST(Integrate, LargeCouplingApproachesFriedmannDust) {
  friedmann::FriedmannProblem fp;
  fp.background = {{friedmann::FluidModel::dust(0.1)}, 1.0, 0.0, SpatialCurvature(0.0)};
  fp.t_end = 5.0;
  const auto gr = friedmann::integrate_friedmann(fp);

  BDProblem p;
  p.params = fluid(1e6, 0.0);
  p.initial = {0.0, 1.0, 1.0, 1.0, 0.0, 0.1, std::nullopt};
  p.completion = Completion::Hubble;
  p.t_end = 5.0;
  const auto bd = integrate_bransdicke(p);
  const double a_gr = gr.samples.back().a, a_bd = bd.samples.back().a;
  EXPECT_LE(std::abs(a_bd - a_gr) / a_gr, 1e-3);
  EXPECT_LE(std::abs(bd.samples.back().hubble() - gr.samples.back().hubble()) / gr.samples.back().hubble(), 1e-3);
}

TEST(Integrate, AsGivenDataMustBeOnConstraintOrItDrifts) {
  BDProblem p;
  p.params = fluid(10.0, 0.0);
  p.initial = {0.0, 1.0, 1.0, 1.0, 0.0, 0.5, std::nullopt};
  p.completion = std::nullopt;
  p.t_end = 0.1;
  const auto t = integrate_bransdicke(p);
  EXPECT_GT(std::abs(t.samples.front().diagnostics[0]), 1e-3);
}

TEST(LiteralDenominator, DiffersOnlyThroughPotential) {
  BDParams p = fluid(10.0, 0.0);
  const BDState s{0.0, 1.2, 0.4, 1.5, 0.2, 0.3, std::nullopt};
  EXPECT_DOUBLE_EQ(h_dot_published_denominator(s, p, SpatialCurvature(0.0)),
                   bd_rhs(s, p, SpatialCurvature(0.0)).H_dot);
  p.V = Polynomial{{0.1, 0.2, 0.05}};
  EXPECT_NE(h_dot_published_denominator(s, p, SpatialCurvature(0.0)), bd_rhs(s, p, SpatialCurvature(0.0)).H_dot);
}
