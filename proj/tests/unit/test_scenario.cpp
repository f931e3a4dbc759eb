#include <cmath>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "frw/errors.hpp"
#include "frw/scenario.hpp"

using namespace frw;
using nlohmann::json;

namespace {

const std::string kData = FRW_TEST_DATA;

json friedmann_base() {
  return json::parse(R"({
    "spec_version": 1, "model": "friedmann", "kappa": 0, "span": {"t_end": 2},
    "friedmann": {"Lambda": 0.1, "fluids": [{"w": 0, "rho0": 0.2}], "initial": {"a": 1}}
  })");
}

std::string field_of(const json& j) {
  try {
    scenario_from_json(j);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "<accepted>";
}

}  // namespace

TEST(Scenario, JsonRoundTrip) {
  for (const char* name : {"desitter", "intrinsic_k1", "flow_direct", "bd_inflaton", "fluid_sweep"}) {
    const Scenario s = load_scenario(kData + "/" + name + ".json");
    const Scenario again = scenario_from_json(scenario_to_json(s));
    EXPECT_EQ(s, again) << name;
  }
}

TEST(Scenario, DefaultsFromMinimalConfig) {
  const Scenario s = scenario_from_json(friedmann_base());
  EXPECT_EQ(s.model_name(), "friedmann");
  EXPECT_EQ(s.output_points, 201u);
  EXPECT_EQ(s.output_grid().size(), 201u);
  const auto& f = std::get<FriedmannConfig>(s.model);
  EXPECT_EQ(f.fluids.size(), 1u);
  EXPECT_EQ(f.effective_G(), 1.0);
}

TEST(Scenario, ReducedPlanckUnitsFixG) {
  json j = friedmann_base();
  j["friedmann"]["units"] = "reduced_planck";
  const auto f = std::get<FriedmannConfig>(scenario_from_json(j).model);
  EXPECT_NEAR(8.0 * std::acos(-1.0) * f.effective_G(), 1.0, 1e-15);
  j["friedmann"]["G"] = 2.0;
  EXPECT_EQ(field_of(j), "friedmann.G");
}

TEST(Scenario, ValidationNamesTheField) {
  json j = friedmann_base();
  j["friedmann"]["fluids"][0]["w"] = "dust";
  EXPECT_EQ(field_of(j), "friedmann.fluids[0].w");

  j = friedmann_base();
  j["friedmann"]["colour"] = 1;
  EXPECT_EQ(field_of(j), "friedmann.colour");

  j = friedmann_base();
  j["spec_version"] = 2;
  EXPECT_EQ(field_of(j), "spec_version");

  j = friedmann_base();
  j["flow"] = json::object();
  EXPECT_EQ(field_of(j), "flow");

  j = friedmann_base();
  j["span"]["t_end"] = -1;
  EXPECT_EQ(field_of(j), "span.t_end");

  j = friedmann_base();
  j["model"] = "steady_state";
  EXPECT_EQ(field_of(j), "friedmann");
  j.erase("friedmann");
  EXPECT_EQ(field_of(j), "model");

  j = friedmann_base();
  j["span"].erase("t_end");
  EXPECT_EQ(field_of(j), "span.t_end");
}

TEST(Scenario, MalformedFileIsAValidationError) {
  EXPECT_THROW(load_scenario(kData + "/malformed.json"), ValidationError);
  EXPECT_THROW(load_scenario(kData + "/does_not_exist.json"), ValidationError);
}

TEST(Scenario, OffConstraintBransDickeRejected) {
  EXPECT_THROW(load_scenario(kData + "/inconsistent_bd.json"), ValidationError);
}

TEST(Scenario, CompletionDefaultsDependOnMatter) {
  json fluid = json::parse(R"({
    "spec_version": 1, "model": "bransdicke", "span": {"t_end": 1},
    "bransdicke": {"coupling": 100, "matter": {"type": "fluid", "w": 0},
                   "initial": {"a": 1, "H": 1, "phi": 1, "phi_dot": 0, "rho": 0.5}}
  })");
  EXPECT_EQ(std::get<BransDickeConfig>(scenario_from_json(fluid).model).completion, bd::Completion::Rho);

  const Scenario inflaton = load_scenario(kData + "/bd_inflaton.json");
  EXPECT_EQ(std::get<BransDickeConfig>(inflaton.model).completion, bd::Completion::Hubble);
}

TEST(Scenario, SigmaCalibratedOnlyForHubbleAndChi) {
  const auto hubble = run_scenario(load_scenario(kData + "/flow_direct.json"));
  ASSERT_TRUE(hubble.sigma_calibration);
  EXPECT_EQ(hubble.sigma_used, flow::Sigma::Minus);

  const auto intrinsic = run_scenario(load_scenario(kData + "/intrinsic_k1.json"));
  EXPECT_FALSE(intrinsic.sigma_calibration);
  EXPECT_FALSE(intrinsic.sigma_used);
}

TEST(Scenario, EveryStepModeHasEmptyGrid) {
  json j = friedmann_base();
  j["output"] = {{"points", 0}};
  const Scenario s = scenario_from_json(j);
  EXPECT_TRUE(s.output_grid().empty());
  const auto r = run_scenario(s);
  EXPECT_EQ(r.trajectory.samples.size(), r.trajectory.accepted_steps + 1);
}
