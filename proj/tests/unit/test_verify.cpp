#include <gtest/gtest.h>

#include "frw/verify.hpp"

using namespace frw;

TEST(Verify, ParseSuiteNames) {
  EXPECT_EQ(parse_suite("bd"), Suite::BransDicke);
  EXPECT_EQ(parse_suite("wdw"), Suite::WheelerDeWitt);
  EXPECT_EQ(parse_suite("all"), Suite::All);
  EXPECT_FALSE(parse_suite("everything"));
  EXPECT_EQ(to_string(Suite::Friedmann), "friedmann");
}

TEST(Verify, EverySuitePasses) {
  for (Suite s : {Suite::Geometry, Suite::Flow, Suite::Friedmann, Suite::BransDicke, Suite::WheelerDeWitt}) {
    const auto report = verify(s);
    EXPECT_FALSE(report.checks.empty());
    EXPECT_TRUE(report.all_passed()) << format_report(report);
  }
}

TEST(Verify, ShrinkingToleranceProducesFailures) {
  const auto report = verify(Suite::Flow, 1e-12);
  EXPECT_GT(report.failures(), 0u);
  EXPECT_NE(format_report(report).find("FAIL"), std::string::npos);
}

TEST(Verify, SigmaReportIsInformational) {
  const auto report = verify(Suite::Flow);
  bool seen = false;
  for (const auto& c : report.checks) {
    if (c.informational && c.name.find("sigma") != std::string::npos) seen = true;
  }
  EXPECT_TRUE(seen) << format_report(report);
}
