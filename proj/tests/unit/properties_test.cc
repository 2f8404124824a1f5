#include "acsolve/properties.h"

#include <gtest/gtest.h>

#include <stdexcept>

namespace acsolve {
namespace {

TEST(PropertiesTest, SuiteNamesAreKnown) {
  EXPECT_EQ(suite_names().size(), 10u);
  for (const std::string& name : suite_names()) {
    EXPECT_GT(default_samples(name), 0) << name;
  }
  EXPECT_EQ(default_samples("meq-bound"), 100);
  EXPECT_EQ(default_samples("area-convexity"), 10000);
}

TEST(PropertiesTest, EverySuitePassesOnAFewSamples) {
  for (const std::string& name : suite_names()) {
    long samples = name == "meq-bound" ? 10 : 300;
    SuiteReport rep = run_suite(name, samples, 7);
    EXPECT_EQ(rep.name, name);
    EXPECT_EQ(rep.samples, samples);
    EXPECT_TRUE(rep.passed()) << name << " violations " << rep.violations
                              << " worst " << rep.worst;
  }
}

TEST(PropertiesTest, AreaConvexityHasZeroViolations) {
  SuiteReport rep = run_suite("area-convexity", 2000, 11);
  EXPECT_EQ(rep.violations, 0);
  EXPECT_LE(rep.worst, 1e-8);
}

TEST(PropertiesTest, MeqBoundAllowsTenPercent) {
  SuiteReport rep = run_suite("meq-bound", 20, 3);
  EXPECT_EQ(rep.allowed_violations, 2);
  EXPECT_TRUE(rep.passed());
}

TEST(PropertiesTest, DeterministicPerSeed) {
  SuiteReport a = run_suite("grad-oracle", 200, 5);
  SuiteReport b = run_suite("grad-oracle", 200, 5);
  SuiteReport c = run_suite("grad-oracle", 200, 6);
  EXPECT_EQ(a.worst, b.worst);
  EXPECT_NE(a.worst, c.worst);
}

TEST(PropertiesTest, RejectsBadArguments) {
  EXPECT_THROW(run_suite("no-such-suite", 10, 1), std::invalid_argument);
  EXPECT_THROW(run_suite("rrl-regret", 0, 1), std::invalid_argument);
}

}  // namespace
}  // namespace acsolve
