#include "superkron/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

namespace superkron {
namespace {

VerifyConfig small_config(std::vector<std::string> suites) {
  VerifyConfig cfg;
  cfg.samples = 20;
  cfg.suites = std::move(suites);
  return cfg;
}

TEST(Verify, DeterministicForFixedSeed) {
  const auto cfg = small_config({"all"});
  const auto a = run_suites(cfg);
  const auto b = run_suites(cfg);
  ASSERT_EQ(a.size(), suite_names().size());
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].suite, b[i].suite);
    EXPECT_EQ(a[i].samples, b[i].samples);
    EXPECT_EQ(a[i].max_residual, b[i].max_residual);
    EXPECT_EQ(a[i].worst_inputs, b[i].worst_inputs);
    EXPECT_EQ(a[i].pass, b[i].pass);
  }
}

TEST(Verify, SeedChangesSamples) {
  auto cfg = small_config({"kronecker"});
  const auto a = run_suite("kronecker", cfg);
  cfg.seed = 43;
  const auto b = run_suite("kronecker", cfg);
  EXPECT_NE(a.worst_inputs, b.worst_inputs);
}

TEST(Verify, AllSuitesPassAtDefaultTolerance) {
  for (const int n : {2, 3}) {
    auto cfg = small_config({"all"});
    cfg.n = n;
    for (const auto& r : run_suites(cfg)) {
      EXPECT_TRUE(r.pass) << r.suite << " " << r.max_residual;
      EXPECT_EQ(r.samples, 20);
    }
  }
}

TEST(Verify, KindsAndTruncation) {
  for (const Kind kind : {Kind::kTrig, Kind::kRational}) {
    auto cfg = small_config({"fay"});
    cfg.kind = kind;
    EXPECT_TRUE(run_suites(cfg).front().pass);
  }
  auto cfg = small_config({"heat", "periodicity", "fay"});
  cfg.truncated = true;
  EXPECT_TRUE(all_pass(run_suites(cfg)));
}

TEST(Verify, EmptySuiteListIsSuccess) {
  const auto reports = run_suites(small_config({}));
  EXPECT_TRUE(reports.empty());
  EXPECT_TRUE(all_pass(reports));
  const auto doc =
      nlohmann::json::parse(emit_report(reports, OutputFormat::kStructured));
  EXPECT_TRUE(doc.at("pass").get<bool>());
  EXPECT_TRUE(doc.at("reports").empty());
}

TEST(Verify, FailingSuiteKeepsWorstInputs) {
  auto cfg = small_config({"heat"});
  cfg.tol_relative = 1e-15;
  const auto r = run_suites(cfg).front();
  EXPECT_FALSE(r.pass);
  EXPECT_FALSE(all_pass({r}));
  EXPECT_EQ(r.worst_inputs.at("suite"), "heat");
  EXPECT_EQ(replay(r.worst_inputs), r.max_residual);
}

TEST(Verify, StructuredSchemaAndReplay) {
  const auto reports = run_suites(small_config({"all"}));
  const auto doc =
      nlohmann::json::parse(emit_report(reports, OutputFormat::kStructured));
  ASSERT_EQ(doc.at("reports").size(), reports.size());
  for (const auto& j : doc.at("reports")) {
    for (const char* key :
         {"suite", "samples", "max_residual", "worst_inputs", "pass", "seconds"})
      EXPECT_TRUE(j.contains(key)) << key;
    const auto r = report_from_json(j);
    // Bit-for-bit after a round trip through the text document.
    EXPECT_EQ(replay(r.worst_inputs), r.max_residual) << r.suite;
  }
}

TEST(Verify, TextTableListsSuites) {
  const auto reports = run_suites(small_config({"theta", "cybe"}));
  const auto text = emit_report(reports, OutputFormat::kText);
  EXPECT_NE(text.find("theta"), std::string::npos);
  EXPECT_NE(text.find("cybe"), std::string::npos);
  EXPECT_NE(text.find("max_residual"), std::string::npos);
}

TEST(Verify, InvalidConfigurations) {
  auto cfg = small_config({"theta"});
  cfg.tau = {0.3, 0.0};
  EXPECT_THROW(run_suites(cfg), std::invalid_argument);
  cfg = small_config({"theta"});
  cfg.samples = 0;
  EXPECT_THROW(run_suites(cfg), std::invalid_argument);
  cfg = small_config({"theta"});
  cfg.tol_relative = 1e-17;
  EXPECT_THROW(run_suites(cfg), std::invalid_argument);
  cfg = small_config({"nope"});
  EXPECT_THROW(run_suites(cfg), std::invalid_argument);
}

TEST(Verify, PoleRadiusTooLargeExhaustsRedraws) {
  auto cfg = small_config({"cybe"});
  cfg.pole_radius = 5.0;
  EXPECT_THROW(run_suites(cfg), std::runtime_error);
}

}  // namespace
}  // namespace superkron
