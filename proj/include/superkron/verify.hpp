#pragma once

// Randomized verification suites over the library's identities, and their
// reports.
//
// Every suite draws its inputs as a JSON object and evaluates a relative
// residual from that object alone, so the worst sample of a report can be
// replayed exactly.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "superkron/jet.hpp"
#include "superkron/superfunc.hpp"

namespace superkron {

enum class OutputFormat { kText, kStructured };

struct VerifyConfig {
  int n = 2;
  Complex tau{0.3, 1.1};
  int samples = 200;
  double tol_relative = 1e-9;
  std::uint64_t seed = 42;
  double pole_radius = EllipticContext::kDefaultPoleRadius;
  std::vector<std::string> suites;
  Kind kind = Kind::kElliptic;
  bool truncated = false;
  OutputFormat output = OutputFormat::kText;
};

/// Names accepted in VerifyConfig::suites, without "all".
const std::vector<std::string>& suite_names();

/// Throws std::invalid_argument for Im τ <= 0, samples < 1, n < 1,
/// tol_relative not above machine epsilon, or an unknown suite.
void validate(const VerifyConfig& cfg);

struct SuiteReport {
  std::string suite;
  int samples = 0;
  double max_residual = 0.0;
  nlohmann::json worst_inputs;
  bool pass = false;
  double seconds = 0.0;
};

/// Runs the requested suites ("all" expands to every suite) in order.
/// Deterministic in the config; pole hits are redrawn a bounded number of
/// times before std::runtime_error.
std::vector<SuiteReport> run_suites(const VerifyConfig& cfg);
SuiteReport run_suite(const std::string& suite, const VerifyConfig& cfg);

/// Residual of one serialized sample (a report's worst_inputs).
double replay(const nlohmann::json& inputs);

nlohmann::json to_json(const SuiteReport& report);
SuiteReport report_from_json(const nlohmann::json& j);

/// Text table or structured document {"pass", "reports": [...]}.
std::string emit_report(const std::vector<SuiteReport>& reports,
                        OutputFormat format);

bool all_pass(const std::vector<SuiteReport>& reports);

}  // namespace superkron
