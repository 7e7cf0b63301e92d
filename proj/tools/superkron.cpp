#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "superkron/verify.hpp"

namespace {

int write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(path);
  out << text;
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  using superkron::OutputFormat;
  CLI::App app{"Verification harness for the supersymmetric Kronecker "
               "function and elliptic R-matrices"};
  app.require_subcommand(1);

  superkron::VerifyConfig cfg;
  double tau_re = cfg.tau.real(), tau_im = cfg.tau.imag();
  std::string kind = "elliptic", output = "text", out_path;

  auto* verify = app.add_subcommand("verify", "Run verification suites");
  verify->add_option("suites", cfg.suites, "Suites to run, or 'all'");
  verify->add_option("--n", cfg.n, "Matrix dimension N")->check(CLI::PositiveNumber);
  verify->add_option("--tau-re", tau_re, "Re tau");
  verify->add_option("--tau-im", tau_im, "Im tau");
  verify->add_option("--samples", cfg.samples, "Samples per suite");
  verify->add_option("--tol", cfg.tol_relative, "Relative tolerance");
  verify->add_option("--seed", cfg.seed, "Random seed");
  verify->add_option("--pole-radius", cfg.pole_radius, "Pole exclusion radius");
  verify->add_option("--kind", kind, "Kernel kind")
      ->check(CLI::IsMember({"elliptic", "trig", "rational"}));
  verify->add_flag("--truncated", cfg.truncated, "Use the truncated function");
  verify->add_option("--output", output, "Report format")
      ->check(CLI::IsMember({"text", "structured"}));
  verify->add_option("--out", out_path, "Write the report to a file");

  std::string report_path;
  auto* replay = app.add_subcommand(
      "replay", "Recompute the worst-case residuals of a structured report");
  replay->add_option("report", report_path, "Structured report file")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) {
      cfg.tau = {tau_re, tau_im};
      cfg.kind = superkron::kind_from_string(kind);
      cfg.output = output == "structured" ? OutputFormat::kStructured
                                          : OutputFormat::kText;
      const auto reports = superkron::run_suites(cfg);
      if (const int rc = write_output(
              superkron::emit_report(reports, cfg.output), out_path))
        return rc;
      return superkron::all_pass(reports) ? 0 : 1;
    }

    std::ifstream in(report_path);
    const auto doc = nlohmann::json::parse(in);
    bool identical = true;
    for (const auto& j : doc.at("reports")) {
      const auto r = superkron::report_from_json(j);
      if (r.worst_inputs.is_null()) continue;
      const double again = superkron::replay(r.worst_inputs);
      const bool same = again == r.max_residual ||
                        (std::isnan(again) && std::isnan(r.max_residual));
      identical = identical && same;
      std::printf("%-14s recorded %.17g replayed %.17g %s\n", r.suite.c_str(),
                  r.max_residual, again, same ? "identical" : "DIFFERENT");
    }
    return identical ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
