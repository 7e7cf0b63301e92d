#include "superkron/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "superkron/elliptic.hpp"
#include "superkron/errors.hpp"
#include "superkron/grassmann.hpp"
#include "superkron/rmatrix.hpp"

namespace superkron {

namespace {

using nlohmann::json;

constexpr int kMaxRedraws = 1000;

json encode(Complex z) { return json::array({z.real(), z.imag()}); }
Complex decode(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

json encode(MultiIndex a) { return json::array({a.a1, a.a2}); }
MultiIndex decode_index(const json& j) {
  return {j.at(0).get<int>(), j.at(1).get<int>()};
}

GrassmannElement gen_of(int index) {
  return GrassmannElement::generator(GeneratorSet::canonical(), index);
}

double rel(Complex a, Complex b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

double rel(const GrassmannElement& a, const GrassmannElement& b) {
  const double scale = std::max(a.max_abs_coeff(), b.max_abs_coeff());
  return scale > 0.0 ? (a - b).max_abs_coeff() / scale : 0.0;
}

// 64-bit FNV-1a, so per-suite streams do not depend on std::hash.
std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Shared sample context decoded from the inputs object.
struct Env {
  Complex tau;
  int n;
  Kind kind;
  bool truncated;
  double pole_radius;
  EllipticContext ctx;

  explicit Env(const json& in)
      : tau(decode(in.at("tau"))),
        n(in.at("n").get<int>()),
        kind(kind_from_string(in.at("kind").get<std::string>())),
        truncated(in.at("truncated").get<bool>()),
        pole_radius(in.at("pole_radius").get<double>()),
        ctx(tau, EllipticContext::kDefaultTol, pole_radius) {}

  std::array<SuperPoint, 3> points(const json& in) const {
    return {SuperPoint{decode(in.at("z1")), gen_of(gen::kZeta1)},
            SuperPoint{decode(in.at("z2")), gen_of(gen::kZeta2)},
            SuperPoint{decode(in.at("z3")), gen_of(gen::kZeta3)}};
  }
};

class Sampler {
 public:
  Sampler(std::mt19937_64& rng, Complex tau) : rng_(rng), tau_(tau) {}

  // (1, τ) coordinates uniform in [0.1, 0.9]².
  Complex cell() {
    std::uniform_real_distribution<double> u(0.1, 0.9);
    const double a = u(rng_);
    const double b = u(rng_);
    return a + b * tau_;
  }
  // Box [-1, 1]² for the trigonometric and rational kinds.
  Complex box() {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double a = u(rng_);
    const double b = u(rng_);
    return {a, b};
  }
  MultiIndex index(int n) {
    std::uniform_int_distribution<int> u(0, n - 1);
    const int a1 = u(rng_);
    const int a2 = u(rng_);
    return {a1, a2};
  }

 private:
  std::mt19937_64& rng_;
  Complex tau_;
};

using Draw = std::function<void(Sampler&, const VerifyConfig&, json&)>;
using Evaluate = std::function<double(const json&)>;

struct Suite {
  Draw draw;
  Evaluate evaluate;
};

void draw_points(Sampler& s, json& in, bool box = false) {
  for (const char* key : {"z1", "z2", "z3"})
    in[key] = encode(box ? s.box() : s.cell());
}

void draw_hbars(Sampler& s, json& in, bool box = false) {
  in["h1"] = encode(box ? s.box() : s.cell());
  in["h2"] = encode(box ? s.box() : s.cell());
}

double theta_residual(const json& in) {
  const Env env(in);
  const Complex z = decode(in.at("z"));
  const Complex heat_lhs = 4.0 * kI * kPi * theta(z, env.ctx, 0, 1);
  const Complex heat_rhs = theta(z, env.ctx, 2);
  const Complex t = theta(z, env.ctx);
  return std::max(rel(heat_lhs, heat_rhs), rel(theta(-z, env.ctx), -t));
}

double kronecker_residual(const json& in) {
  const Env env(in);
  const Complex h = decode(in.at("h")), z = decode(in.at("z"));
  const auto& ctx = env.ctx;
  const Complex f = phi(h, z, ctx);
  const Complex e = std::exp(-kTwoPiI * h);
  return std::max(
      {rel(kTwoPiI * phi_dtau_direct(h, z, ctx), phi(h, z, ctx, 1, 1)),
       rel(phi(h, z + 1.0, ctx), f), rel(phi(h, z + env.tau, ctx), e * f),
       rel(phi(h, z - env.tau, ctx), f / e)});
}

double fay_suite_residual(const json& in) {
  const Env env(in);
  const PhiSetup setup{env.kind, env.truncated, &env.ctx, env.pole_radius};
  return fay_residual(setup, {decode(in.at("h1")), decode(in.at("h2"))},
                      {gen_of(gen::kMu1), gen_of(gen::kMu2)}, env.points(in),
                      gen_of(gen::kOmega))
      .relative();
}

double heat_suite_residual(const json& in) {
  const Env env(in);
  const auto p = env.points(in);
  return heat_residual(decode(in.at("h1")), gen_of(gen::kMu1), p[0], p[1],
                       gen_of(gen::kOmega), env.ctx, env.truncated)
      .relative();
}

double periodicity_suite_residual(const json& in) {
  const Env env(in);
  const auto p = env.points(in);
  double worst = 0.0;
  for (const Direction d : {Direction::kOne, Direction::kTau})
    for (int slot = 1; slot <= 2; ++slot)
      worst = std::max(
          worst, periodicity_residual(d, slot, decode(in.at("h1")),
                                      gen_of(gen::kMu1), p[0], p[1],
                                      gen_of(gen::kOmega), env.ctx,
                                      env.truncated)
                     .relative());
  return worst;
}

double basis_suite_residual(const json& in) {
  const Env env(in);
  const auto p = env.points(in);
  const auto alpha = decode_index(in.at("alpha"));
  const auto beta = decode_index(in.at("beta"));
  const Complex h1 = decode(in.at("h1")), h2 = decode(in.at("h2"));
  const std::array<Complex, 3> z{p[0].z, p[1].z, p[2].z};
  const auto w = gen_of(gen::kOmega);
  const std::array<GrassmannElement, 2> mus{gen_of(gen::kMu1),
                                            gen_of(gen::kMu2)};
  const int n = env.n;

  double worst =
      basis_fay_residual(alpha, beta, n, h1, h2, z, env.ctx).relative();
  worst = std::max(worst, super_basis_fay_residual(alpha, beta, n, {h1, h2},
                                                   mus, p, w, env.ctx)
                              .relative());
  if (!alpha.is_zero_mod(n) && !beta.is_zero_mod(n) &&
      !(alpha - beta).is_zero_mod(n)) {
    worst = std::max(
        worst,
        basis_fay_residual(alpha, beta, n, 0.0, 0.0, z, env.ctx).relative());
    worst = std::max(worst, super_basis_fay_residual(alpha, beta, n, {0.0, 0.0},
                                                     mus, p, w, env.ctx, true)
                                .relative());
  }
  const auto ref = super_basis_phi(alpha, n, h1, mus[0], p[0], p[1], w,
                                   env.ctx, BasisForm::kExponential)
                       .evaluate();
  for (const BasisForm f : {BasisForm::kMuShift, BasisForm::kFullTau,
                            BasisForm::kFullTauOuterExp})
    worst = std::max(
        worst, rel(ref, super_basis_phi(alpha, n, h1, mus[0], p[0], p[1], w,
                                        env.ctx, f)
                            .evaluate()));
  return worst;
}

double cybe_suite_residual(const json& in) {
  const Env env(in);
  const auto p = env.points(in);
  const HeisenbergBasis basis(env.n);
  return std::max(
      cybe_residual({p[0].z, p[1].z, p[2].z}, basis, env.ctx).relative(),
      super_cybe_residual(p, gen_of(gen::kOmega), basis, env.ctx).relative());
}

double aybe_suite_residual(const json& in) {
  const Env env(in);
  const auto p = env.points(in);
  const HeisenbergBasis basis(env.n);
  const std::array<Complex, 2> h{decode(in.at("h1")), decode(in.at("h2"))};
  return std::max(
      aybe_residual(h, {p[0].z, p[1].z, p[2].z}, basis, env.ctx).relative(),
      super_aybe_residual(h, {gen_of(gen::kMu1), gen_of(gen::kMu2)}, p,
                          gen_of(gen::kOmega), basis, env.ctx)
          .relative());
}

double degenerations_suite_residual(const json& in) {
  const Env env(in);
  const auto p = env.points(in);
  const std::array<Complex, 2> h{decode(in.at("h1")), decode(in.at("h2"))};
  const auto w = gen_of(gen::kOmega), m = gen_of(gen::kMu1);
  double worst = 0.0;
  for (const Kind kind : {Kind::kTrig, Kind::kRational}) {
    const PhiSetup setup{kind, env.truncated, nullptr, env.pole_radius};
    worst = std::max(worst, fay_residual(setup, h, {m, gen_of(gen::kMu2)}, p,
                                         w)
                                .relative());
    const auto kernel = kind == Kind::kTrig ? trig_kernel(env.pole_radius)
                                            : rational_kernel(env.pole_radius);
    const auto closed =
        super_phi_degenerate(kind, h[0], m, p[0], p[1], w, env.pole_radius);
    const auto assembled =
        super_phi(kernel, h[0], m, p[0], p[1], w, PhiForm::kOperator)
            .evaluate();
    worst = std::max(worst, rel(closed, assembled));
  }
  return worst;
}

const std::map<std::string, Suite>& registry() {
  static const std::map<std::string, Suite> suites = {
      {"theta",
       {[](Sampler& s, const VerifyConfig&, json& in) {
          in["z"] = encode(s.cell() - 0.5);
        },
        theta_residual}},
      {"kronecker",
       {[](Sampler& s, const VerifyConfig&, json& in) {
          in["h"] = encode(s.cell());
          in["z"] = encode(s.cell());
        },
        kronecker_residual}},
      {"fay",
       {[](Sampler& s, const VerifyConfig& cfg, json& in) {
          const bool box = cfg.kind != Kind::kElliptic;
          draw_hbars(s, in, box);
          draw_points(s, in, box);
        },
        fay_suite_residual}},
      {"heat",
       {[](Sampler& s, const VerifyConfig&, json& in) {
          draw_hbars(s, in);
          draw_points(s, in);
        },
        heat_suite_residual}},
      {"periodicity",
       {[](Sampler& s, const VerifyConfig&, json& in) {
          draw_hbars(s, in);
          draw_points(s, in);
        },
        periodicity_suite_residual}},
      {"basis",
       {[](Sampler& s, const VerifyConfig& cfg, json& in) {
          in["alpha"] = encode(s.index(cfg.n));
          in["beta"] = encode(s.index(cfg.n));
          draw_hbars(s, in);
          draw_points(s, in);
        },
        basis_suite_residual}},
      {"cybe",
       {[](Sampler& s, const VerifyConfig&, json& in) { draw_points(s, in); },
        cybe_suite_residual}},
      {"aybe",
       {[](Sampler& s, const VerifyConfig&, json& in) {
          draw_hbars(s, in);
          draw_points(s, in);
        },
        aybe_suite_residual}},
      {"degenerations",
       {[](Sampler& s, const VerifyConfig&, json& in) {
          draw_hbars(s, in, true);
          draw_points(s, in, true);
        },
        degenerations_suite_residual}},
  };
  return suites;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "theta", "kronecker", "fay",  "heat",         "periodicity",
      "basis", "cybe",      "aybe", "degenerations"};
  return names;
}

void validate(const VerifyConfig& cfg) {
  if (!(cfg.tau.imag() > 0.0))
    throw std::invalid_argument("config: Im tau must be positive");
  if (cfg.samples < 1) throw std::invalid_argument("config: samples < 1");
  if (cfg.n < 1) throw std::invalid_argument("config: n < 1");
  if (!(cfg.tol_relative > std::numeric_limits<double>::epsilon()))
    throw std::invalid_argument("config: tolerance must exceed epsilon");
  if (!(cfg.pole_radius > 0.0))
    throw std::invalid_argument("config: pole radius must be positive");
  for (const auto& s : cfg.suites)
    if (s != "all" && !registry().contains(s))
      throw std::invalid_argument("config: unknown suite '" + s + "'");
}

SuiteReport run_suite(const std::string& name, const VerifyConfig& cfg) {
  const auto it = registry().find(name);
  if (it == registry().end())
    throw std::invalid_argument("unknown suite '" + name + "'");
  const Suite& suite = it->second;

  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(cfg.seed ^ fnv1a(name));
  Sampler sampler(rng, cfg.tau);

  SuiteReport report;
  report.suite = name;
  report.max_residual = -1.0;
  for (int i = 0; i < cfg.samples; ++i) {
    for (int attempt = 0;; ++attempt) {
      if (attempt == kMaxRedraws)
        throw std::runtime_error("suite '" + name +
                                 "': no valid sample after " +
                                 std::to_string(kMaxRedraws) + " draws");
      json in = {{"suite", name},
                 {"n", cfg.n},
                 {"tau", encode(cfg.tau)},
                 {"kind", to_string(cfg.kind)},
                 {"truncated", cfg.truncated},
                 {"pole_radius", cfg.pole_radius}};
      suite.draw(sampler, cfg, in);
      double r;
      try {
        r = suite.evaluate(in);
      } catch (const PoleError&) {
        continue;
      }
      // A NaN residual is the worst possible sample and sticks.
      const bool worse = std::isnan(r) ? !std::isnan(report.max_residual)
                                       : r > report.max_residual;
      if (worse) {
        report.max_residual = r;
        report.worst_inputs = in;
      }
      break;
    }
    ++report.samples;
  }
  report.pass = report.max_residual < cfg.tol_relative;
  report.seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return report;
}

std::vector<SuiteReport> run_suites(const VerifyConfig& cfg) {
  validate(cfg);
  std::vector<std::string> names;
  for (const auto& s : cfg.suites) {
    if (s == "all")
      names.insert(names.end(), suite_names().begin(), suite_names().end());
    else
      names.push_back(s);
  }
  std::vector<SuiteReport> out;
  for (const auto& name : names) out.push_back(run_suite(name, cfg));
  return out;
}

double replay(const nlohmann::json& inputs) {
  const auto name = inputs.at("suite").get<std::string>();
  const auto it = registry().find(name);
  if (it == registry().end())
    throw std::invalid_argument("replay: unknown suite '" + name + "'");
  return it->second.evaluate(inputs);
}

nlohmann::json to_json(const SuiteReport& r) {
  json j = {{"suite", r.suite},
            {"samples", r.samples},
            {"worst_inputs", r.worst_inputs},
            {"pass", r.pass},
            {"seconds", r.seconds}};
  // JSON has no NaN; a null residual means the identity produced NaN.
  if (std::isnan(r.max_residual))
    j["max_residual"] = nullptr;
  else
    j["max_residual"] = r.max_residual;
  return j;
}

SuiteReport report_from_json(const nlohmann::json& j) {
  SuiteReport r;
  r.suite = j.at("suite").get<std::string>();
  r.samples = j.at("samples").get<int>();
  r.max_residual = j.at("max_residual").is_null()
                       ? std::nan("")
                       : j.at("max_residual").get<double>();
  r.worst_inputs = j.at("worst_inputs");
  r.pass = j.at("pass").get<bool>();
  r.seconds = j.at("seconds").get<double>();
  return r;
}

bool all_pass(const std::vector<SuiteReport>& reports) {
  return std::all_of(reports.begin(), reports.end(),
                     [](const SuiteReport& r) { return r.pass; });
}

std::string emit_report(const std::vector<SuiteReport>& reports,
                        OutputFormat format) {
  if (format == OutputFormat::kStructured) {
    json doc = {{"pass", all_pass(reports)}, {"reports", json::array()}};
    for (const auto& r : reports) doc["reports"].push_back(to_json(r));
    return doc.dump(2) + "\n";
  }
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-14s %8s %14s %6s %9s\n", "suite",
                "samples", "max_residual", "pass", "seconds");
  os << line;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%-14s %8d %14.3e %6s %9.3f\n",
                  r.suite.c_str(), r.samples, r.max_residual,
                  r.pass ? "yes" : "NO", r.seconds);
    os << line;
  }
  return os.str();
}

}  // namespace superkron
