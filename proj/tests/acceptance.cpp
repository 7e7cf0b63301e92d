// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "superkron/elliptic.hpp"
#include "superkron/errors.hpp"
#include "superkron/grassmann.hpp"
#include "superkron/rmatrix.hpp"
#include "superkron/superfunc.hpp"

namespace {

using namespace superkron;

const Complex kTau(0.3, 1.1);

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double time_limit;  // seconds, 0 for none
  std::function<Outcome()> run;
};

GrassmannElement gen_of(int i) {
  return GrassmannElement::generator(GeneratorSet::canonical(), i);
}

double rel(Complex a, Complex b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

double rel(const GrassmannElement& a, const GrassmannElement& b) {
  const double s = std::max(a.max_abs_coeff(), b.max_abs_coeff());
  return s > 0.0 ? (a - b).max_abs_coeff() / s : 0.0;
}

double rel(const DenseMatrix<GrassmannElement>& a,
           const DenseMatrix<GrassmannElement>& b) {
  const double s = std::max(max_abs(a), max_abs(b));
  return s > 0.0 ? max_abs(a - b) / s : 0.0;
}

class Draws {
 public:
  explicit Draws(std::uint64_t seed) : rng_(seed) {}
  Complex cell() {
    std::uniform_real_distribution<double> u(0.1, 0.9);
    const double a = u(rng_);
    const double b = u(rng_);
    return a + b * kTau;
  }
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
  std::array<SuperPoint, 3> points(bool in_box = false) {
    return {SuperPoint{in_box ? box() : cell(), gen_of(gen::kZeta1)},
            SuperPoint{in_box ? box() : cell(), gen_of(gen::kZeta2)},
            SuperPoint{in_box ? box() : cell(), gen_of(gen::kZeta3)}};
  }

 private:
  std::mt19937_64 rng_;
};

// Runs `count` samples of f, redrawing on PoleError, and returns the largest
// residual.
double worst_of(int count, const std::function<double()>& f) {
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    for (int attempt = 0;; ++attempt) {
      if (attempt == 1000) throw std::runtime_error("no valid sample");
      try {
        const double r = f();
        worst = std::isnan(r) ? r : std::max(worst, r);
        break;
      } catch (const PoleError&) {
      }
    }
  }
  return worst;
}

Outcome below(double worst, double tol, const std::string& what) {
  char buf[200];
  std::snprintf(buf, sizeof buf, "%s max %.3e (tol %.0e)", what.c_str(), worst,
                tol);
  return {worst < tol, buf};
}

Outcome combine(const std::vector<Outcome>& parts) {
  Outcome out{true, ""};
  for (const auto& p : parts) {
    out.pass = out.pass && p.pass;
    if (!out.detail.empty()) out.detail += "; ";
    out.detail += p.detail;
  }
  return out;
}

Outcome foundation() {
  const EllipticContext ctx(kTau);
  Draws d(101);
  const double theta_heat = worst_of(200, [&] {
    const Complex z = d.cell() - 0.5 - 0.5 * kTau;
    return rel(4.0 * kI * kPi * theta(z, ctx, 0, 1), theta(z, ctx, 2));
  });
  const double kronecker_heat = worst_of(200, [&] {
    const Complex h = d.cell(), z = d.cell();
    return rel(kTwoPiI * phi_dtau_direct(h, z, ctx), phi(h, z, ctx, 1, 1));
  });
  const double periodic = worst_of(200, [&] {
    const Complex h = d.cell(), z = d.cell();
    const Complex f = phi(h, z, ctx), e = std::exp(-kTwoPiI * h);
    return std::max({rel(phi(h, z + 1.0, ctx), f),
                     rel(phi(h, z + kTau, ctx), e * f),
                     rel(phi(h, z - kTau, ctx), f / e)});
  });
  return combine({below(theta_heat, 1e-10, "theta heat"),
                  below(kronecker_heat, 1e-10, "Kronecker heat"),
                  below(periodic, 1e-10, "quasi-periodicity")});
}

Outcome scalar_identities() {
  const EllipticContext ctx(kTau);
  Draws d(202);
  const double fay = worst_of(200, [&] {
    const Complex h1 = d.cell(), h2 = d.cell();
    const Complex z1 = d.cell(), z2 = d.cell(), z3 = d.cell();
    const Complex t1 = phi(h1, z1 - z2, ctx) * phi(h2, z2 - z3, ctx);
    const Complex t2 = phi(-h2, z3 - z1, ctx) * phi(h1 - h2, z1 - z2, ctx);
    const Complex t3 = phi(h2 - h1, z2 - z3, ctx) * phi(-h1, z3 - z1, ctx);
    return std::abs(t1 + t2 + t3) /
           std::max({std::abs(t1), std::abs(t2), std::abs(t3)});
  });
  std::vector<Outcome> parts{below(fay, 1e-10, "scalar Fay")};
  for (const int n : {2, 3}) {
    const double general = worst_of(200, [&] {
      const std::array<Complex, 3> z{d.cell(), d.cell(), d.cell()};
      return basis_fay_residual(d.index(n), d.index(n), n, d.cell(), d.cell(),
                                z, ctx)
          .relative();
    });
    const double classical = worst_of(200, [&] {
      MultiIndex a, b;
      do {
        a = d.index(n);
        b = d.index(n);
      } while (a.is_zero_mod(n) || b.is_zero_mod(n) || (a - b).is_zero_mod(n));
      const std::array<Complex, 3> z{d.cell(), d.cell(), d.cell()};
      return basis_fay_residual(a, b, n, 0.0, 0.0, z, ctx).relative();
    });
    parts.push_back(
        below(general, 1e-10, "N=" + std::to_string(n) + " generic ħ,η"));
    parts.push_back(
        below(classical, 1e-10, "N=" + std::to_string(n) + " ħ=η=0"));
  }
  return combine(parts);
}

Outcome super_fay() {
  const EllipticContext ctx(kTau);
  Draws d(303);
  std::vector<Outcome> parts;
  const struct {
    PhiSetup setup;
    const char* name;
  } cases[] = {{{Kind::kElliptic, false, &ctx}, "full"},
               {{Kind::kElliptic, true, &ctx}, "truncated"},
               {{Kind::kTrig, false, nullptr}, "trig"},
               {{Kind::kRational, false, nullptr}, "rational"}};
  for (const auto& c : cases) {
    const bool box = c.setup.kind != Kind::kElliptic;
    const double worst = worst_of(200, [&] {
      const std::array<Complex, 2> h{box ? d.box() : d.cell(),
                                     box ? d.box() : d.cell()};
      return fay_residual(c.setup, h, {gen_of(gen::kMu1), gen_of(gen::kMu2)},
                          d.points(box), gen_of(gen::kOmega))
          .relative();
    });
    parts.push_back(below(worst, 1e-10, c.name));
  }
  return combine(parts);
}

Outcome super_heat() {
  const EllipticContext ctx(kTau);
  Draws d(404);
  std::vector<Outcome> parts;
  for (const bool truncated : {false, true}) {
    const double worst = worst_of(200, [&] {
      const auto p = d.points();
      return heat_residual(d.cell(), gen_of(gen::kMu1), p[0], p[1],
                           gen_of(gen::kOmega), ctx, truncated)
          .relative();
    });
    parts.push_back(below(worst, 1e-9, truncated ? "truncated" : "full"));
  }
  return combine(parts);
}

Outcome supertranslations() {
  const EllipticContext ctx(kTau);
  Draws d(505);
  std::vector<Outcome> parts;
  for (const Direction dir : {Direction::kOne, Direction::kTau})
    for (int slot = 1; slot <= 2; ++slot) {
      const double worst = worst_of(200, [&] {
        const auto p = d.points();
        return periodicity_residual(dir, slot, d.cell(), gen_of(gen::kMu1),
                                    p[0], p[1], gen_of(gen::kOmega), ctx)
            .relative();
      });
      parts.push_back(below(worst,
                            1e-9, std::string(dir == Direction::kOne ? "1" : "τ") +
                                      "/slot" + std::to_string(slot)));
    }
  // Truncated: the multiplier is the scalar exp(-2πiħ).
  const double trunc = worst_of(200, [&] {
    const auto p = d.points();
    const Complex h = d.cell();
    const auto g1 = transition_factor(1, h, GrassmannElement{}, p[0], p[1],
                                      gen_of(gen::kOmega));
    const double multiplier =
        rel(g1, GrassmannElement(std::exp(-kTwoPiI * h)));
    return std::max(multiplier,
                    periodicity_residual(Direction::kTau, 1, h,
                                         gen_of(gen::kMu1), p[0], p[1],
                                         gen_of(gen::kOmega), ctx, true)
                        .relative());
  });
  parts.push_back(below(trunc, 1e-9, "truncated exp(-2πiħ)"));
  return combine(parts);
}

Outcome heisenberg() {
  double worst = 0.0;
  for (int n = 2; n <= 4; ++n) {
    const HeisenbergBasis b(n);
    auto power = [](const ComplexMatrix& m, int p) {
      auto out = ComplexMatrix::identity(m.rows());
      for (int i = 0; i < p; ++i) out = out * m;
      return out;
    };
    const auto id = ComplexMatrix::identity(n);
    worst = std::max({worst, max_abs(power(b.clock(), n) - id),
                      max_abs(power(b.shift(), n) - id)});
    for (const auto a : b.indices()) {
      ComplexMatrix lhs = power(b.clock(), a.a1) * power(b.shift(), a.a2);
      const Complex e = std::exp(kTwoPiI * static_cast<double>(a.a1 * a.a2) /
                                 static_cast<double>(n));
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) lhs(r, c) *= e;
      worst = std::max(
          worst, max_abs(lhs - power(b.shift(), a.a2) * power(b.clock(), a.a1)));
      for (const auto c : b.indices()) {
        ComplexMatrix rhs = b.t_matrix(a + c);
        const Complex k = kappa(a, c, n);
        for (int r = 0; r < n; ++r)
          for (int s = 0; s < n; ++s) rhs(r, s) *= k;
        worst = std::max(worst, max_abs(b.t_matrix(a) * b.t_matrix(c) - rhs));
        const Complex k4 = kappa(c, a, n);
        worst = std::max({worst, std::abs(kappa(-a, c, n) - k4),
                          std::abs(kappa(c, a - c, n) - k4),
                          std::abs(kappa(a - c, -a, n) - k4)});
      }
    }
  }
  return below(worst, 1e-13, "N=2,3,4 all pairs");
}

Outcome ordinary_ybe() {
  const EllipticContext ctx(kTau);
  Draws d(707);
  std::vector<Outcome> parts;
  for (const int n : {2, 3}) {
    const HeisenbergBasis b(n);
    const double aybe = worst_of(100, [&] {
      const std::array<Complex, 3> z{d.cell(), d.cell(), d.cell()};
      return aybe_residual({d.cell(), d.cell()}, z, b, ctx).relative();
    });
    const double cybe = worst_of(100, [&] {
      const std::array<Complex, 3> z{d.cell(), d.cell(), d.cell()};
      return cybe_residual(z, b, ctx).relative();
    });
    parts.push_back(below(aybe, 1e-10, "AYBE N=" + std::to_string(n)));
    parts.push_back(below(cybe, 1e-10, "CYBE N=" + std::to_string(n)));
  }
  return combine(parts);
}

Outcome super_ybe() {
  const EllipticContext ctx(kTau);
  Draws d(808);
  std::vector<Outcome> parts;
  for (const auto [n, count] : {std::pair{2, 100}, std::pair{3, 25}}) {
    const HeisenbergBasis b(n);
    const double aybe = worst_of(count, [&] {
      return super_aybe_residual({d.cell(), d.cell()},
                                 {gen_of(gen::kMu1), gen_of(gen::kMu2)},
                                 d.points(), gen_of(gen::kOmega), b, ctx)
          .relative();
    });
    const double cybe = worst_of(count, [&] {
      return super_cybe_residual(d.points(), gen_of(gen::kOmega), b, ctx)
          .relative();
    });
    parts.push_back(below(aybe, 1e-9, "super AYBE N=" + std::to_string(n)));
    parts.push_back(below(cybe, 1e-9, "super CYBE N=" + std::to_string(n)));
  }
  return combine(parts);
}

Outcome cross_representation() {
  const EllipticContext ctx(kTau);
  const auto kernel = elliptic_kernel(ctx);
  Draws d(909);
  const auto w = gen_of(gen::kOmega), m = gen_of(gen::kMu1);
  const double phi_forms = worst_of(200, [&] {
    const auto p = d.points();
    const Complex h = d.cell();
    return rel(super_phi(kernel, h, m, p[0], p[1], w, PhiForm::kTau).evaluate(),
               super_phi(kernel, h, m, p[0], p[1], w, PhiForm::kOperator)
                   .evaluate());
  });
  std::vector<Outcome> parts{below(phi_forms, 1e-11, "Φ τ vs operator")};
  for (const int n : {2, 3}) {
    const HeisenbergBasis b(n);
    const double basis_forms = worst_of(200, [&] {
      const auto p = d.points();
      const Complex h = d.cell();
      const auto a = d.index(n);
      const auto ref =
          super_basis_phi(a, n, h, m, p[0], p[1], w, ctx).evaluate();
      double worst = 0.0;
      for (const BasisForm f : {BasisForm::kMuShift, BasisForm::kFullTau,
                                BasisForm::kFullTauOuterExp})
        worst = std::max(
            worst,
            rel(ref, super_basis_phi(a, n, h, m, p[0], p[1], w, ctx, f)
                         .evaluate()));
      return worst;
    });
    const double r_forms = worst_of(50, [&] {
      const auto p = d.points();
      const Complex h = d.cell();
      const auto direct = build_super_R(h, m, p[0], p[1], w, b, ctx).m;
      return std::max(
          rel(direct,
              build_super_R_operator_form(h, m, p[0], p[1], w, b, ctx, false).m),
          rel(direct,
              build_super_R_operator_form(h, m, p[0], p[1], w, b, ctx, true).m));
    });
    parts.push_back(
        below(basis_forms, 1e-11, "Φ_α forms N=" + std::to_string(n)));
    parts.push_back(below(r_forms, 1e-11, "super R forms N=" + std::to_string(n)));
  }
  return combine(parts);
}

Outcome finite_differences() {
  constexpr double kStep = 1e-5;
  const EllipticContext ctx(kTau), up(kTau + kStep), down(kTau - kStep);
  Draws d(1010);
  auto fd_rel = [](Complex an, Complex fd) {
    return std::abs(an - fd) / std::abs(an);
  };
  double worst = 0.0;
  int derivatives = 0;
  auto track = [&](const std::function<double()>& f) {
    worst = std::max(worst, worst_of(100, f));
    ++derivatives;
  };
  for (int j = 0; j <= 4; ++j)
    for (int k = 0; j + k <= 4; ++k) {
      if (j > 0)
        track([&] {
          const Complex h = d.cell(), z = d.cell();
          return fd_rel(phi(h, z, ctx, j, k),
                        (phi(h + kStep, z, ctx, j - 1, k) -
                         phi(h - kStep, z, ctx, j - 1, k)) /
                            (2 * kStep));
        });
      if (j == 0 && k > 0)
        track([&] {
          const Complex h = d.cell(), z = d.cell();
          return fd_rel(phi(h, z, ctx, j, k),
                        (phi(h, z + kStep, ctx, j, k - 1) -
                         phi(h, z - kStep, ctx, j, k - 1)) /
                            (2 * kStep));
        });
      track([&] {
        const Complex h = d.cell(), z = d.cell();
        return fd_rel(phi_dtau_direct(h, z, ctx, j, k),
                      (phi(h, z, up, j, k) - phi(h, z, down, j, k)) /
                          (2 * kStep));
      });
      if (j > 0)
        track([&] {
          const Complex h = d.box(), z = d.box();
          return std::max(
              fd_rel(phi_trig(h, z, j, k), (phi_trig(h + kStep, z, j - 1, k) -
                                            phi_trig(h - kStep, z, j - 1, k)) /
                                               (2 * kStep)),
              fd_rel(phi_rat(h, z, j, k), (phi_rat(h + kStep, z, j - 1, k) -
                                           phi_rat(h - kStep, z, j - 1, k)) /
                                              (2 * kStep)));
        });
      if (j == 0 && k > 0)
        track([&] {
          const Complex h = d.box(), z = d.box();
          return std::max(
              fd_rel(phi_trig(h, z, j, k), (phi_trig(h, z + kStep, j, k - 1) -
                                            phi_trig(h, z - kStep, j, k - 1)) /
                                               (2 * kStep)),
              fd_rel(phi_rat(h, z, j, k), (phi_rat(h, z + kStep, j, k - 1) -
                                           phi_rat(h, z - kStep, j, k - 1)) /
                                              (2 * kStep)));
        });
    }
  for (int j = 0; j <= 1; ++j)
    track([&] {
      const Complex h = d.cell(), z = d.cell();
      return fd_rel(phi_dtau(h, z, ctx, j),
                    (phi(h, z, up, j, 0) - phi(h, z, down, j, 0)) / (2 * kStep));
    });
  for (int dz = 1; dz <= 5; ++dz)
    track([&] {
      const Complex z = d.cell() - 0.5 - 0.5 * kTau;
      return fd_rel(theta(z, ctx, dz), (theta(z + kStep, ctx, dz - 1) -
                                        theta(z - kStep, ctx, dz - 1)) /
                                           (2 * kStep));
    });
  track([&] {
    const Complex z = d.cell() - 0.5 - 0.5 * kTau;
    return fd_rel(theta(z, ctx, 0, 1),
                  (theta(z, up) - theta(z, down)) / (2 * kStep));
  });
  // Full τ-derivative of the basis functions.
  for (int j = 0; j <= 1; ++j)
    for (int k = 0; j + k <= 3; ++k)
      track([&] {
        const MultiIndex a = d.index(3);
        const Complex h = 0.25 * d.box(), z = d.cell();
        return fd_rel(basis_phi(a, 3, h, z, ctx, j, k, true),
                      (basis_phi(a, 3, h, z, up, j, k) -
                       basis_phi(a, 3, h, z, down, j, k)) /
                          (2 * kStep));
      });
  return below(worst, 1e-6,
               std::to_string(derivatives) + " derivatives × 100 points");
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "theta/Kronecker heat equations and quasi-periodicity", 5.0,
       foundation},
      {2, "scalar Fay and basis-function three-term relations", 0.0,
       scalar_identities},
      {3, "super Fay identity (full, truncated, trig, rational)", 30.0,
       super_fay},
      {4, "super heat equation (full and truncated)", 0.0, super_heat},
      {5, "quasi-periodicity under supertranslations", 0.0, supertranslations},
      {6, "Heisenberg relations and cocycle identities", 0.0, heisenberg},
      {7, "ordinary AYBE and CYBE", 60.0, ordinary_ybe},
      {8, "super AYBE and super CYBE", 300.0, super_ybe},
      {9, "cross-representation agreement", 0.0, cross_representation},
      {10, "analytic derivatives vs central finite differences", 0.0,
       finite_differences},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    if (c.time_limit > 0.0 && secs >= c.time_limit) {
      o.pass = false;
      o.detail += "; runtime over limit";
    }
    std::printf("%s %2d %s: %s [%.2f s%s]\n", o.pass ? "PASS" : "FAIL", c.id,
                c.title, o.detail.c_str(), secs,
                c.time_limit > 0.0
                    ? (", limit " + std::to_string(static_cast<int>(c.time_limit)) +
                       " s")
                          .c_str()
                    : "");
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
