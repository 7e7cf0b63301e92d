#pragma once

// Odd supersymmetric Kronecker function and its identity checkers.
//
//   Φ^{ħ|μ}(z1, z2 | ζ1, ζ2) = (ζ1 - ζ2) φ + ω ∂_ħ φ + 2πi ζ1ζ2ω ∂_τ φ
//                            + ζ1ζ2μ ∂_ħ φ + ½ (ζ1 + ζ2) μω ∂_ħ² φ,
//
// all φ evaluated at (ħ, z1 - z2). Φ is kept symbolic as a SuperFunction
// (Grassmann coefficient × derivative descriptor) until evaluation, so that
// super-differential operators can act before numbers are substituted.

#include <compare>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "superkron/elliptic.hpp"
#include "superkron/grassmann.hpp"

namespace superkron {

/// A scalar function f(ħ, z) with a derivative table, e.g. φ, coth ħ + coth z.
class ScalarKernel {
 public:
  virtual ~ScalarKernel() = default;
  [[nodiscard]] virtual DerivativeTable table(Complex hbar,
                                              Complex z) const = 0;
  /// Largest j + k for which tau[j][k] is available; -1 without τ.
  [[nodiscard]] virtual int max_tau_order() const = 0;
  [[nodiscard]] virtual std::string name() const = 0;
};

enum class Kind { kElliptic, kTrig, kRational };

const char* to_string(Kind kind);
Kind kind_from_string(const std::string& s);

std::shared_ptr<const ScalarKernel> elliptic_kernel(const EllipticContext& ctx);
std::shared_ptr<const ScalarKernel> trig_kernel(
    double pole_radius = EllipticContext::kDefaultPoleRadius);
std::shared_ptr<const ScalarKernel> rational_kernel(
    double pole_radius = EllipticContext::kDefaultPoleRadius);

/// ∂_ħ^j ∂_{z1}^k (∂_τ if tau) of the kernel at (ħ, z1 - z2).
struct Descriptor {
  int j = 0;
  int k = 0;
  int tau = 0;
  friend auto operator<=>(const Descriptor&, const Descriptor&) = default;
};

/// Point of C^{1|1}: even coordinate z and odd partner ζ.
struct SuperPoint {
  Complex z;
  GrassmannElement zeta;
};

class SuperFunction {
 public:
  struct Term {
    Descriptor d;
    GrassmannElement coeff;
  };

  SuperFunction(std::shared_ptr<const ScalarKernel> kernel, Complex hbar,
                Complex z1, Complex z2);

  /// Adds coeff · D_d f. Throws CatalogError outside the kernel's catalog.
  void add(Descriptor d, const GrassmannElement& coeff);

  [[nodiscard]] GrassmannElement evaluate() const;

  [[nodiscard]] const std::vector<Term>& terms() const { return terms_; }
  [[nodiscard]] const std::shared_ptr<const ScalarKernel>& kernel() const {
    return kernel_;
  }
  [[nodiscard]] Complex hbar() const { return hbar_; }
  [[nodiscard]] Complex z1() const { return z1_; }
  [[nodiscard]] Complex z2() const { return z2_; }

  /// True iff the descriptor is available for this kernel.
  [[nodiscard]] bool in_catalog(Descriptor d) const;

  SuperFunction& operator+=(const SuperFunction& o);
  SuperFunction& operator-=(const SuperFunction& o);
  /// Left multiplication of every coefficient: x · F.
  friend SuperFunction operator*(const GrassmannElement& x,
                                 const SuperFunction& f);
  friend SuperFunction operator+(SuperFunction a, const SuperFunction& b) {
    return a += b;
  }
  friend SuperFunction operator-(SuperFunction a, const SuperFunction& b) {
    return a -= b;
  }

 private:
  void check_compatible(const SuperFunction& o) const;

  std::shared_ptr<const ScalarKernel> kernel_;
  Complex hbar_, z1_, z2_;
  std::vector<Term> terms_;  // sorted by descriptor, zero coefficients dropped
};

// Super-differential operators acting on SuperFunction.
namespace op {
/// Left Grassmann derivative ∂_g (e.g. ∂_ω, ∂_{ζ1}).
struct GrassmannDerivative {
  int generator;
};
/// Left multiplication by a Grassmann element (e.g. ζ1·, μ·).
struct MultiplyLeft {
  GrassmannElement factor;
};
struct DerivHbar {};
struct DerivZ1 {};
struct DerivZ2 {};
/// ∂_τ. A second τ-derivative is rewritten through 2πi ∂_τ φ = ∂_ħ ∂_z φ.
struct DerivTau {};
}  // namespace op

using SuperOperator = std::variant<op::GrassmannDerivative, op::MultiplyLeft,
                                   op::DerivHbar, op::DerivZ1, op::DerivZ2,
                                   op::DerivTau>;

/// Throws CatalogError if a coefficient derivative leaves the catalog.
SuperFunction apply_super_operator(const SuperFunction& f,
                                   const SuperOperator& o);

/// How the ζ1ζ2ω term is written: 2πi ∂_τ φ, or ∂_ħ ∂_{z1} φ.
enum class PhiForm { kTau, kOperator };

/// Φ over an arbitrary kernel. mu may be zero (truncated function).
/// Throws std::invalid_argument if an argument is not odd, omega is not a
/// single generator, or mu/zeta coincide with omega; CatalogError for the
/// τ form over a kernel without τ.
SuperFunction super_phi(std::shared_ptr<const ScalarKernel> kernel,
                        Complex hbar, const GrassmannElement& mu,
                        const SuperPoint& p1, const SuperPoint& p2,
                        const GrassmannElement& omega,
                        PhiForm form = PhiForm::kTau);

/// Elliptic Φ in the τ form.
SuperFunction super_phi(Complex hbar, const GrassmannElement& mu,
                        const SuperPoint& p1, const SuperPoint& p2,
                        const GrassmannElement& omega,
                        const EllipticContext& ctx);

/// Φ^{ħ|0}: the μ-terms dropped.
SuperFunction super_phi_truncated(Complex hbar, const SuperPoint& p1,
                                  const SuperPoint& p2,
                                  const GrassmannElement& omega,
                                  const EllipticContext& ctx);

/// Closed-form trigonometric / rational Φ.
GrassmannElement super_phi_degenerate(
    Kind kind, Complex hbar, const GrassmannElement& mu, const SuperPoint& p1,
    const SuperPoint& p2, const GrassmannElement& omega,
    double pole_radius = EllipticContext::kDefaultPoleRadius);

/// A Grassmann-valued identity residual with its scale: the largest
/// coefficient over the identity's individual terms.
struct IdentityResidual {
  GrassmannElement residual;
  double scale = 0.0;
  [[nodiscard]] double absolute() const { return residual.max_abs_coeff(); }
  [[nodiscard]] double relative() const {
    return scale > 0.0 ? absolute() / scale : absolute();
  }
};

/// Shared parameters for Φ-based checks.
struct PhiSetup {
  Kind kind = Kind::kElliptic;
  bool truncated = false;
  const EllipticContext* ctx = nullptr;  // required for kElliptic
  double pole_radius = EllipticContext::kDefaultPoleRadius;
};

/// Evaluated Φ for the setup's kind (elliptic via SuperFunction, degenerate
/// kinds in closed form).
GrassmannElement evaluate_phi(const PhiSetup& setup, Complex hbar,
                              const GrassmannElement& mu, const SuperPoint& p1,
                              const SuperPoint& p2,
                              const GrassmannElement& omega);

/// Three-term super Fay sum
///   Φ^{ħ1|μ1}(z1,z2)Φ^{ħ2|μ2}(z2,z3) + Φ^{-ħ2|-μ2}(z3,z1)Φ^{ħ1-ħ2|μ1-μ2}(z1,z2)
///   + Φ^{ħ2-ħ1|μ2-μ1}(z2,z3)Φ^{-ħ1|-μ1}(z3,z1)
/// with products taken in this order. The truncated setup zeroes μ.
struct FayTerms {
  GrassmannElement t1, t2, t3;
};
FayTerms fay_terms(const PhiSetup& setup, const std::array<Complex, 2>& hbars,
                   const std::array<GrassmannElement, 2>& mus,
                   const std::array<SuperPoint, 3>& points,
                   const GrassmannElement& omega);
IdentityResidual fay_residual(const PhiSetup& setup,
                              const std::array<Complex, 2>& hbars,
                              const std::array<GrassmannElement, 2>& mus,
                              const std::array<SuperPoint, 3>& points,
                              const GrassmannElement& omega);

/// (∂_ω + 2πi(ζ1+ζ2)∂_τ)Φ - (∂_{ζ1} + ζ1∂_{z1} - ½μ∂_ħ)∂_ħΦ; the μ-term is
/// absent when truncated. ω and ζ1 must be single generators.
IdentityResidual heat_residual(Complex hbar, const GrassmannElement& mu,
                               const SuperPoint& p1, const SuperPoint& p2,
                               const GrassmannElement& omega,
                               const EllipticContext& ctx,
                               bool truncated = false);

enum class Direction { kOne, kTau };

/// Transition factor for the τ-supertranslation:
///   g1 = exp(-2πi(ħ + ζ1μ + πiωμ)),  g2 = exp(2πi(ħ + ζ2μ + πiωμ)).
GrassmannElement transition_factor(int slot, Complex hbar,
                                   const GrassmannElement& mu,
                                   const SuperPoint& p1, const SuperPoint& p2,
                                   const GrassmannElement& omega);

/// Φ evaluated at the translated point minus its expected multiple of Φ.
IdentityResidual periodicity_residual(Direction direction, int slot,
                                      Complex hbar, const GrassmannElement& mu,
                                      const SuperPoint& p1,
                                      const SuperPoint& p2,
                                      const GrassmannElement& omega,
                                      const EllipticContext& ctx,
                                      bool truncated = false);

/// Evaluates f with z_slot shifted by an even nilpotent soul (Taylor series
/// in the soul, terminated by nilpotency).
GrassmannElement evaluate_shifted(const SuperFunction& f, int slot,
                                  const GrassmannElement& soul);

/// Richardson-extrapolated lim_{z12 -> 0} z12 · Φ along z12 = r e^{iθ},
/// r = r0 / 2^i for i < levels.
GrassmannElement residue_limit(Complex hbar, const GrassmannElement& mu,
                               const GrassmannElement& zeta1,
                               const GrassmannElement& zeta2,
                               const GrassmannElement& omega, Complex z2,
                               const EllipticContext& ctx, double theta = 0.7,
                               double r0 = 0.1, int levels = 8);

}  // namespace superkron
