#include "superkron/superfunc.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>

#include "superkron/errors.hpp"

namespace superkron {

namespace {

class EllipticKernel final : public ScalarKernel {
 public:
  explicit EllipticKernel(const EllipticContext& ctx) : ctx_(ctx) {}
  DerivativeTable table(Complex hbar, Complex z) const override {
    return kronecker_table(hbar, z, ctx_);
  }
  int max_tau_order() const override { return DerivativeTable::kMaxOrder; }
  std::string name() const override { return "elliptic"; }

 private:
  EllipticContext ctx_;
};

class TrigKernel final : public ScalarKernel {
 public:
  explicit TrigKernel(double r) : radius_(r) {}
  DerivativeTable table(Complex hbar, Complex z) const override {
    return trig_table(hbar, z, radius_);
  }
  int max_tau_order() const override { return -1; }
  std::string name() const override { return "trig"; }

 private:
  double radius_;
};

class RationalKernel final : public ScalarKernel {
 public:
  explicit RationalKernel(double r) : radius_(r) {}
  DerivativeTable table(Complex hbar, Complex z) const override {
    return rational_table(hbar, z, radius_);
  }
  int max_tau_order() const override { return -1; }
  std::string name() const override { return "rational"; }

 private:
  double radius_;
};

bool odd_or_zero(const GrassmannElement& x) {
  return x.is_zero() || x.parity() == Parity::kOdd;
}

// Index of x if it is exactly one generator with unit coefficient.
std::optional<int> single_generator(const GrassmannElement& x) {
  auto t = x.terms();
  if (t.size() != 1 || t[0].coeff != Complex(1.0) ||
      std::popcount(t[0].mask) != 1)
    return std::nullopt;
  return std::countr_zero(t[0].mask);
}

std::string describe(Descriptor d) {
  std::ostringstream os;
  os << "d_hbar^" << d.j << " d_z^" << d.k << (d.tau ? " d_tau" : "");
  return os.str();
}

Complex lookup(const DerivativeTable& t, Descriptor d) {
  return d.tau ? t.tau[d.j][d.k] : t.value[d.j][d.k];
}

}  // namespace

const char* to_string(Kind kind) {
  switch (kind) {
    case Kind::kElliptic:
      return "elliptic";
    case Kind::kTrig:
      return "trig";
    case Kind::kRational:
      return "rational";
  }
  return "?";
}

Kind kind_from_string(const std::string& s) {
  if (s == "elliptic") return Kind::kElliptic;
  if (s == "trig") return Kind::kTrig;
  if (s == "rational") return Kind::kRational;
  throw std::invalid_argument("unknown kind: " + s);
}

std::shared_ptr<const ScalarKernel> elliptic_kernel(
    const EllipticContext& ctx) {
  return std::make_shared<EllipticKernel>(ctx);
}
std::shared_ptr<const ScalarKernel> trig_kernel(double pole_radius) {
  return std::make_shared<TrigKernel>(pole_radius);
}
std::shared_ptr<const ScalarKernel> rational_kernel(double pole_radius) {
  return std::make_shared<RationalKernel>(pole_radius);
}

SuperFunction::SuperFunction(std::shared_ptr<const ScalarKernel> kernel,
                             Complex hbar, Complex z1, Complex z2)
    : kernel_(std::move(kernel)), hbar_(hbar), z1_(z1), z2_(z2) {
  if (!kernel_) throw std::invalid_argument("SuperFunction: null kernel");
}

bool SuperFunction::in_catalog(Descriptor d) const {
  if (d.j < 0 || d.k < 0 || d.tau < 0 || d.tau > 1) return false;
  if (d.tau) return d.j + d.k <= kernel_->max_tau_order();
  return d.j + d.k <= DerivativeTable::kMaxOrder;
}

void SuperFunction::add(Descriptor d, const GrassmannElement& coeff) {
  if (coeff.is_zero()) return;
  if (!in_catalog(d))
    throw CatalogError("derivative outside catalog for kernel " +
                       kernel_->name() + ": " + describe(d));
  auto it = std::lower_bound(
      terms_.begin(), terms_.end(), d,
      [](const Term& t, const Descriptor& x) { return t.d < x; });
  if (it != terms_.end() && it->d == d) {
    it->coeff += coeff;
    if (it->coeff.is_zero()) terms_.erase(it);
  } else {
    terms_.insert(it, Term{d, coeff});
  }
}

GrassmannElement SuperFunction::evaluate() const {
  GrassmannElement out;
  if (terms_.empty()) return out;
  const DerivativeTable t = kernel_->table(hbar_, z1_ - z2_);
  for (const auto& term : terms_) out += term.coeff * lookup(t, term.d);
  return out;
}

void SuperFunction::check_compatible(const SuperFunction& o) const {
  if (kernel_ != o.kernel_ || hbar_ != o.hbar_ || z1_ != o.z1_ ||
      z2_ != o.z2_)
    throw std::invalid_argument(
        "SuperFunction: operands over different kernels or points");
}

SuperFunction& SuperFunction::operator+=(const SuperFunction& o) {
  check_compatible(o);
  for (const auto& t : o.terms_) add(t.d, t.coeff);
  return *this;
}

SuperFunction& SuperFunction::operator-=(const SuperFunction& o) {
  check_compatible(o);
  for (const auto& t : o.terms_) add(t.d, -t.coeff);
  return *this;
}

SuperFunction operator*(const GrassmannElement& x, const SuperFunction& f) {
  SuperFunction out(f.kernel_, f.hbar_, f.z1_, f.z2_);
  for (const auto& t : f.terms_) out.add(t.d, x * t.coeff);
  return out;
}

SuperFunction apply_super_operator(const SuperFunction& f,
                                   const SuperOperator& o) {
  SuperFunction out(f.kernel(), f.hbar(), f.z1(), f.z2());
  for (const auto& t : f.terms()) {
    Descriptor d = t.d;
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, op::GrassmannDerivative>) {
            out.add(d, left_derivative(t.coeff, x.generator));
          } else if constexpr (std::is_same_v<T, op::MultiplyLeft>) {
            out.add(d, x.factor * t.coeff);
          } else if constexpr (std::is_same_v<T, op::DerivHbar>) {
            out.add({d.j + 1, d.k, d.tau}, t.coeff);
          } else if constexpr (std::is_same_v<T, op::DerivZ1>) {
            out.add({d.j, d.k + 1, d.tau}, t.coeff);
          } else if constexpr (std::is_same_v<T, op::DerivZ2>) {
            out.add({d.j, d.k + 1, d.tau}, -t.coeff);
          } else if constexpr (std::is_same_v<T, op::DerivTau>) {
            if (d.tau == 0)
              out.add({d.j, d.k, 1}, t.coeff);
            else
              out.add({d.j + 1, d.k + 1, 1}, t.coeff * (1.0 / kTwoPiI));
          }
        },
        o);
  }
  return out;
}

SuperFunction super_phi(std::shared_ptr<const ScalarKernel> kernel,
                        Complex hbar, const GrassmannElement& mu,
                        const SuperPoint& p1, const SuperPoint& p2,
                        const GrassmannElement& omega, PhiForm form) {
  const auto w = single_generator(omega);
  if (!w) throw std::invalid_argument("super_phi: omega must be a generator");
  if (!odd_or_zero(mu) || !odd_or_zero(p1.zeta) || !odd_or_zero(p2.zeta))
    throw std::invalid_argument("super_phi: mu and zeta must be odd");
  const auto m = single_generator(mu);
  for (const auto* x : {&mu, &p1.zeta, &p2.zeta})
    if (single_generator(*x) == w)
      throw std::invalid_argument("super_phi: generator collides with omega");
  if (m && (single_generator(p1.zeta) == m || single_generator(p2.zeta) == m))
    throw std::invalid_argument("super_phi: mu collides with a zeta");

  const GrassmannElement& z1 = p1.zeta;
  const GrassmannElement& z2 = p2.zeta;
  const GrassmannElement z1z2 = z1 * z2;

  SuperFunction f(std::move(kernel), hbar, p1.z, p2.z);
  f.add({0, 0, 0}, z1 - z2);
  f.add({1, 0, 0}, omega);
  if (form == PhiForm::kTau)
    f.add({0, 0, 1}, kTwoPiI * (z1z2 * omega));
  else
    f.add({1, 1, 0}, z1z2 * omega);
  f.add({1, 0, 0}, z1z2 * mu);
  f.add({2, 0, 0}, 0.5 * ((z1 + z2) * mu * omega));
  return f;
}

SuperFunction super_phi(Complex hbar, const GrassmannElement& mu,
                        const SuperPoint& p1, const SuperPoint& p2,
                        const GrassmannElement& omega,
                        const EllipticContext& ctx) {
  return super_phi(elliptic_kernel(ctx), hbar, mu, p1, p2, omega);
}

SuperFunction super_phi_truncated(Complex hbar, const SuperPoint& p1,
                                  const SuperPoint& p2,
                                  const GrassmannElement& omega,
                                  const EllipticContext& ctx) {
  return super_phi(elliptic_kernel(ctx), hbar, GrassmannElement{}, p1, p2,
                   omega);
}

GrassmannElement super_phi_degenerate(Kind kind, Complex hbar,
                                      const GrassmannElement& mu,
                                      const SuperPoint& p1,
                                      const SuperPoint& p2,
                                      const GrassmannElement& omega,
                                      double pole_radius) {
  // Validation shared with the symbolic constructor.
  (void)super_phi(kind == Kind::kTrig ? trig_kernel(pole_radius)
                                      : rational_kernel(pole_radius),
                  hbar, mu, p1, p2, omega, PhiForm::kOperator);

  const Complex z = p1.z - p2.z;
  Complex scalar, d1, d2half;
  switch (kind) {
    case Kind::kTrig: {
      (void)trig_table(hbar, z, pole_radius);  // pole checks
      const Complex sh = std::sinh(hbar);
      scalar = std::cosh(hbar) / sh + std::cosh(z) / std::sinh(z);
      d1 = -1.0 / (sh * sh);
      d2half = std::cosh(hbar) / (sh * sh * sh);
      break;
    }
    case Kind::kRational:
      (void)rational_table(hbar, z, pole_radius);
      scalar = 1.0 / hbar + 1.0 / z;
      d1 = -1.0 / (hbar * hbar);
      d2half = 1.0 / (hbar * hbar * hbar);
      break;
    case Kind::kElliptic:
      throw std::invalid_argument(
          "super_phi_degenerate: kind must be trig or rational");
  }
  const GrassmannElement& z1 = p1.zeta;
  const GrassmannElement& z2 = p2.zeta;
  return (z1 - z2) * scalar + (omega + z1 * z2 * mu) * d1 +
         ((z1 + z2) * mu * omega) * d2half;
}

GrassmannElement evaluate_phi(const PhiSetup& setup, Complex hbar,
                              const GrassmannElement& mu, const SuperPoint& p1,
                              const SuperPoint& p2,
                              const GrassmannElement& omega) {
  const GrassmannElement m = setup.truncated ? GrassmannElement{} : mu;
  if (setup.kind == Kind::kElliptic) {
    if (!setup.ctx)
      throw std::invalid_argument("evaluate_phi: elliptic kind needs context");
    return super_phi(hbar, m, p1, p2, omega, *setup.ctx).evaluate();
  }
  return super_phi_degenerate(setup.kind, hbar, m, p1, p2, omega,
                              setup.pole_radius);
}

FayTerms fay_terms(const PhiSetup& setup, const std::array<Complex, 2>& hbars,
                   const std::array<GrassmannElement, 2>& mus,
                   const std::array<SuperPoint, 3>& p,
                   const GrassmannElement& omega) {
  const auto& [h1, h2] = hbars;
  const auto& [m1, m2] = mus;
  auto phi = [&](Complex h, const GrassmannElement& m, const SuperPoint& a,
                 const SuperPoint& b) {
    return evaluate_phi(setup, h, m, a, b, omega);
  };
  return {phi(h1, m1, p[0], p[1]) * phi(h2, m2, p[1], p[2]),
          phi(-h2, -m2, p[2], p[0]) * phi(h1 - h2, m1 - m2, p[0], p[1]),
          phi(h2 - h1, m2 - m1, p[1], p[2]) * phi(-h1, -m1, p[2], p[0])};
}

IdentityResidual fay_residual(const PhiSetup& setup,
                              const std::array<Complex, 2>& hbars,
                              const std::array<GrassmannElement, 2>& mus,
                              const std::array<SuperPoint, 3>& points,
                              const GrassmannElement& omega) {
  const FayTerms t = fay_terms(setup, hbars, mus, points, omega);
  return {t.t1 + t.t2 + t.t3,
          std::max({t.t1.max_abs_coeff(), t.t2.max_abs_coeff(),
                    t.t3.max_abs_coeff()})};
}

IdentityResidual heat_residual(Complex hbar, const GrassmannElement& mu,
                               const SuperPoint& p1, const SuperPoint& p2,
                               const GrassmannElement& omega,
                               const EllipticContext& ctx, bool truncated) {
  const auto w = single_generator(omega);
  const auto z1 = single_generator(p1.zeta);
  if (!w || !z1)
    throw std::invalid_argument(
        "heat_residual: omega and zeta1 must be single generators");

  const GrassmannElement m = truncated ? GrassmannElement{} : mu;
  const SuperFunction f = super_phi(hbar, m, p1, p2, omega, ctx);

  SuperFunction lhs = apply_super_operator(f, op::GrassmannDerivative{*w});
  lhs += (kTwoPiI * (p1.zeta + p2.zeta)) * apply_super_operator(f, op::DerivTau{});

  const SuperFunction df = apply_super_operator(f, op::DerivHbar{});
  SuperFunction rhs = apply_super_operator(df, op::GrassmannDerivative{*z1});
  rhs += apply_super_operator(apply_super_operator(df, op::DerivZ1{}),
                              op::MultiplyLeft{p1.zeta});
  if (!truncated)
    rhs -= apply_super_operator(apply_super_operator(df, op::DerivHbar{}),
                                op::MultiplyLeft{0.5 * m});

  const GrassmannElement l = lhs.evaluate(), r = rhs.evaluate();
  return {l - r, std::max(l.max_abs_coeff(), r.max_abs_coeff())};
}

GrassmannElement transition_factor(int slot, Complex hbar,
                                   const GrassmannElement& mu,
                                   const SuperPoint& p1, const SuperPoint& p2,
                                   const GrassmannElement& omega) {
  // g1 = exp(-2πi(ħ + ζ1μ + πiωμ)), g2 = exp(2πi(ħ + ζ2μ + πiωμ)).
  const GrassmannElement wm = kI * kPi * (omega * mu);
  if (slot == 1)
    return exp_even((-kTwoPiI) * (GrassmannElement(hbar) + p1.zeta * mu + wm));
  if (slot == 2)
    return exp_even(kTwoPiI * (GrassmannElement(hbar) + p2.zeta * mu + wm));
  throw std::invalid_argument("transition_factor: slot must be 1 or 2");
}

GrassmannElement evaluate_shifted(const SuperFunction& f, int slot,
                                  const GrassmannElement& soul) {
  if (slot != 1 && slot != 2)
    throw std::invalid_argument("evaluate_shifted: slot must be 1 or 2");
  GrassmannElement out;
  if (f.terms().empty()) return out;
  const DerivativeTable table = f.kernel()->table(f.hbar(), f.z1() - f.z2());
  const Complex z0 = slot == 1 ? f.z1() : f.z2();
  for (const auto& term : f.terms()) {
    auto derivative = [&](Complex, int order) {
      const Descriptor d{term.d.j, term.d.k + order, term.d.tau};
      if (!f.in_catalog(d))
        throw CatalogError("evaluate_shifted: " + describe(d));
      const double sign = (slot == 2 && order % 2) ? -1.0 : 1.0;
      return sign * lookup(table, d);
    };
    out += term.coeff * taylor_shift(derivative, z0, soul);
  }
  return out;
}

IdentityResidual periodicity_residual(Direction direction, int slot,
                                      Complex hbar, const GrassmannElement& mu,
                                      const SuperPoint& p1,
                                      const SuperPoint& p2,
                                      const GrassmannElement& omega,
                                      const EllipticContext& ctx,
                                      bool truncated) {
  if (slot != 1 && slot != 2)
    throw std::invalid_argument("periodicity_residual: slot must be 1 or 2");
  const GrassmannElement m = truncated ? GrassmannElement{} : mu;
  const auto kernel = elliptic_kernel(ctx);
  const GrassmannElement base =
      super_phi(kernel, hbar, m, p1, p2, omega).evaluate();

  SuperPoint q1 = p1, q2 = p2;
  SuperPoint& moved = slot == 1 ? q1 : q2;
  GrassmannElement shifted, expected;
  if (direction == Direction::kOne) {
    moved.z += 1.0;
    shifted = super_phi(kernel, hbar, m, q1, q2, omega).evaluate();
    expected = base;
  } else {
    const GrassmannElement soul = kTwoPiI * (moved.zeta * omega);
    moved.z += ctx.tau();
    moved.zeta += kTwoPiI * omega;
    shifted = evaluate_shifted(super_phi(kernel, hbar, m, q1, q2, omega), slot,
                               soul);
    expected = transition_factor(slot, hbar, m, p1, p2, omega) * base;
  }
  return {shifted - expected,
          std::max(shifted.max_abs_coeff(), expected.max_abs_coeff())};
}

GrassmannElement residue_limit(Complex hbar, const GrassmannElement& mu,
                               const GrassmannElement& zeta1,
                               const GrassmannElement& zeta2,
                               const GrassmannElement& omega, Complex z2,
                               const EllipticContext& ctx, double theta,
                               double r0, int levels) {
  if (levels < 1) throw std::invalid_argument("residue_limit: levels < 1");
  const auto kernel = elliptic_kernel(ctx);
  const Complex dir = std::polar(1.0, theta);
  // Richardson table over r_i = r0 / 2^i; error expands in powers of r.
  std::vector<GrassmannElement> prev;
  for (int i = 0; i < levels; ++i) {
    const Complex dz = (r0 / std::ldexp(1.0, i)) * dir;
    std::vector<GrassmannElement> cur;
    cur.push_back(
        dz * super_phi(kernel, hbar, mu, {z2 + dz, zeta1}, {z2, zeta2}, omega)
                 .evaluate());
    for (int m = 1; m <= i; ++m) {
      const double p = std::ldexp(1.0, m);
      cur.push_back((p * cur[m - 1] - prev[m - 1]) * (1.0 / (p - 1.0)));
    }
    prev = std::move(cur);
  }
  return prev.back();
}

}  // namespace superkron
