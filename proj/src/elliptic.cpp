#include "superkron/elliptic.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "superkron/errors.hpp"

namespace superkron {

namespace {

// Upper bound on the magnitude of one series term with |k + 1/2| = x after
// lattice reduction (|Im z| <= Im τ / 2), including the polynomial weight of
// the highest derivative carried by the jets.
double term_bound(double x, double im_tau) {
  double poly = std::pow(2.0 * kPi * x, kJetOrder) * (1.0 + kPi * x * x);
  return poly * std::exp(-kPi * im_tau * (x * x - x));
}

// Σ_k over the symmetric window, already lattice-reduced argument.
Jet theta_series(Complex z0, const EllipticContext& ctx) {
  const Complex tau = ctx.tau();
  const int kk = ctx.truncation();
  Jet out;
  for (int k = -kk - 1; k <= kk; ++k) {
    const double h = k + 0.5;
    const Complex term =
        std::exp(kI * kPi * tau * (h * h) + kTwoPiI * (z0 + 0.5) * h);
    const Complex w = kTwoPiI * h;  // d/dz weight
    const Complex wt = kI * kPi * (h * h);  // d/dτ weight
    Complex power = term;
    for (int n = 0; n <= kJetOrder; ++n) {
      const Complex cn = power / factorial(n);
      out.c[n].val += cn;
      out.c[n].dtau += cn * wt;
      power *= w;
    }
  }
  return out;
}

void check_pole(double dist, double radius, const char* what, Complex x) {
  if (dist <= radius) {
    std::ostringstream os;
    os << what << " = " << x << " lies within " << radius
       << " of a pole";
    throw PoleError(os.str());
  }
}

}  // namespace

EllipticContext::EllipticContext(Complex tau, double tol, double pole_radius,
                                 int k_max)
    : tau_(tau), tol_(tol), pole_radius_(pole_radius), k_max_(k_max) {
  if (!(tau.imag() > 0.0))
    throw std::invalid_argument("EllipticContext: Im tau must be positive");
  if (!(tol > 0.0) || !(pole_radius > 0.0) || k_max < 1)
    throw std::invalid_argument("EllipticContext: invalid tolerances");

  // Smallest K whose omitted tail (both signs, geometric safety 2) is
  // below tol.
  const double t = tau.imag();
  bool found = false;
  for (int k = 0; k <= k_max; ++k) {
    if (4.0 * term_bound(k + 1.5, t) < tol) {
      truncation_ = k;
      found = true;
      break;
    }
  }
  if (!found) {
    std::ostringstream os;
    os << "theta series needs more than k_max=" << k_max
       << " terms for Im tau=" << t;
    throw ConvergenceError(os.str());
  }
  theta0_ = theta_series(0.0, *this);
}

LatticePoint EllipticContext::reduction_shift(Complex z) const {
  const double n = std::round(z.imag() / tau_.imag());
  const double m = std::round((z - n * tau_).real());
  return {static_cast<long>(m), static_cast<long>(n)};
}

double EllipticContext::lattice_distance(Complex z) const {
  const LatticePoint p = reduction_shift(z);
  double best = std::abs(z - lattice_value(p));
  for (long dm = -1; dm <= 1; ++dm)
    for (long dn = -1; dn <= 1; ++dn)
      best = std::min(best,
                      std::abs(z - lattice_value({p.m + dm, p.n + dn})));
  return best;
}

Jet theta_jet(Complex z, const EllipticContext& ctx) {
  const LatticePoint p = ctx.reduction_shift(z);
  if (p.m == 0 && p.n == 0) return theta_series(z, ctx);

  // ϑ(z) = (-1)^{m+n} exp(πin²τ - 2πinz) ϑ(z - m - nτ).
  const Complex z0 = z - ctx.lattice_value(p);
  const Jet inner = theta_series(z0, ctx);
  const double n = static_cast<double>(p.n);

  // z0 depends on τ through -nτ: total τ-derivative of the k-th Taylor
  // coefficient picks up -n (k+1) c_{k+1}. The top coefficient is dropped,
  // so callers must not rely on the τ-part of c[kJetOrder].
  Jet reduced = inner;
  for (int k = 0; k < kJetOrder; ++k)
    reduced.c[k].dtau -= n * (k + 1) * inner.c[k + 1].val;

  const double sign = ((p.m + p.n) % 2 == 0) ? 1.0 : -1.0;
  const Complex pref =
      sign * std::exp(kI * kPi * n * n * ctx.tau() - kTwoPiI * n * z);
  Jet factor;
  Complex power = pref;
  const Complex w = -kTwoPiI * n;
  const Complex wt = kI * kPi * n * n;
  for (int k = 0; k <= kJetOrder; ++k) {
    const Complex ck = power / factorial(k);
    factor.c[k] = Dual(ck, ck * wt);
    power *= w;
  }
  return factor * reduced;
}

Complex theta(Complex z, const EllipticContext& ctx, int dz, int dtau) {
  if (dz < 0 || dz > 5 || dtau < 0 || dtau > 1)
    throw std::invalid_argument("theta: dz must be in 0..5, dtau in {0,1}");
  const Dual d = theta_jet(z, ctx).derivative(dz);
  return dtau ? d.dtau : d.val;
}

DerivativeTable kronecker_table(Complex hbar, Complex z,
                                const EllipticContext& ctx) {
  const double r = ctx.pole_radius();
  check_pole(ctx.lattice_distance(hbar), r, "hbar", hbar);
  check_pole(ctx.lattice_distance(z), r, "z", z);
  check_pole(ctx.lattice_distance(hbar + z), r, "hbar+z", hbar + z);

  const Jet num = theta_jet(hbar + z, ctx);
  const Jet inv_h = theta_jet(hbar, ctx).reciprocal();
  const Jet inv_z = theta_jet(z, ctx).reciprocal();
  const Dual scale = ctx.theta_at_zero().c[1];

  constexpr int kMax = DerivativeTable::kMaxOrder;
  DerivativeTable t;
  t.has_tau = true;
  for (int a = 0; a <= kMax; ++a) {
    for (int b = 0; a + b <= kMax; ++b) {
      // Coefficient of ε^a η^b in ϑ(ħ+z+ε+η) / (ϑ(ħ+ε) ϑ(z+η)).
      Dual acc;
      for (int a1 = 0; a1 <= a; ++a1)
        for (int b1 = 0; b1 <= b; ++b1)
          acc += Dual(binomial(a1 + b1, a1)) * num.c[a1 + b1] *
                 inv_h.c[a - a1] * inv_z.c[b - b1];
      acc *= scale;
      const double f = factorial(a) * factorial(b);
      t.value[a][b] = acc.val * f;
      t.tau[a][b] = acc.dtau * f;
    }
  }
  return t;
}

namespace {
void check_order(int j, int k) {
  if (j < 0 || k < 0 || j + k > DerivativeTable::kMaxOrder)
    throw std::invalid_argument("derivative order j+k must be in 0..4");
}
}  // namespace

Complex phi(Complex hbar, Complex z, const EllipticContext& ctx, int j,
            int k) {
  check_order(j, k);
  return kronecker_table(hbar, z, ctx).value[j][k];
}

Complex phi_dtau(Complex hbar, Complex z, const EllipticContext& ctx, int j) {
  if (j < 0 || j > 1) throw std::invalid_argument("phi_dtau: j must be 0 or 1");
  return kronecker_table(hbar, z, ctx).value[j + 1][1] / kTwoPiI;
}

Complex phi_dtau_direct(Complex hbar, Complex z, const EllipticContext& ctx,
                        int j, int k) {
  check_order(j, k);
  return kronecker_table(hbar, z, ctx).tau[j][k];
}

namespace {

// Taylor jet of coth at x (τ-parts unused).
Jet coth_jet(Complex x) {
  Jet sh, ch;
  const Complex s = std::sinh(x), c = std::cosh(x);
  for (int n = 0; n <= kJetOrder; ++n) {
    const double f = factorial(n);
    sh.c[n] = (n % 2 == 0 ? s : c) / f;
    ch.c[n] = (n % 2 == 0 ? c : s) / f;
  }
  return ch * sh.reciprocal();
}

// Distance from x to πiZ.
double trig_pole_distance(Complex x) {
  const double n = std::round(x.imag() / kPi);
  return std::abs(x - Complex(0.0, n * kPi));
}

}  // namespace

DerivativeTable trig_table(Complex hbar, Complex z, double pole_radius) {
  check_pole(trig_pole_distance(hbar), pole_radius, "hbar", hbar);
  check_pole(trig_pole_distance(z), pole_radius, "z", z);
  const Jet jh = coth_jet(hbar), jz = coth_jet(z);
  DerivativeTable t;
  for (int n = 0; n <= DerivativeTable::kMaxOrder; ++n) {
    t.value[n][0] += jh.derivative(n).val;
    t.value[0][n] += jz.derivative(n).val;
  }
  return t;
}

Complex phi_trig(Complex hbar, Complex z, int j, int k, double pole_radius) {
  check_order(j, k);
  return trig_table(hbar, z, pole_radius).value[j][k];
}

DerivativeTable rational_table(Complex hbar, Complex z, double pole_radius) {
  check_pole(std::abs(hbar), pole_radius, "hbar", hbar);
  check_pole(std::abs(z), pole_radius, "z", z);
  DerivativeTable t;
  // d^n/dx^n (1/x) = (-1)^n n! / x^{n+1}
  for (int n = 0; n <= DerivativeTable::kMaxOrder; ++n) {
    const double c = (n % 2 ? -1.0 : 1.0) * factorial(n);
    t.value[n][0] += c / std::pow(hbar, n + 1);
    t.value[0][n] += c / std::pow(z, n + 1);
  }
  return t;
}

Complex phi_rat(Complex hbar, Complex z, int j, int k, double pole_radius) {
  check_order(j, k);
  return rational_table(hbar, z, pole_radius).value[j][k];
}

}  // namespace superkron
