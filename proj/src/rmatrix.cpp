#include "superkron/rmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "superkron/errors.hpp"

namespace superkron {

namespace {

int mod(int a, int n) { return ((a % n) + n) % n; }

}  // namespace

MultiIndex MultiIndex::reduced(int n) const {
  return {mod(a1, n), mod(a2, n)};
}

bool MultiIndex::is_zero_mod(int n) const {
  return mod(a1, n) == 0 && mod(a2, n) == 0;
}

double max_abs(const ComplexMatrix& m) {
  double best = 0.0;
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) best = std::max(best, std::abs(m(r, c)));
  return best;
}

double max_abs(const DenseMatrix<GrassmannElement>& m) {
  double best = 0.0;
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      best = std::max(best, m(r, c).max_abs_coeff());
  return best;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      if (a(i, j) == Complex{}) continue;
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    }
  return out;
}

template <class T>
SiteMatrix<T> embed(const SiteMatrix<T>& two, int i, int j) {
  if (two.sites != 2)
    throw std::invalid_argument("embed: operand must act on two sites");
  if (i < 1 || i > 3 || j < 1 || j > 3 || i == j)
    throw std::invalid_argument("embed: invalid site pair");
  const int n = two.n;
  const int k = 6 - i - j;  // omitted site
  const int dim = n * n * n;
  SiteMatrix<T> out{n, 3, DenseMatrix<T>(dim, dim)};
  // Site s carries weight n^{3-s} in the flattened index.
  auto weight = [n](int site) { return site == 1 ? n * n : (site == 2 ? n : 1); };
  const int wi = weight(i), wj = weight(j), wk = weight(k);
  const int d2 = n * n;
  for (int r = 0; r < d2; ++r)
    for (int c = 0; c < d2; ++c) {
      const T& v = two.m(r, c);
      if (v == T{}) continue;
      const int row0 = (r / n) * wi + (r % n) * wj;
      const int col0 = (c / n) * wi + (c % n) * wj;
      for (int s = 0; s < n; ++s) out.m(row0 + s * wk, col0 + s * wk) = v;
    }
  return out;
}

template <class T>
SiteMatrix<T> swap_sites(const SiteMatrix<T>& two) {
  if (two.sites != 2)
    throw std::invalid_argument("swap_sites: operand must act on two sites");
  const int n = two.n;
  auto sw = [n](int x) { return (x % n) * n + x / n; };
  SiteMatrix<T> out{n, 2, DenseMatrix<T>(n * n, n * n)};
  for (int r = 0; r < n * n; ++r)
    for (int c = 0; c < n * n; ++c) out.m(sw(r), sw(c)) = two.m(r, c);
  return out;
}

template SiteMatrix<Complex> embed(const SiteMatrix<Complex>&, int, int);
template SiteMatrix<GrassmannElement> embed(
    const SiteMatrix<GrassmannElement>&, int, int);
template SiteMatrix<Complex> swap_sites(const SiteMatrix<Complex>&);
template SiteMatrix<GrassmannElement> swap_sites(
    const SiteMatrix<GrassmannElement>&);

HeisenbergBasis::HeisenbergBasis(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("HeisenbergBasis: N must be >= 1");
  q_ = ComplexMatrix(n, n);
  lambda_ = ComplexMatrix(n, n);
  // Rows and columns are labelled k = 1..N: Q_kk = exp(2πi k / N),
  // Λ_kl = 1 when k - l + 1 = 0 mod N.
  for (int r = 0; r < n; ++r) {
    q_(r, r) = std::exp(kTwoPiI * static_cast<double>(r + 1) /
                        static_cast<double>(n));
    lambda_(r, (r + 1) % n) = 1.0;
  }
  channels_.reserve(n * n);
  for (int a1 = 0; a1 < n; ++a1)
    for (int a2 = 0; a2 < n; ++a2) {
      const MultiIndex a{a1, a2};
      channels_.push_back(kron(t_matrix(a), t_matrix(-a)));
    }
}

ComplexMatrix HeisenbergBasis::clock_power(int p) const {
  ComplexMatrix out(n_, n_);
  for (int r = 0; r < n_; ++r)
    out(r, r) = std::exp(kTwoPiI * static_cast<double>(mod(p, n_) * (r + 1)) /
                         static_cast<double>(n_));
  return out;
}

ComplexMatrix HeisenbergBasis::shift_power(int p) const {
  ComplexMatrix out(n_, n_);
  for (int r = 0; r < n_; ++r) out(r, (r + mod(p, n_)) % n_) = 1.0;
  return out;
}

ComplexMatrix HeisenbergBasis::t_matrix(MultiIndex a) const {
  const Complex phase = std::exp(kI * kPi * static_cast<double>(a.a1) *
                                 static_cast<double>(a.a2) /
                                 static_cast<double>(n_));
  ComplexMatrix m = clock_power(a.a1) * shift_power(a.a2);
  for (int r = 0; r < n_; ++r)
    for (int c = 0; c < n_; ++c) m(r, c) *= phase;
  return m;
}

std::vector<MultiIndex> HeisenbergBasis::indices() const {
  std::vector<MultiIndex> out;
  for (int a1 = 0; a1 < n_; ++a1)
    for (int a2 = 0; a2 < n_; ++a2) out.push_back({a1, a2});
  return out;
}

const ComplexMatrix& HeisenbergBasis::channel(MultiIndex a) const {
  const MultiIndex r = a.reduced(n_);
  return channels_[r.a1 * n_ + r.a2];
}

ComplexMatrix t_matrix(MultiIndex a, const HeisenbergBasis& basis) {
  return basis.t_matrix(a);
}

Complex kappa(MultiIndex alpha, MultiIndex beta, int n) {
  const double e = static_cast<double>(beta.a1 * alpha.a2 - beta.a2 * alpha.a1);
  return std::exp(kI * kPi * e / static_cast<double>(n));
}

DerivativeTable basis_table(MultiIndex a, int n, Complex hbar, Complex z,
                            const EllipticContext& ctx, TauMode mode,
                            bool with_exponential) {
  const Complex omega = (static_cast<double>(a.a1) +
                         static_cast<double>(a.a2) * ctx.tau()) /
                        static_cast<double>(n);
  const DerivativeTable phi = kronecker_table(hbar + omega, z, ctx);
  constexpr int kMax = DerivativeTable::kMaxOrder;

  const double slope = static_cast<double>(a.a2) / static_cast<double>(n);
  const Complex c = with_exponential ? kTwoPiI * slope : Complex{};
  const Complex e = with_exponential ? std::exp(c * z) : Complex(1.0);

  DerivativeTable out;
  out.has_tau = true;
  for (int j = 0; j <= kMax; ++j)
    for (int k = 0; j + k <= kMax; ++k) {
      Complex v{}, t{};
      Complex cp = 1.0;  // c^{k-b}
      for (int b = k; b >= 0; --b) {
        const double w = binomial(k, b);
        v += w * cp * phi.value[j][b];
        Complex dt = phi.tau[j][b];
        if (mode == TauMode::kFull)
          dt = (j + b + 1 <= kMax && j + k < kMax)
                   ? dt + slope * phi.value[j + 1][b]
                   : Complex(std::nan(""), std::nan(""));
        t += w * cp * dt;
        cp *= c;
      }
      out.value[j][k] = e * v;
      out.tau[j][k] = e * t;
    }
  return out;
}

Complex basis_phi(MultiIndex a, int n, Complex hbar, Complex z,
                  const EllipticContext& ctx, int j, int k, bool dtau) {
  if (j < 0 || k < 0 || j + k > DerivativeTable::kMaxOrder - (dtau ? 1 : 0))
    throw std::invalid_argument("basis_phi: derivative order out of range");
  const DerivativeTable t = basis_table(a, n, hbar, z, ctx, TauMode::kFull);
  return dtau ? t.tau[j][k] : t.value[j][k];
}

namespace {

class BasisKernel final : public ScalarKernel {
 public:
  BasisKernel(MultiIndex a, int n, const EllipticContext& ctx, TauMode mode,
              bool with_exponential)
      : a_(a), n_(n), ctx_(ctx), mode_(mode), exp_(with_exponential) {}
  DerivativeTable table(Complex hbar, Complex z) const override {
    return basis_table(a_, n_, hbar, z, ctx_, mode_, exp_);
  }
  int max_tau_order() const override {
    return mode_ == TauMode::kFull ? DerivativeTable::kMaxOrder - 1
                                   : DerivativeTable::kMaxOrder;
  }
  std::string name() const override { return "basis"; }

 private:
  MultiIndex a_;
  int n_;
  EllipticContext ctx_;
  TauMode mode_;
  bool exp_;
};

}  // namespace

std::shared_ptr<const ScalarKernel> basis_kernel(MultiIndex a, int n,
                                                 const EllipticContext& ctx,
                                                 TauMode mode,
                                                 bool with_exponential) {
  return std::make_shared<BasisKernel>(a, n, ctx, mode, with_exponential);
}

SuperBasisFunction super_basis_phi(MultiIndex a, int n, Complex hbar,
                                   const GrassmannElement& mu,
                                   const SuperPoint& p1, const SuperPoint& p2,
                                   const GrassmannElement& omega,
                                   const EllipticContext& ctx,
                                   BasisForm form) {
  const Complex c = kTwoPiI * static_cast<double>(a.a2) / static_cast<double>(n);
  switch (form) {
    case BasisForm::kExponential:
      return {super_phi(basis_kernel(a, n, ctx, TauMode::kPartial), hbar, mu,
                        p1, p2, omega),
              exp_even(c * (p1.zeta * p2.zeta))};
    case BasisForm::kMuShift:
      return {super_phi(basis_kernel(a, n, ctx, TauMode::kPartial), hbar,
                        mu + c * omega, p1, p2, omega),
              GrassmannElement(1.0)};
    case BasisForm::kFullTau:
      return {super_phi(basis_kernel(a, n, ctx, TauMode::kFull), hbar, mu, p1,
                        p2, omega),
              GrassmannElement(1.0)};
    case BasisForm::kFullTauOuterExp:
      return {super_phi(basis_kernel(a, n, ctx, TauMode::kFull, false), hbar,
                        mu, p1, p2, omega),
              GrassmannElement(std::exp(c * (p1.z - p2.z)))};
  }
  throw std::invalid_argument("super_basis_phi: unknown form");
}

namespace {

// Σ_a channel(a) · coefficient(a) over a 2-site matrix.
template <class T, class Coefficient>
SiteMatrix<T> channel_sum(const HeisenbergBasis& basis, bool skip_zero,
                          Coefficient&& coefficient) {
  const int n = basis.n();
  SiteMatrix<T> out{n, 2, DenseMatrix<T>(n * n, n * n)};
  for (const MultiIndex a : basis.indices()) {
    if (skip_zero && a.is_zero_mod(n)) continue;
    const T coef = coefficient(a);
    const ComplexMatrix& ch = basis.channel(a);
    for (int r = 0; r < n * n; ++r)
      for (int c = 0; c < n * n; ++c)
        if (ch(r, c) != Complex{}) out.m(r, c) += coef * ch(r, c);
  }
  return out;
}

}  // namespace

OrdinaryMatrix build_R(Complex hbar, Complex z12, const HeisenbergBasis& basis,
                       const EllipticContext& ctx) {
  return build_R_derivative(hbar, z12, basis, ctx, 0, 0, false);
}

OrdinaryMatrix build_R_derivative(Complex hbar, Complex z12,
                                  const HeisenbergBasis& basis,
                                  const EllipticContext& ctx, int j, int k,
                                  bool dtau) {
  return channel_sum<Complex>(basis, false, [&](MultiIndex a) {
    return basis_phi(a, basis.n(), hbar, z12, ctx, j, k, dtau);
  });
}

SuperMatrix build_super_R(Complex hbar, const GrassmannElement& mu,
                          const SuperPoint& p1, const SuperPoint& p2,
                          const GrassmannElement& omega,
                          const HeisenbergBasis& basis,
                          const EllipticContext& ctx) {
  return channel_sum<GrassmannElement>(basis, false, [&](MultiIndex a) {
    return super_basis_phi(a, basis.n(), hbar, mu, p1, p2, omega, ctx)
        .evaluate();
  });
}

SuperMatrix build_super_R_operator_form(Complex hbar,
                                        const GrassmannElement& mu,
                                        const SuperPoint& p1,
                                        const SuperPoint& p2,
                                        const GrassmannElement& omega,
                                        const HeisenbergBasis& basis,
                                        const EllipticContext& ctx,
                                        bool use_heat) {
  const Complex z = p1.z - p2.z;
  const auto r0 = build_R_derivative(hbar, z, basis, ctx, 0, 0, false);
  const auto rh = build_R_derivative(hbar, z, basis, ctx, 1, 0, false);
  const auto rhh = build_R_derivative(hbar, z, basis, ctx, 2, 0, false);
  const auto rx = use_heat
                      ? build_R_derivative(hbar, z, basis, ctx, 1, 1, false)
                      : build_R_derivative(hbar, z, basis, ctx, 0, 0, true);

  const GrassmannElement& z1 = p1.zeta;
  const GrassmannElement& z2 = p2.zeta;
  const GrassmannElement z1z2 = z1 * z2;
  const GrassmannElement g0 = z1 - z2;
  const GrassmannElement gh = omega + z1z2 * mu;
  const GrassmannElement gx =
      use_heat ? z1z2 * omega : kTwoPiI * (z1z2 * omega);
  const GrassmannElement ghh = 0.5 * ((z1 + z2) * mu * omega);

  const int d = basis.n() * basis.n();
  SuperMatrix out{basis.n(), 2, DenseMatrix<GrassmannElement>(d, d)};
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c)
      out.m(r, c) = g0 * r0.m(r, c) + gh * rh.m(r, c) + gx * rx.m(r, c) +
                    ghh * rhh.m(r, c);
  return out;
}

OrdinaryMatrix build_r_classical(Complex z12, const HeisenbergBasis& basis,
                                 const EllipticContext& ctx) {
  return channel_sum<Complex>(basis, true, [&](MultiIndex a) {
    return basis_phi(a, basis.n(), 0.0, z12, ctx);
  });
}

SuperMatrix build_super_r_classical(const SuperPoint& p1, const SuperPoint& p2,
                                    const GrassmannElement& omega,
                                    const HeisenbergBasis& basis,
                                    const EllipticContext& ctx) {
  return channel_sum<GrassmannElement>(basis, true, [&](MultiIndex a) {
    return super_basis_phi(a, basis.n(), 0.0, GrassmannElement{}, p1, p2,
                           omega, ctx)
        .evaluate();
  });
}

namespace {

template <class T>
MatrixResidual<T> sum_terms(std::initializer_list<DenseMatrix<T>> terms,
                            int n) {
  MatrixResidual<T> out;
  const int dim = n * n * n;
  out.residual = SiteMatrix<T>{n, 3, DenseMatrix<T>(dim, dim)};
  for (const auto& t : terms) {
    out.residual.m += t;
    out.scale = std::max(out.scale, max_abs(t));
  }
  return out;
}

template <class T>
DenseMatrix<T> negated(DenseMatrix<T> m) {
  DenseMatrix<T> zero(m.rows(), m.cols());
  return zero - m;
}

}  // namespace

MatrixResidual<Complex> aybe_residual(const std::array<Complex, 2>& hbars,
                                      const std::array<Complex, 3>& z,
                                      const HeisenbergBasis& basis,
                                      const EllipticContext& ctx) {
  const auto [h1, h2] = hbars;
  const Complex z12 = z[0] - z[1], z23 = z[1] - z[2], z31 = z[2] - z[0];
  auto R = [&](Complex h, Complex x, int i, int j) {
    return embed(build_R(h, x, basis, ctx), i, j).m;
  };
  return sum_terms<Complex>(
      {R(h1, z12, 1, 2) * R(h2, z23, 2, 3),
       R(-h2, z31, 3, 1) * R(h1 - h2, z12, 1, 2),
       R(h2 - h1, z23, 2, 3) * R(-h1, z31, 3, 1)},
      basis.n());
}

MatrixResidual<GrassmannElement> super_aybe_residual(
    const std::array<Complex, 2>& hbars,
    const std::array<GrassmannElement, 2>& mus,
    const std::array<SuperPoint, 3>& p, const GrassmannElement& omega,
    const HeisenbergBasis& basis, const EllipticContext& ctx) {
  const auto [h1, h2] = hbars;
  const auto& [m1, m2] = mus;
  auto R = [&](Complex h, const GrassmannElement& m, int i, int j) {
    return embed(build_super_R(h, m, p[i - 1], p[j - 1], omega, basis, ctx), i,
                 j)
        .m;
  };
  return sum_terms<GrassmannElement>(
      {R(h1, m1, 1, 2) * R(h2, m2, 2, 3),
       R(-h2, -m2, 3, 1) * R(h1 - h2, m1 - m2, 1, 2),
       R(h2 - h1, m2 - m1, 2, 3) * R(-h1, -m1, 3, 1)},
      basis.n());
}

MatrixResidual<Complex> cybe_residual(const std::array<Complex, 3>& z,
                                      const HeisenbergBasis& basis,
                                      const EllipticContext& ctx) {
  const auto r12 = embed(build_r_classical(z[0] - z[1], basis, ctx), 1, 2).m;
  const auto r13 = embed(build_r_classical(z[0] - z[2], basis, ctx), 1, 3).m;
  const auto r23 = embed(build_r_classical(z[1] - z[2], basis, ctx), 2, 3).m;
  return sum_terms<Complex>({r12 * r13, negated(r13 * r12), r12 * r23,
                             negated(r23 * r12), r13 * r23,
                             negated(r23 * r13)},
                            basis.n());
}

MatrixResidual<GrassmannElement> super_cybe_residual(
    const std::array<SuperPoint, 3>& p, const GrassmannElement& omega,
    const HeisenbergBasis& basis, const EllipticContext& ctx) {
  auto r = [&](int i, int j) {
    return embed(
               build_super_r_classical(p[i - 1], p[j - 1], omega, basis, ctx),
               i, j)
        .m;
  };
  const auto r12 = r(1, 2), r13 = r(1, 3), r23 = r(2, 3);
  return sum_terms<GrassmannElement>({r12 * r13, r13 * r12, r12 * r23,
                                      r23 * r12, r13 * r23, r23 * r13},
                                     basis.n());
}

ScalarResidual basis_fay_residual(MultiIndex alpha, MultiIndex beta, int n,
                                  Complex hbar, Complex eta,
                                  const std::array<Complex, 3>& z,
                                  const EllipticContext& ctx) {
  const Complex z12 = z[0] - z[1], z23 = z[1] - z[2], z31 = z[2] - z[0];
  auto f = [&](MultiIndex a, Complex h, Complex x) {
    return basis_phi(a, n, h, x, ctx);
  };
  const Complex t1 = f(alpha, hbar, z12) * f(beta, eta, z23);
  const Complex t2 = f(-beta, -eta, z31) * f(alpha - beta, hbar - eta, z12);
  const Complex t3 = f(beta - alpha, eta - hbar, z23) * f(-alpha, -hbar, z31);
  return {t1 + t2 + t3, std::max({std::abs(t1), std::abs(t2), std::abs(t3)})};
}

IdentityResidual super_basis_fay_residual(
    MultiIndex alpha, MultiIndex beta, int n,
    const std::array<Complex, 2>& hbars,
    const std::array<GrassmannElement, 2>& mus,
    const std::array<SuperPoint, 3>& p, const GrassmannElement& omega,
    const EllipticContext& ctx, bool truncated) {
  const auto [h1, h2] = hbars;
  const GrassmannElement m1 = truncated ? GrassmannElement{} : mus[0];
  const GrassmannElement m2 = truncated ? GrassmannElement{} : mus[1];
  auto F = [&](MultiIndex a, Complex h, const GrassmannElement& m,
               const SuperPoint& x, const SuperPoint& y) {
    return super_basis_phi(a, n, h, m, x, y, omega, ctx).evaluate();
  };
  const GrassmannElement t1 =
      F(alpha, h1, m1, p[0], p[1]) * F(beta, h2, m2, p[1], p[2]);
  const GrassmannElement t2 = F(-beta, -h2, -m2, p[2], p[0]) *
                              F(alpha - beta, h1 - h2, m1 - m2, p[0], p[1]);
  const GrassmannElement t3 = F(beta - alpha, h2 - h1, m2 - m1, p[1], p[2]) *
                              F(-alpha, -h1, -m1, p[2], p[0]);
  return {t1 + t2 + t3, std::max({t1.max_abs_coeff(), t2.max_abs_coeff(),
                                  t3.max_abs_coeff()})};
}

}  // namespace superkron
