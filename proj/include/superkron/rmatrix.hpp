#pragma once

// Finite Heisenberg basis of Mat(N, C), elliptic basis functions, the
// Baxter-Belavin R-matrix, the classical r-matrix, their odd supersymmetric
// analogs, and Yang-Baxter residuals on three tensor sites.
//
// Multi-indices are kept as literal integers. T_a, κ and Ω_a are evaluated
// from the literal representative; the combinations that enter the
// R-matrices (T_a ⊗ T_{-a} with its basis function) do not depend on the
// representative.

#include <array>
#include <memory>
#include <vector>

#include "superkron/elliptic.hpp"
#include "superkron/grassmann.hpp"
#include "superkron/superfunc.hpp"

namespace superkron {

struct MultiIndex {
  int a1 = 0;
  int a2 = 0;

  friend MultiIndex operator+(MultiIndex a, MultiIndex b) {
    return {a.a1 + b.a1, a.a2 + b.a2};
  }
  friend MultiIndex operator-(MultiIndex a, MultiIndex b) {
    return {a.a1 - b.a1, a.a2 - b.a2};
  }
  friend MultiIndex operator-(MultiIndex a) { return {-a.a1, -a.a2}; }
  friend bool operator==(MultiIndex, MultiIndex) = default;

  /// Representative with both components in 0..N-1.
  [[nodiscard]] MultiIndex reduced(int n) const;
  [[nodiscard]] bool is_zero_mod(int n) const;
};

/// Dense row-major matrix. Products skip zero entries, which keeps sums of
/// monomial tensor matrices cheap.
template <class T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static DenseMatrix identity(int n) {
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(Complex(1.0));
    return m;
  }

  [[nodiscard]] int rows() const { return rows_; }
  [[nodiscard]] int cols() const { return cols_; }
  T& operator()(int r, int c) { return data_[r * cols_ + c]; }
  const T& operator()(int r, int c) const { return data_[r * cols_ + c]; }

  DenseMatrix& operator+=(const DenseMatrix& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  DenseMatrix& operator-=(const DenseMatrix& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) {
    return a += b;
  }
  friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) {
    return a -= b;
  }

  /// Entry products in left-to-right order.
  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix out(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int j = 0; j < a.cols_; ++j) {
        const T& x = a(i, j);
        if (is_zero(x)) continue;
        for (int k = 0; k < b.cols_; ++k) {
          const T& y = b(j, k);
          if (is_zero(y)) continue;
          out(i, k) += x * y;
        }
      }
    return out;
  }

 private:
  static bool is_zero(const Complex& x) { return x == Complex{}; }
  static bool is_zero(const GrassmannElement& x) { return x.is_zero(); }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

using ComplexMatrix = DenseMatrix<Complex>;

/// Largest |entry| (complex) or largest Grassmann coefficient of any entry.
double max_abs(const ComplexMatrix& m);
double max_abs(const DenseMatrix<GrassmannElement>& m);

/// Kronecker product a ⊗ b (a acts on the first tensor factor).
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Operator on n_sites copies of C^N; the site-1 index is most significant.
template <class T>
struct SiteMatrix {
  int n = 1;
  int sites = 1;
  DenseMatrix<T> m;
};

using SuperMatrix = SiteMatrix<GrassmannElement>;
using OrdinaryMatrix = SiteMatrix<Complex>;

/// Places a 2-site operator on sites (i, j) of three sites, i != j in 1..3,
/// identity on the remaining site. The first tensor factor goes to site i,
/// so (3, 1) realizes R_31. Throws std::invalid_argument on bad pairs.
template <class T>
SiteMatrix<T> embed(const SiteMatrix<T>& two_site, int i, int j);

/// Swaps the two tensor factors of a 2-site operator: P m P.
template <class T>
SiteMatrix<T> swap_sites(const SiteMatrix<T>& two_site);

/// Q, Λ and T_a for one N.
class HeisenbergBasis {
 public:
  /// Throws std::invalid_argument for n < 1.
  explicit HeisenbergBasis(int n);

  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] const ComplexMatrix& clock() const { return q_; }
  [[nodiscard]] const ComplexMatrix& shift() const { return lambda_; }

  /// Q^p for any integer p (p reduced mod N).
  [[nodiscard]] ComplexMatrix clock_power(int p) const;
  [[nodiscard]] ComplexMatrix shift_power(int p) const;

  /// T_a = exp(πi a1 a2 / N) Q^{a1} Λ^{a2} for the literal index a.
  [[nodiscard]] ComplexMatrix t_matrix(MultiIndex a) const;

  /// All a in Z_N × Z_N with representatives 0..N-1.
  [[nodiscard]] std::vector<MultiIndex> indices() const;

  /// Ω_a = (a1 + a2 τ) / N.
  [[nodiscard]] Complex half_period(MultiIndex a, Complex tau) const {
    return (static_cast<double>(a.a1) + static_cast<double>(a.a2) * tau) /
           static_cast<double>(n_);
  }

  /// T_a ⊗ T_{-a} for the reduced representative of a, cached.
  [[nodiscard]] const ComplexMatrix& channel(MultiIndex a) const;

 private:
  int n_;
  ComplexMatrix q_, lambda_;
  std::vector<ComplexMatrix> channels_;  // indexed by a1 * N + a2
};

ComplexMatrix t_matrix(MultiIndex a, const HeisenbergBasis& basis);

/// κ_{α,β} = exp(πi (β1 α2 - β2 α1) / N).
Complex kappa(MultiIndex alpha, MultiIndex beta, int n);

/// How the τ-derivative of a basis-function kernel is taken.
enum class TauMode {
  kPartial,  // ∂_τ at fixed arguments
  kFull,     // d/dτ including Ω_a(τ): ∂_τ + (a2/N) ∂_1
};

/// Derivative table of φ_a(ħ + Ω_a, z) = exp(2πi a2 z / N) φ(ħ + Ω_a, z) in
/// (ħ, z); with_exponential = false drops the exp factor. In kFull mode the
/// τ-table is available for j + k <= 3.
DerivativeTable basis_table(MultiIndex a, int n, Complex hbar, Complex z,
                            const EllipticContext& ctx,
                            TauMode mode = TauMode::kFull,
                            bool with_exponential = true);

/// ∂_ħ^j ∂_z^k (d/dτ if dtau) φ_a(ħ + Ω_a, z).
Complex basis_phi(MultiIndex a, int n, Complex hbar, Complex z,
                  const EllipticContext& ctx, int j = 0, int k = 0,
                  bool dtau = false);

/// Scalar kernel (ħ, z) -> φ_a(ħ + Ω_a, z) for SuperFunction.
std::shared_ptr<const ScalarKernel> basis_kernel(MultiIndex a, int n,
                                                 const EllipticContext& ctx,
                                                 TauMode mode,
                                                 bool with_exponential = true);

/// Equivalent assemblies of the super basis function Φ_a.
enum class BasisForm {
  kExponential,  // exp(2πi a2 (z12 + ζ1ζ2)/N) Φ^{ħ+Ω_a|μ}
  kMuShift,      // exp(2πi a2 z12/N) Φ^{ħ+Ω_a|μ + 2πi a2 ω/N}
  kFullTau,      // Φ-shape over φ_a with full τ-derivative
  kFullTauOuterExp,  // exp(2πi a2 z12/N) × Φ-shape over φ(ħ+Ω_a, ·), full τ
};

/// Φ_a^{ħ+Ω_a|μ}(z1, z2 | ζ1, ζ2) as an evaluable SuperFunction, plus a
/// Grassmann prefactor applied on the left at evaluation.
struct SuperBasisFunction {
  SuperFunction body;
  GrassmannElement prefactor;
  [[nodiscard]] GrassmannElement evaluate() const {
    return prefactor * body.evaluate();
  }
};

SuperBasisFunction super_basis_phi(MultiIndex a, int n, Complex hbar,
                                   const GrassmannElement& mu,
                                   const SuperPoint& p1, const SuperPoint& p2,
                                   const GrassmannElement& omega,
                                   const EllipticContext& ctx,
                                   BasisForm form = BasisForm::kExponential);

/// R^ħ_12(z12) = Σ_a T_a ⊗ T_{-a} φ_a(ħ + Ω_a, z12).
OrdinaryMatrix build_R(Complex hbar, Complex z12, const HeisenbergBasis& basis,
                       const EllipticContext& ctx);

/// Matrix of derivatives ∂_ħ^j ∂_z^k (d/dτ if dtau) of R^ħ_12(z).
OrdinaryMatrix build_R_derivative(Complex hbar, Complex z12,
                                  const HeisenbergBasis& basis,
                                  const EllipticContext& ctx, int j, int k,
                                  bool dtau);

/// Super R_12^{ħ|μ}(z1, z2 | ζ1, ζ2) = Σ_a T_a ⊗ T_{-a} Φ_a.
SuperMatrix build_super_R(Complex hbar, const GrassmannElement& mu,
                          const SuperPoint& p1, const SuperPoint& p2,
                          const GrassmannElement& omega,
                          const HeisenbergBasis& basis,
                          const EllipticContext& ctx);

/// The same operator assembled from derivative matrices of the ordinary R:
/// [(ζ1-ζ2) + ω∂_ħ + X + ζ1ζ2μ∂_ħ + ½(ζ1+ζ2)μω∂_ħ²] R^ħ_12, where X is
/// 2πi ζ1ζ2ω d/dτ (use_heat = false) or ζ1ζ2ω ∂_ħ∂_{z1} (use_heat = true).
SuperMatrix build_super_R_operator_form(Complex hbar,
                                        const GrassmannElement& mu,
                                        const SuperPoint& p1,
                                        const SuperPoint& p2,
                                        const GrassmannElement& omega,
                                        const HeisenbergBasis& basis,
                                        const EllipticContext& ctx,
                                        bool use_heat);

/// r_12(z12) = Σ_{a≠0} T_a ⊗ T_{-a} φ_a(Ω_a, z12).
OrdinaryMatrix build_r_classical(Complex z12, const HeisenbergBasis& basis,
                                 const EllipticContext& ctx);

/// Super r_12 = Σ_{a≠0} T_a ⊗ T_{-a} Φ_a^{Ω_a|0}(z1, z2 | ζ1, ζ2).
SuperMatrix build_super_r_classical(const SuperPoint& p1, const SuperPoint& p2,
                                    const GrassmannElement& omega,
                                    const HeisenbergBasis& basis,
                                    const EllipticContext& ctx);

template <class T>
struct MatrixResidual {
  SiteMatrix<T> residual;
  double scale = 0.0;  // max over the individual product terms
  [[nodiscard]] double absolute() const { return max_abs(residual.m); }
  [[nodiscard]] double relative() const {
    return scale > 0.0 ? absolute() / scale : absolute();
  }
};

/// R12^{ħ1}(z12)R23^{ħ2}(z23) + R31^{-ħ2}(z31)R12^{ħ1-ħ2}(z12)
/// + R23^{ħ2-ħ1}(z23)R31^{-ħ1}(z31).
MatrixResidual<Complex> aybe_residual(const std::array<Complex, 2>& hbars,
                                      const std::array<Complex, 3>& z,
                                      const HeisenbergBasis& basis,
                                      const EllipticContext& ctx);

/// Super version with μ arguments μ1, μ2, -μ2, μ1-μ2, μ2-μ1, -μ1.
MatrixResidual<GrassmannElement> super_aybe_residual(
    const std::array<Complex, 2>& hbars,
    const std::array<GrassmannElement, 2>& mus,
    const std::array<SuperPoint, 3>& points, const GrassmannElement& omega,
    const HeisenbergBasis& basis, const EllipticContext& ctx);

/// [r12, r13] + [r12, r23] + [r13, r23].
MatrixResidual<Complex> cybe_residual(const std::array<Complex, 3>& z,
                                      const HeisenbergBasis& basis,
                                      const EllipticContext& ctx);

/// [r12, r13]_+ + [r12, r23]_+ + [r13, r23]_+ for the odd super r-matrix.
MatrixResidual<GrassmannElement> super_cybe_residual(
    const std::array<SuperPoint, 3>& points, const GrassmannElement& omega,
    const HeisenbergBasis& basis, const EllipticContext& ctx);

/// Scalar three-term relation for basis functions with parameters ħ, η:
/// φ_α(ħ+Ω_α, z12)φ_β(η+Ω_β, z23) + φ_{-β}(-η-Ω_β, z31)φ_{α-β}(ħ-η+Ω_{α-β}, z12)
/// + φ_{β-α}(η-ħ+Ω_{β-α}, z23)φ_{-α}(-ħ-Ω_α, z31). With ħ = η = 0 it needs
/// α, β, α-β nonzero mod N.
struct ScalarResidual {
  Complex residual;
  double scale = 0.0;
  [[nodiscard]] double relative() const {
    return scale > 0.0 ? std::abs(residual) / scale : std::abs(residual);
  }
};
ScalarResidual basis_fay_residual(MultiIndex alpha, MultiIndex beta, int n,
                                  Complex hbar, Complex eta,
                                  const std::array<Complex, 3>& z,
                                  const EllipticContext& ctx);

/// Super analog over Φ_a (μ = 0 and ħ = 0 gives the truncated classical
/// relation when truncated is set).
IdentityResidual super_basis_fay_residual(
    MultiIndex alpha, MultiIndex beta, int n,
    const std::array<Complex, 2>& hbars,
    const std::array<GrassmannElement, 2>& mus,
    const std::array<SuperPoint, 3>& points, const GrassmannElement& omega,
    const EllipticContext& ctx, bool truncated = false);

}  // namespace superkron
