#pragma once

// Odd Jacobi theta function and the elliptic Kronecker function
//
//   ϑ(z) = Σ_k exp(πiτ(k+1/2)² + 2πi(z+1/2)(k+1/2)),
//   φ(ħ, z) = ϑ'(0) ϑ(ħ+z) / (ϑ(ħ) ϑ(z)),
//
// with derivatives in ħ, z and τ, plus the trigonometric (coth ħ + coth z)
// and rational (1/ħ + 1/z) degenerations.
//
// Derivatives come from truncated Taylor arithmetic on the theta series
// (see jet.hpp), never from numerical differencing.

#include <array>

#include "superkron/jet.hpp"

namespace superkron {

/// m + nτ.
struct LatticePoint {
  long m = 0;
  long n = 0;
};

class EllipticContext {
 public:
  static constexpr double kDefaultTol = 1e-14;
  static constexpr double kDefaultPoleRadius = 1e-3;
  static constexpr int kDefaultKMax = 200;

  /// Throws std::invalid_argument if Im τ <= 0 or tol/pole_radius are not
  /// positive, ConvergenceError if the tail bound needs more than k_max terms.
  explicit EllipticContext(Complex tau, double tol = kDefaultTol,
                           double pole_radius = kDefaultPoleRadius,
                           int k_max = kDefaultKMax);

  [[nodiscard]] Complex tau() const { return tau_; }
  [[nodiscard]] double tol() const { return tol_; }
  [[nodiscard]] double pole_radius() const { return pole_radius_; }
  [[nodiscard]] int k_max() const { return k_max_; }
  /// Series runs over k = -K-1 .. K.
  [[nodiscard]] int truncation() const { return truncation_; }

  [[nodiscard]] Complex lattice_value(LatticePoint p) const {
    return static_cast<double>(p.m) + static_cast<double>(p.n) * tau_;
  }
  /// Lattice point closest to z in (1, τ) coordinates after rounding.
  [[nodiscard]] LatticePoint reduction_shift(Complex z) const;
  /// Euclidean distance from z to the lattice Z + τZ.
  [[nodiscard]] double lattice_distance(Complex z) const;

  /// Taylor jet of ϑ at 0 (carries ϑ'(0) and its τ-derivative).
  [[nodiscard]] const Jet& theta_at_zero() const { return theta0_; }

 private:
  Complex tau_;
  double tol_;
  double pole_radius_;
  int k_max_;
  int truncation_ = 0;
  Jet theta0_;
};

/// Taylor jet of ϑ(z + ε; τ) in ε, with τ-derivatives in the dual parts.
/// Arguments are lattice-reduced before summation.
Jet theta_jet(Complex z, const EllipticContext& ctx);

/// ∂_z^dz ∂_τ^dtau ϑ(z; τ), dz <= 5, dtau in {0, 1}.
Complex theta(Complex z, const EllipticContext& ctx, int dz = 0, int dtau = 0);

/// Derivative table of a scalar kernel f(ħ, z) at one point:
/// value[j][k] = ∂_ħ^j ∂_z^k f for j + k <= 4 and, when has_tau,
/// tau[j][k] = ∂_τ ∂_ħ^j ∂_z^k f for j + k <= 4.
struct DerivativeTable {
  static constexpr int kMaxOrder = 4;
  std::array<std::array<Complex, kMaxOrder + 1>, kMaxOrder + 1> value{};
  std::array<std::array<Complex, kMaxOrder + 1>, kMaxOrder + 1> tau{};
  bool has_tau = false;
};

/// Full derivative table of φ(ħ, z). Throws PoleError if ħ, z or ħ+z is
/// within pole_radius of the lattice.
DerivativeTable kronecker_table(Complex hbar, Complex z,
                                const EllipticContext& ctx);

/// ∂_ħ^j ∂_z^k φ(ħ, z), j + k <= 4.
Complex phi(Complex hbar, Complex z, const EllipticContext& ctx, int j = 0,
            int k = 0);

/// ∂_τ ∂_ħ^j φ via the heat equation 2πi ∂_τ φ = ∂_ħ ∂_z φ, j in {0, 1}.
Complex phi_dtau(Complex hbar, Complex z, const EllipticContext& ctx,
                 int j = 0);

/// ∂_τ ∂_ħ^j ∂_z^k φ by direct τ-differentiation of the theta series.
Complex phi_dtau_direct(Complex hbar, Complex z, const EllipticContext& ctx,
                        int j = 0, int k = 0);

/// coth ħ + coth z and its derivatives; poles on πiZ.
DerivativeTable trig_table(Complex hbar, Complex z,
                           double pole_radius =
                               EllipticContext::kDefaultPoleRadius);
Complex phi_trig(Complex hbar, Complex z, int j = 0, int k = 0,
                 double pole_radius = EllipticContext::kDefaultPoleRadius);

/// 1/ħ + 1/z and its derivatives; poles at 0.
DerivativeTable rational_table(Complex hbar, Complex z,
                               double pole_radius =
                                   EllipticContext::kDefaultPoleRadius);
Complex phi_rat(Complex hbar, Complex z, int j = 0, int k = 0,
                double pole_radius = EllipticContext::kDefaultPoleRadius);

}  // namespace superkron
