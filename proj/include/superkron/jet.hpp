#pragma once

// Truncated Taylor arithmetic used by the series kernels.
//
// A Jet holds Taylor coefficients c_n = f^(n)(x0) / n! for n = 0..kOrder.
// Coefficients are Dual numbers: the value plus its first derivative with
// respect to the modulus tau, so one pass over the theta series yields every
// z-derivative and its tau-derivative together.

#include <array>
#include <complex>
#include <cstddef>

namespace superkron {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr Complex kI{0.0, 1.0};
inline constexpr Complex kTwoPiI{0.0, 2.0 * kPi};

/// a + b·δ with δ² = 0; b carries d/dτ.
struct Dual {
  Complex val{};
  Complex dtau{};

  constexpr Dual() = default;
  constexpr Dual(Complex v) : val(v) {}  // NOLINT(google-explicit-constructor)
  constexpr Dual(Complex v, Complex d) : val(v), dtau(d) {}

  Dual& operator+=(const Dual& o) {
    val += o.val;
    dtau += o.dtau;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    val -= o.val;
    dtau -= o.dtau;
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    dtau = dtau * o.val + val * o.dtau;
    val *= o.val;
    return *this;
  }
  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(Dual a, const Dual& b) { return a *= b; }
  friend Dual operator-(const Dual& a) { return {-a.val, -a.dtau}; }
  friend Dual inverse(const Dual& a) {
    Complex inv = 1.0 / a.val;
    return {inv, -a.dtau * inv * inv};
  }
};

/// Highest Taylor order carried by kernel jets. Theta needs one order above
/// the largest requested z-derivative for the lattice-reduction τ-chain rule.
inline constexpr int kJetOrder = 6;

struct Jet {
  std::array<Dual, kJetOrder + 1> c{};

  Jet& operator+=(const Jet& o) {
    for (int n = 0; n <= kJetOrder; ++n) c[n] += o.c[n];
    return *this;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (int n = 0; n <= kJetOrder; ++n)
      for (int i = 0; i <= n; ++i) r.c[n] += a.c[i] * b.c[n - i];
    return r;
  }

  Jet& scale(const Dual& s) {
    for (auto& x : c) x *= s;
    return *this;
  }

  /// 1/f as a jet; requires c[0].val != 0.
  [[nodiscard]] Jet reciprocal() const {
    Jet r;
    Dual inv0 = inverse(c[0]);
    r.c[0] = inv0;
    for (int n = 1; n <= kJetOrder; ++n) {
      Dual acc;
      for (int i = 1; i <= n; ++i) acc += c[i] * r.c[n - i];
      r.c[n] = -(inv0 * acc);
    }
    return r;
  }

  /// n-th derivative (value and τ-part) at the expansion point.
  [[nodiscard]] Dual derivative(int n) const {
    double fact = 1.0;
    for (int i = 2; i <= n; ++i) fact *= i;
    return {c[n].val * fact, c[n].dtau * fact};
  }
};

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

inline double binomial(int n, int k) {
  return factorial(n) / (factorial(k) * factorial(n - k));
}

}  // namespace superkron
