#pragma once

// Finite Grassmann (exterior) algebra over complex scalars.
//
// Basis monomials are subsets of the generators, encoded as bitmasks with
// bit i standing for generator i. A monomial is always read in increasing
// generator order, so e_S · e_T = sign(S, T) e_{S∪T} with
// sign(S, T) = (-1)^{#{(s, t) : s ∈ S, t ∈ T, s > t}}, and 0 when S ∩ T ≠ ∅.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "superkron/jet.hpp"

namespace superkron {

using Mask = std::uint64_t;

/// Ordered generator labels. Instances are interned: two sets with the same
/// labels are the same object, so identity comparison is set comparison.
class GeneratorSet {
 public:
  static constexpr int kMaxGenerators = 63;

  /// ζ1 < ζ2 < ζ3 < μ1 < μ2 < ω, the 64-dimensional working algebra.
  static const GeneratorSet& canonical();

  /// Interned set for the given labels. Throws std::invalid_argument on
  /// duplicate or empty labels, or more than kMaxGenerators entries.
  static const GeneratorSet& make(const std::vector<std::string>& names);

  [[nodiscard]] int size() const { return static_cast<int>(names_.size()); }
  [[nodiscard]] const std::string& name(int index) const {
    return names_.at(index);
  }
  [[nodiscard]] std::optional<int> index_of(std::string_view name) const;
  /// Like index_of but throws std::invalid_argument on unknown labels.
  [[nodiscard]] int require(std::string_view name) const;

  [[nodiscard]] const std::vector<std::string>& names() const {
    return names_;
  }

  explicit GeneratorSet(std::vector<std::string> names)
      : names_(std::move(names)) {}

 private:
  std::vector<std::string> names_;
};

// Canonical generator indices.
namespace gen {
inline constexpr int kZeta1 = 0;
inline constexpr int kZeta2 = 1;
inline constexpr int kZeta3 = 2;
inline constexpr int kMu1 = 3;
inline constexpr int kMu2 = 4;
inline constexpr int kOmega = 5;
}  // namespace gen

enum class Parity { kEven, kOdd, kMixed };

const char* to_string(Parity p);

class GrassmannElement {
 public:
  struct Term {
    Mask mask;
    Complex coeff;
    friend bool operator==(const Term&, const Term&) = default;
  };

  /// The zero element. Pure scalars carry no generator set and combine with
  /// elements of any set.
  GrassmannElement() = default;
  GrassmannElement(Complex scalar);  // NOLINT(google-explicit-constructor)

  static GrassmannElement generator(const GeneratorSet& set, int index);
  static GrassmannElement generator(const GeneratorSet& set,
                                    std::string_view name);
  static GrassmannElement monomial(const GeneratorSet& set, Mask mask,
                                   Complex coeff);

  [[nodiscard]] const GeneratorSet* generators() const { return set_; }
  [[nodiscard]] std::span<const Term> terms() const { return terms_; }
  [[nodiscard]] Complex coeff(Mask mask) const;
  [[nodiscard]] Complex scalar_part() const { return coeff(0); }
  [[nodiscard]] bool is_zero() const { return terms_.empty(); }
  [[nodiscard]] Parity parity() const;
  [[nodiscard]] GrassmannElement even_part() const;
  [[nodiscard]] GrassmannElement odd_part() const;
  /// Largest coefficient magnitude; 0 for the zero element.
  [[nodiscard]] double max_abs_coeff() const;
  /// Union of the masks of all stored terms.
  [[nodiscard]] Mask support() const;
  /// Drops terms with |coeff| <= eps. Exact zeros never survive arithmetic.
  [[nodiscard]] GrassmannElement pruned(double eps) const;

  GrassmannElement& operator+=(const GrassmannElement& o);
  GrassmannElement& operator-=(const GrassmannElement& o);
  GrassmannElement& operator*=(Complex s);

  friend GrassmannElement operator+(GrassmannElement a,
                                    const GrassmannElement& b) {
    return a += b;
  }
  friend GrassmannElement operator-(GrassmannElement a,
                                    const GrassmannElement& b) {
    return a -= b;
  }
  friend GrassmannElement operator-(GrassmannElement a) { return a *= -1.0; }
  friend GrassmannElement operator*(GrassmannElement a, Complex s) {
    return a *= s;
  }
  friend GrassmannElement operator*(Complex s, GrassmannElement a) {
    return a *= s;
  }
  friend GrassmannElement operator*(const GrassmannElement& a,
                                    const GrassmannElement& b) {
    return mul(a, b);
  }
  friend bool operator==(const GrassmannElement& a, const GrassmannElement& b) {
    return a.terms_ == b.terms_;
  }

  /// Graded product. Throws AlgebraMismatch for different generator sets.
  friend GrassmannElement mul(const GrassmannElement& a,
                              const GrassmannElement& b);

  /// Signed monomial sum, e.g. "(0.5+0i)·ζ1ζ2ω + (-1+2i)". Zero is "0".
  [[nodiscard]] std::string to_string() const;
  /// Inverse of to_string for the given generator set.
  static GrassmannElement parse(std::string_view text, const GeneratorSet& set);

 private:
  GrassmannElement(const GeneratorSet* set, std::vector<Term> terms)
      : set_(set), terms_(std::move(terms)) {}

  static const GeneratorSet* common_set(const GrassmannElement& a,
                                        const GrassmannElement& b);

  const GeneratorSet* set_ = nullptr;
  std::vector<Term> terms_;  // sorted by mask, no exact zeros
};

/// Sign of e_S · e_T for disjoint S, T: +1 or -1.
int product_sign(Mask s, Mask t);

/// Left derivative ∂_g: e_S -> (-1)^{#{s ∈ S : s < g}} e_{S∖{g}} when g ∈ S.
GrassmannElement left_derivative(const GrassmannElement& a, int generator);

/// Σ_k f^(k)(z0) soul^k / k!, terminated by nilpotency of the soul.
/// `derivative(z0, k)` supplies the k-th derivative and is only called for
/// orders with soul^k != 0. Throws std::invalid_argument if the soul is not
/// even or has a nonzero scalar part.
GrassmannElement taylor_shift(
    const std::function<Complex(Complex, int)>& derivative, Complex z0,
    const GrassmannElement& soul);

/// exp(x) for an even element: e^{body} Σ_k soul^k / k!.
GrassmannElement exp_even(const GrassmannElement& x);

}  // namespace superkron
