#pragma once

#include <bit>
#include <complex>
#include <random>

#include "superkron/grassmann.hpp"

namespace superkron::testing {

inline const GeneratorSet& gens() { return GeneratorSet::canonical(); }

inline GrassmannElement g(int index) {
  return GrassmannElement::generator(gens(), index);
}

inline Complex random_complex(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng)};
}

// Point with (1, τ) coordinates uniform in [lo, hi]².
inline Complex random_cell_point(std::mt19937_64& rng, Complex tau,
                                 double lo = 0.1, double hi = 0.9) {
  std::uniform_real_distribution<double> u(lo, hi);
  const double a = u(rng);
  const double b = u(rng);
  return a + b * tau;
}

// Random element with a few terms of the requested parity (any parity for -1).
inline GrassmannElement random_element(std::mt19937_64& rng, int parity = -1,
                                       int terms = 5) {
  std::uniform_int_distribution<int> mask_dist(0, 63);
  GrassmannElement out;
  for (int i = 0; i < terms; ++i) {
    Mask m = static_cast<Mask>(mask_dist(rng));
    if (parity >= 0 && std::popcount(m) % 2 != parity) m ^= 1u;
    out += GrassmannElement::monomial(gens(), m, random_complex(rng));
  }
  return out;
}

inline double max_coeff_diff(const GrassmannElement& a,
                             const GrassmannElement& b) {
  return (a - b).max_abs_coeff();
}

}  // namespace superkron::testing
