#include "superkron/grassmann.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdio>
#include <deque>
#include <map>
#include <mutex>
#include <stdexcept>
#include <unordered_set>

#include "superkron/errors.hpp"

namespace superkron {

namespace {

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

// Deque keeps addresses stable as sets are added.
std::deque<GeneratorSet>& registry() {
  static std::deque<GeneratorSet> sets;
  return sets;
}

Mask bit(int i) { return Mask{1} << i; }

// Sorted-merge of two term lists with a sign on the second operand.
std::vector<GrassmannElement::Term> merge(
    const std::vector<GrassmannElement::Term>& a,
    std::span<const GrassmannElement::Term> b, double sign) {
  std::vector<GrassmannElement::Term> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].mask < b[j].mask)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].mask < a[i].mask) {
      out.push_back({b[j].mask, sign * b[j].coeff});
      ++j;
    } else {
      Complex c = a[i].coeff + sign * b[j].coeff;
      if (c != Complex{}) out.push_back({a[i].mask, c});
      ++i;
      ++j;
    }
  }
  return out;
}

void append_double(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

const GeneratorSet& GeneratorSet::canonical() {
  static const GeneratorSet& set =
      make({"ζ1", "ζ2", "ζ3", "μ1", "μ2", "ω"});
  return set;
}

const GeneratorSet& GeneratorSet::make(const std::vector<std::string>& names) {
  if (names.empty() ||
      names.size() > static_cast<std::size_t>(kMaxGenerators))
    throw std::invalid_argument("generator set must have 1..63 labels");
  std::unordered_set<std::string> seen;
  for (const auto& n : names) {
    if (n.empty()) throw std::invalid_argument("empty generator label");
    if (!seen.insert(n).second)
      throw std::invalid_argument("duplicate generator label: " + n);
  }
  std::lock_guard lock(registry_mutex());
  for (const auto& s : registry())
    if (s.names() == names) return s;
  return registry().emplace_back(names);
}

std::optional<int> GeneratorSet::index_of(std::string_view name) const {
  for (int i = 0; i < size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

int GeneratorSet::require(std::string_view name) const {
  if (auto i = index_of(name)) return *i;
  throw std::invalid_argument("unknown generator: " + std::string(name));
}

const char* to_string(Parity p) {
  switch (p) {
    case Parity::kEven:
      return "even";
    case Parity::kOdd:
      return "odd";
    case Parity::kMixed:
      return "mixed";
  }
  return "?";
}

GrassmannElement::GrassmannElement(Complex scalar) {
  if (scalar != Complex{}) terms_.push_back({0, scalar});
}

GrassmannElement GrassmannElement::generator(const GeneratorSet& set,
                                             int index) {
  if (index < 0 || index >= set.size())
    throw std::invalid_argument("generator index out of range");
  return {&set, {{bit(index), 1.0}}};
}

GrassmannElement GrassmannElement::generator(const GeneratorSet& set,
                                             std::string_view name) {
  return generator(set, set.require(name));
}

GrassmannElement GrassmannElement::monomial(const GeneratorSet& set, Mask mask,
                                            Complex coeff) {
  if (set.size() < 64 && (mask >> set.size()) != 0)
    throw std::invalid_argument("monomial mask outside generator set");
  if (coeff == Complex{}) return {&set, {}};
  return {&set, {{mask, coeff}}};
}

Complex GrassmannElement::coeff(Mask mask) const {
  auto it = std::lower_bound(
      terms_.begin(), terms_.end(), mask,
      [](const Term& t, Mask m) { return t.mask < m; });
  return (it != terms_.end() && it->mask == mask) ? it->coeff : Complex{};
}

Parity GrassmannElement::parity() const {
  bool even = false, odd = false;
  for (const auto& t : terms_) (std::popcount(t.mask) % 2 ? odd : even) = true;
  if (odd && even) return Parity::kMixed;
  return odd ? Parity::kOdd : Parity::kEven;
}

GrassmannElement GrassmannElement::even_part() const {
  std::vector<Term> out;
  for (const auto& t : terms_)
    if (std::popcount(t.mask) % 2 == 0) out.push_back(t);
  return {set_, std::move(out)};
}

GrassmannElement GrassmannElement::odd_part() const {
  std::vector<Term> out;
  for (const auto& t : terms_)
    if (std::popcount(t.mask) % 2 == 1) out.push_back(t);
  return {set_, std::move(out)};
}

double GrassmannElement::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& t : terms_) m = std::max(m, std::abs(t.coeff));
  return m;
}

Mask GrassmannElement::support() const {
  Mask m = 0;
  for (const auto& t : terms_) m |= t.mask;
  return m;
}

GrassmannElement GrassmannElement::pruned(double eps) const {
  std::vector<Term> out;
  for (const auto& t : terms_)
    if (std::abs(t.coeff) > eps) out.push_back(t);
  return {set_, std::move(out)};
}

const GeneratorSet* GrassmannElement::common_set(const GrassmannElement& a,
                                                 const GrassmannElement& b) {
  if (a.set_ == nullptr) return b.set_;
  if (b.set_ == nullptr || a.set_ == b.set_) return a.set_;
  throw AlgebraMismatch("Grassmann operands over different generator sets");
}

GrassmannElement& GrassmannElement::operator+=(const GrassmannElement& o) {
  set_ = common_set(*this, o);
  terms_ = merge(terms_, o.terms_, 1.0);
  return *this;
}

GrassmannElement& GrassmannElement::operator-=(const GrassmannElement& o) {
  set_ = common_set(*this, o);
  terms_ = merge(terms_, o.terms_, -1.0);
  return *this;
}

GrassmannElement& GrassmannElement::operator*=(Complex s) {
  if (s == Complex{}) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.coeff *= s;
  std::erase_if(terms_, [](const Term& t) { return t.coeff == Complex{}; });
  return *this;
}

int product_sign(Mask s, Mask t) {
  int swaps = 0;
  while (t != 0) {
    int j = std::countr_zero(t);
    t &= t - 1;
    // Elements of S above j must pass over t_j.
    Mask above = (j >= 63) ? Mask{0} : (s >> (j + 1));
    swaps += std::popcount(above);
  }
  return (swaps % 2) ? -1 : 1;
}

GrassmannElement mul(const GrassmannElement& a, const GrassmannElement& b) {
  const GeneratorSet* set = GrassmannElement::common_set(a, b);
  if (a.terms_.empty() || b.terms_.empty()) return {set, {}};

  using Term = GrassmannElement::Term;
  const int g = set ? set->size() : 0;
  std::vector<Term> out;
  if (g <= 12) {
    // Dense accumulator over all 2^g monomials.
    std::vector<Complex> acc(std::size_t{1} << g);
    std::vector<char> touched(acc.size(), 0);
    for (const auto& x : a.terms_) {
      for (const auto& y : b.terms_) {
        if (x.mask & y.mask) continue;
        Mask m = x.mask | y.mask;
        acc[m] += static_cast<double>(product_sign(x.mask, y.mask)) *
                  (x.coeff * y.coeff);
        touched[m] = 1;
      }
    }
    for (std::size_t m = 0; m < acc.size(); ++m)
      if (touched[m] && acc[m] != Complex{}) out.push_back({m, acc[m]});
  } else {
    std::map<Mask, Complex> acc;
    for (const auto& x : a.terms_)
      for (const auto& y : b.terms_) {
        if (x.mask & y.mask) continue;
        acc[x.mask | y.mask] +=
            static_cast<double>(product_sign(x.mask, y.mask)) *
            (x.coeff * y.coeff);
      }
    for (const auto& [m, c] : acc)
      if (c != Complex{}) out.push_back({m, c});
  }
  return {set, std::move(out)};
}

GrassmannElement left_derivative(const GrassmannElement& a, int generator) {
  if (a.generators() == nullptr) return {};
  if (generator < 0 || generator >= a.generators()->size())
    throw std::invalid_argument("left_derivative: unknown generator");
  const Mask g = bit(generator);
  GrassmannElement out;
  for (const auto& t : a.terms()) {
    if (!(t.mask & g)) continue;
    int below = std::popcount(t.mask & (g - 1));
    out += GrassmannElement::monomial(*a.generators(), t.mask & ~g,
                                      (below % 2 ? -1.0 : 1.0) * t.coeff);
  }
  return out;
}

GrassmannElement taylor_shift(
    const std::function<Complex(Complex, int)>& derivative, Complex z0,
    const GrassmannElement& soul) {
  if (soul.parity() != Parity::kEven)
    throw std::invalid_argument("taylor_shift: soul must be even");
  if (soul.scalar_part() != Complex{})
    throw std::invalid_argument("taylor_shift: soul has a scalar part");

  GrassmannElement result = derivative(z0, 0);
  GrassmannElement power = soul;
  for (int k = 1; !power.is_zero(); ++k) {
    result += power * (derivative(z0, k) / factorial(k));
    power = power * soul;
  }
  return result;
}

GrassmannElement exp_even(const GrassmannElement& x) {
  if (x.parity() != Parity::kEven)
    throw std::invalid_argument("exp_even: argument must be even");
  Complex body = x.scalar_part();
  GrassmannElement soul = x - GrassmannElement(body);
  GrassmannElement sum(1.0);
  GrassmannElement power = soul;
  for (int k = 1; !power.is_zero(); ++k) {
    sum += power * (1.0 / factorial(k));
    power = power * soul;
  }
  return sum * std::exp(body);
}

std::string GrassmannElement::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i) out += " + ";
    out += '(';
    append_double(out, terms_[i].coeff.real());
    double im = terms_[i].coeff.imag();
    if (!std::signbit(im)) out += '+';
    append_double(out, im);
    out += "i)";
    if (terms_[i].mask != 0) {
      out += "·";
      for (Mask m = terms_[i].mask; m; m &= m - 1)
        out += set_->name(std::countr_zero(m));
    }
  }
  return out;
}

GrassmannElement GrassmannElement::parse(std::string_view text,
                                         const GeneratorSet& set) {
  auto fail = [&](const char* why) -> GrassmannElement {
    throw std::invalid_argument(std::string("GrassmannElement::parse: ") +
                                why + " in \"" + std::string(text) + "\"");
  };
  auto skip_ws = [](std::string_view& s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  };
  auto read_double = [&](std::string_view& s) {
    double v = 0.0;
    const char* first = s.data();
    if (!s.empty() && s.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc{}) fail("bad number");
    s.remove_prefix(static_cast<std::size_t>(ptr - s.data()));
    return v;
  };

  std::string_view s = text;
  skip_ws(s);
  GrassmannElement result;
  result.set_ = &set;
  if (s == "0") return result;

  while (true) {
    skip_ws(s);
    if (s.empty() || s.front() != '(') fail("expected '('");
    s.remove_prefix(1);
    double re = read_double(s);
    double im = read_double(s);
    if (s.substr(0, 2) != "i)") fail("expected 'i)'");
    s.remove_prefix(2);

    Mask mask = 0;
    const std::string_view dot = "·";
    if (s.substr(0, dot.size()) == dot) {
      s.remove_prefix(dot.size());
      int last = -1;
      while (!s.empty() && s.front() != ' ') {
        // Greedy longest-label match.
        int best = -1;
        std::size_t best_len = 0;
        for (int g = 0; g < set.size(); ++g) {
          const auto& n = set.name(g);
          if (n.size() > best_len && s.substr(0, n.size()) == n) {
            best = g;
            best_len = n.size();
          }
        }
        if (best < 0) fail("unknown generator");
        if (best <= last) fail("generators out of canonical order");
        last = best;
        mask |= bit(best);
        s.remove_prefix(best_len);
      }
    }
    result += monomial(set, mask, {re, im});
    skip_ws(s);
    if (s.empty()) break;
    if (s.front() != '+') fail("expected '+'");
    s.remove_prefix(1);
  }
  return result;
}

}  // namespace superkron
