#pragma once

// Exact scalars of the form q0 + q1*sqrt(d1) + ... + qr*sqrt(dr) with rational
// coefficients and pairwise distinct square-free radicands.  Every value the
// workbench produces (witness values, Gram entries, defect norms) lives in
// this ring, so equality and sign are decidable and tests can demand byte
// stability.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

namespace treewitness {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

struct SquareFreeSplit {
  std::uint64_t square_root;  // s
  std::uint64_t radicand;     // d square-free, n = s^2 * d
};

// Trial division.  Radicands stay tiny (they are set sizes), so this is fine.
inline SquareFreeSplit split_square_free(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("split_square_free: n must be positive");
  std::uint64_t s = 1, d = 1;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    std::uint64_t e = 0;
    while (n % p == 0) { n /= p; ++e; }
    for (std::uint64_t j = 0; j + 1 < e; j += 2) s *= p;
    if (e % 2 == 1) d *= p;
  }
  d *= n;  // leftover prime
  return {s, d};
}

struct FloatEnclosure {
  double value = 0.0;
  double bound = 0.0;  // certified: |true - value| <= bound
};

namespace detail {

inline double to_double_down(const Rational& q) {
  double v = static_cast<double>(q);
  // conversion rounding direction is unspecified; step outward to be safe
  v = std::nextafter(v, -std::numeric_limits<double>::infinity());
  return std::nextafter(v, -std::numeric_limits<double>::infinity());
}

inline double to_double_up(const Rational& q) {
  double v = static_cast<double>(q);
  v = std::nextafter(v, std::numeric_limits<double>::infinity());
  return std::nextafter(v, std::numeric_limits<double>::infinity());
}

// floor(sqrt(n)) for nonnegative n
inline Integer isqrt(const Integer& n) { return boost::multiprecision::sqrt(n); }

// [lo, hi] enclosing sqrt(r) for rational r >= 0, with hi - lo <= 4 / 2^bits.
inline std::pair<Rational, Rational> sqrt_interval(const Rational& r, unsigned bits) {
  if (r < 0) throw std::domain_error("sqrt_interval: negative argument");
  Integer num = boost::multiprecision::numerator(r);
  Integer den = boost::multiprecision::denominator(r);
  Integer scaled = (num << (2 * bits)) / den;  // floor(r * 4^bits)
  Integer root = isqrt(scaled);                // root <= sqrt(r)*2^bits
  Integer pow2 = Integer(1) << bits;
  Rational lo(root, pow2);
  Rational hi(root + 2, pow2);  // sqrt(floor(x)) > sqrt(x) - 2 for x >= 0
  return {lo, hi};
}

}  // namespace detail

class AlgebraicReal {
 public:
  AlgebraicReal() = default;
  AlgebraicReal(int v) : AlgebraicReal(Rational(v)) {}
  AlgebraicReal(long long v) : AlgebraicReal(Rational(v)) {}
  explicit AlgebraicReal(const Rational& v) {
    if (v != 0) terms_[1] = v;
  }

  // coeff * sqrt(radicand), canonicalized so the stored radicand is square-free
  static AlgebraicReal root_term(std::uint64_t radicand, const Rational& coeff) {
    AlgebraicReal out;
    if (coeff == 0) return out;
    SquareFreeSplit f = split_square_free(radicand);
    out.terms_[f.radicand] = coeff * Rational(f.square_root);
    return out;
  }

  // 1/sqrt(n) = sqrt(d)/(s*d) for n = s^2*d
  static AlgebraicReal inv_sqrt(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("inv_sqrt: n must be positive");
    SquareFreeSplit f = split_square_free(n);
    AlgebraicReal out;
    out.terms_[f.radicand] = Rational(1, Integer(f.square_root) * Integer(f.radicand));
    return out;
  }

  static AlgebraicReal rational(const Rational& v) { return AlgebraicReal(v); }

  bool is_zero() const { return terms_.empty(); }
  bool is_rational() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == 1);
  }
  Rational rational_part() const {
    auto it = terms_.find(1);
    return it == terms_.end() ? Rational(0) : it->second;
  }
  const std::map<std::uint64_t, Rational>& terms() const { return terms_; }

  friend AlgebraicReal operator+(const AlgebraicReal& a, const AlgebraicReal& b) {
    AlgebraicReal out = a;
    for (const auto& [d, c] : b.terms_) out.add_term(d, c);
    return out;
  }

  friend AlgebraicReal operator-(const AlgebraicReal& a, const AlgebraicReal& b) {
    AlgebraicReal out = a;
    for (const auto& [d, c] : b.terms_) out.add_term(d, -c);
    return out;
  }

  AlgebraicReal operator-() const {
    AlgebraicReal out;
    for (const auto& [d, c] : terms_) out.terms_[d] = -c;
    return out;
  }

  friend AlgebraicReal operator*(const AlgebraicReal& a, const AlgebraicReal& b) {
    AlgebraicReal out;
    for (const auto& [d1, c1] : a.terms_) {
      for (const auto& [d2, c2] : b.terms_) {
        // sqrt(d1)*sqrt(d2) = g*sqrt((d1/g)*(d2/g)) with g = gcd(d1, d2);
        // the residual radicand is square-free because the cofactors are
        // coprime square-free numbers.
        std::uint64_t g = std::gcd(d1, d2);
        std::uint64_t d = (d1 / g) * (d2 / g);
        out.add_term(d, c1 * c2 * Rational(g));
      }
    }
    return out;
  }

  AlgebraicReal& operator+=(const AlgebraicReal& b) { return *this = *this + b; }
  AlgebraicReal& operator-=(const AlgebraicReal& b) { return *this = *this - b; }
  AlgebraicReal& operator*=(const AlgebraicReal& b) { return *this = *this * b; }

  friend AlgebraicReal operator*(const Rational& c, const AlgebraicReal& a) {
    AlgebraicReal out;
    if (c == 0) return out;
    for (const auto& [d, q] : a.terms_) out.terms_[d] = c * q;
    return out;
  }

  friend bool operator==(const AlgebraicReal& a, const AlgebraicReal& b) {
    return a.terms_ == b.terms_;
  }
  friend bool operator!=(const AlgebraicReal& a, const AlgebraicReal& b) {
    return !(a == b);
  }

  // Exact sign.  A structural zero is caught immediately; otherwise distinct
  // square-free radicands make the value nonzero, so interval refinement
  // (starting at 32 bits, doubling) terminates.
  int sign() const {
    if (terms_.empty()) return 0;
    if (terms_.size() == 1) {
      const auto& [d, c] = *terms_.begin();
      (void)d;
      return c > 0 ? 1 : -1;
    }
    for (unsigned bits = 32; bits <= (1u << 20); bits *= 2) {
      auto [lo, hi] = enclose(bits);
      if (lo > 0) return 1;
      if (hi < 0) return -1;
    }
    throw std::logic_error("AlgebraicReal::sign: refinement failed to separate from zero");
  }

  // Certified float approximation.  For the magnitudes this workbench
  // produces (|value| well below 2^10) the bound lands at or under 2^-40.
  FloatEnclosure to_float() const {
    auto [lo, hi] = enclose(96);
    double dl = detail::to_double_down(lo);
    double dh = detail::to_double_up(hi);
    FloatEnclosure out;
    out.value = dl + (dh - dl) / 2;
    out.bound = std::max(out.value - dl, dh - out.value);
    return out;
  }

  // Canonical form: terms sorted by radicand, rational part first, each
  // coefficient in lowest terms.  "0", "2/5", "1/6*sqrt(3)", "1 - 1/2*sqrt(2)".
  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [d, c] : terms_) {
      Rational a = c;
      if (first) {
        if (a < 0) { out += "-"; a = -a; }
      } else {
        out += a < 0 ? " - " : " + ";
        if (a < 0) a = -a;
      }
      out += format_magnitude(d, a);
      first = false;
    }
    return out;
  }

  // Rational interval [lo, hi] containing the value.
  std::pair<Rational, Rational> enclose(unsigned bits) const {
    Rational lo(0), hi(0);
    for (const auto& [d, c] : terms_) {
      if (d == 1) { lo += c; hi += c; continue; }
      auto [rl, rh] = detail::sqrt_interval(Rational(d), bits);
      if (c > 0) { lo += c * rl; hi += c * rh; }
      else       { lo += c * rh; hi += c * rl; }
    }
    return {lo, hi};
  }

 private:
  void add_term(std::uint64_t d, const Rational& c) {
    if (c == 0) return;
    auto it = terms_.find(d);
    if (it == terms_.end()) { terms_[d] = c; return; }
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }

  static std::string format_rational(const Rational& q) {
    std::string s = boost::multiprecision::numerator(q).str();
    if (boost::multiprecision::denominator(q) != 1)
      s += "/" + boost::multiprecision::denominator(q).str();
    return s;
  }

  static std::string format_magnitude(std::uint64_t d, const Rational& a) {
    if (d == 1) return format_rational(a);
    std::string root = "sqrt(" + std::to_string(d) + ")";
    if (a == 1) return root;
    return format_rational(a) + "*" + root;
  }

  std::map<std::uint64_t, Rational> terms_;
};

inline int compare(const AlgebraicReal& a, const AlgebraicReal& b) {
  return (a - b).sign();
}

inline AlgebraicReal abs(const AlgebraicReal& a) {
  return a.sign() < 0 ? -a : a;
}

inline const AlgebraicReal& max_value(const AlgebraicReal& a, const AlgebraicReal& b) {
  return compare(a, b) >= 0 ? a : b;
}

namespace detail {

inline std::optional<Rational> rational_sqrt(const Rational& r) {
  if (r < 0) return std::nullopt;
  if (r == 0) return Rational(0);
  Integer num = boost::multiprecision::numerator(r);
  Integer den = boost::multiprecision::denominator(r);
  Integer sn = isqrt(num), sd = isqrt(den);
  if (sn * sn != num || sd * sd != den) return std::nullopt;
  return Rational(sn, sd);
}

}  // namespace detail

// Square root inside the ring, when one exists.  Handles nonnegative
// rationals (always representable: sqrt(p/q) = sqrt(p*q)/q) and two-term
// values of the form a + b*sqrt(d) that happen to be perfect squares of
// u + v*sqrt(d).  Returns nullopt otherwise.
inline std::optional<AlgebraicReal> exact_sqrt(const AlgebraicReal& s) {
  if (s.sign() < 0) throw std::domain_error("exact_sqrt: negative argument");
  if (s.is_zero()) return AlgebraicReal();
  if (s.is_rational()) {
    Rational r = s.rational_part();
    Integer num = boost::multiprecision::numerator(r);
    Integer den = boost::multiprecision::denominator(r);
    Integer prod = num * den;
    if (prod > Integer(std::uint64_t(1) << 62)) return std::nullopt;
    SquareFreeSplit f = split_square_free(static_cast<std::uint64_t>(prod));
    return AlgebraicReal::root_term(f.radicand, Rational(f.square_root, den));
  }
  const auto& terms = s.terms();
  if (terms.size() == 2 && terms.begin()->first == 1) {
    Rational a = terms.begin()->second;
    auto second = std::next(terms.begin());
    std::uint64_t d = second->first;
    Rational b = second->second;
    // (u + v*sqrt(d))^2 = (u^2 + v^2 d) + 2uv*sqrt(d)
    auto disc = detail::rational_sqrt(a * a - b * b * Rational(d));
    if (!disc) return std::nullopt;
    Rational branches[2] = {*disc, Rational(-*disc)};
    for (const Rational& e : branches) {
      auto u = detail::rational_sqrt((a + e) / 2);
      if (!u) continue;
      auto v = detail::rational_sqrt((a - e) / Rational(2 * Integer(d)));
      if (!v) continue;
      Rational vv = (b > 0) ? *v : -*v;
      AlgebraicReal cand = AlgebraicReal(*u) + AlgebraicReal::root_term(d, vv);
      if (cand * cand == s && cand.sign() >= 0) return cand;
    }
  }
  return std::nullopt;
}

// Certified float sqrt for values whose exact root leaves the ring.
inline FloatEnclosure sqrt_enclosure(const AlgebraicReal& s) {
  if (s.sign() < 0) throw std::domain_error("sqrt_enclosure: negative argument");
  if (auto exact = exact_sqrt(s)) return exact->to_float();
  auto [lo, hi] = s.enclose(96);
  if (lo < 0) lo = 0;
  auto [ll, lh] = detail::sqrt_interval(lo, 96);
  auto [hl, hh] = detail::sqrt_interval(hi, 96);
  (void)lh; (void)hl;
  double dl = detail::to_double_down(ll);
  double dh = detail::to_double_up(hh);
  FloatEnclosure out;
  out.value = dl + (dh - dl) / 2;
  out.bound = std::max(out.value - dl, dh - out.value);
  return out;
}

}  // namespace treewitness
