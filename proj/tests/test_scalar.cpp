#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <treewitness/scalar.hpp>

using namespace treewitness;

namespace {

// Independent reference: evaluate through plain doubles.  Only trusted when
// the magnitude is well separated from zero.
double double_eval(const AlgebraicReal& a) {
  double v = 0.0;
  for (const auto& [d, c] : a.terms())
    v += static_cast<double>(c) * std::sqrt(static_cast<double>(d));
  return v;
}

constexpr std::uint64_t kSquareFree[] = {1,  2,  3,  5,  6,  7,  10, 11, 13, 14,
                                         15, 17, 19, 21, 22, 23, 26, 29, 30, 31};

AlgebraicReal random_value(std::mt19937_64& rng, int max_terms = 3) {
  std::uniform_int_distribution<int> nterms(0, max_terms);
  std::uniform_int_distribution<int> num(-20, 20);
  std::uniform_int_distribution<int> den(1, 20);
  std::uniform_int_distribution<std::size_t> rad(0, std::size(kSquareFree) - 1);
  AlgebraicReal out;
  int n = nterms(rng);
  for (int t = 0; t < n; ++t) {
    int p = num(rng);
    if (p == 0) continue;
    out += AlgebraicReal::root_term(kSquareFree[rad(rng)], Rational(p, den(rng)));
  }
  return out;
}

}  // namespace

TEST_CASE("square-free split by trial division") {
  auto f = split_square_free(12);
  CHECK(f.square_root == 2);
  CHECK(f.radicand == 3);
  f = split_square_free(1);
  CHECK(f.square_root == 1);
  CHECK(f.radicand == 1);
  f = split_square_free(360);  // 36 * 10
  CHECK(f.square_root == 6);
  CHECK(f.radicand == 10);
  f = split_square_free(9973);  // prime
  CHECK(f.square_root == 1);
  CHECK(f.radicand == 9973);
}

TEST_CASE("inv_sqrt canonical forms") {
  CHECK(AlgebraicReal::inv_sqrt(12).str() == "1/6*sqrt(3)");
  CHECK(AlgebraicReal::inv_sqrt(2).str() == "1/2*sqrt(2)");
  CHECK(AlgebraicReal::inv_sqrt(9).str() == "1/3");
  CHECK(AlgebraicReal::inv_sqrt(1).str() == "1");
  CHECK(AlgebraicReal::inv_sqrt(5).str() == "1/5*sqrt(5)");
}

TEST_CASE("inv_sqrt certified by squaring") {
  for (std::uint64_t n = 1; n <= 500; ++n) {
    AlgebraicReal x = AlgebraicReal::inv_sqrt(n);
    CHECK(x * x == AlgebraicReal(Rational(1, n)));
    CHECK(x.sign() == 1);
  }
}

TEST_CASE("ring arithmetic examples") {
  AlgebraicReal r2 = AlgebraicReal::root_term(2, 1);
  CHECK((AlgebraicReal(1) + r2) * (AlgebraicReal(1) - r2) == AlgebraicReal(-1));
  CHECK(r2 * r2 == AlgebraicReal(2));
  // sqrt(12)/6 and sqrt(3)/3 are the same element
  CHECK(AlgebraicReal::root_term(12, Rational(1, 6)) ==
        AlgebraicReal::root_term(3, Rational(1, 3)));
  CHECK((r2 - r2).is_zero());
  CHECK(AlgebraicReal::root_term(6, 1) ==
        AlgebraicReal::root_term(2, 1) * AlgebraicReal::root_term(3, 1));
  // sqrt(6)*sqrt(10) = 2*sqrt(15)
  CHECK(AlgebraicReal::root_term(6, 1) * AlgebraicReal::root_term(10, 1) ==
        AlgebraicReal::root_term(15, 2));
}

TEST_CASE("sign handles close calls") {
  AlgebraicReal a = AlgebraicReal::root_term(2, 1) + AlgebraicReal::root_term(3, 1) -
                    AlgebraicReal::root_term(10, 1);
  CHECK(a.sign() == -1);  // 1.4142 + 1.7321 - 3.1623 < 0

  // 665857/470832 is a continued-fraction convergent of sqrt(2); it lies
  // above because 665857^2 = 2*470832^2 + 1.
  Integer p(665857), q(470832);
  REQUIRE(p * p == 2 * q * q + 1);
  AlgebraicReal diff =
      AlgebraicReal::root_term(2, 1) - AlgebraicReal(Rational(p, q));
  CHECK(diff.sign() == -1);
  CHECK((-diff).sign() == 1);
  CHECK(AlgebraicReal().sign() == 0);
}

TEST_CASE("sign agrees with float on separated values") {
  std::mt19937_64 rng(20240811);
  int tested = 0;
  while (tested < 1000) {
    AlgebraicReal a = random_value(rng);
    double v = double_eval(a);
    if (std::fabs(v) < 1e-6) continue;  // not well separated, skip
    ++tested;
    CHECK(a.sign() == (v > 0 ? 1 : -1));
  }
}

TEST_CASE("ring laws on random values") {
  std::mt19937_64 rng(987654321);
  for (int it = 0; it < 1000; ++it) {
    AlgebraicReal a = random_value(rng), b = random_value(rng), c = random_value(rng);
    REQUIRE((a + b) + c == a + (b + c));
    REQUIRE(a + b == b + a);
    REQUIRE((a * b) * c == a * (b * c));
    REQUIRE(a * b == b * a);
    REQUIRE(a * (b + c) == a * b + a * c);
    REQUIRE(a - a == AlgebraicReal());
    REQUIRE(a + AlgebraicReal() == a);
    REQUIRE(a * AlgebraicReal(1) == a);
  }
}

TEST_CASE("to_float carries a certified bound") {
  std::mt19937_64 rng(13579);
  for (int it = 0; it < 200; ++it) {
    AlgebraicReal a = random_value(rng);
    FloatEnclosure f = a.to_float();
    CHECK(f.bound <= std::ldexp(1.0, -40));
    CHECK(std::fabs(f.value - double_eval(a)) <= f.bound + 1e-9);
  }
  FloatEnclosure r2 = AlgebraicReal::root_term(2, 1).to_float();
  CHECK(std::fabs(r2.value - 1.4142135623730951) <= r2.bound + 1e-15);
}

TEST_CASE("comparisons and abs") {
  AlgebraicReal r2 = AlgebraicReal::root_term(2, 1);
  AlgebraicReal r3 = AlgebraicReal::root_term(3, 1);
  CHECK(compare(r2, r3) < 0);
  CHECK(compare(r3, r2) > 0);
  CHECK(compare(r2, r2) == 0);
  CHECK(abs(r2 - r3) == r3 - r2);
  CHECK(max_value(r2, r3) == r3);
}

TEST_CASE("exact square roots inside the ring") {
  // rational arguments
  auto s = exact_sqrt(AlgebraicReal(Rational(4, 9)));
  REQUIRE(s.has_value());
  CHECK(*s == AlgebraicReal(Rational(2, 3)));
  s = exact_sqrt(AlgebraicReal(Rational(2, 5)));
  REQUIRE(s.has_value());
  CHECK(*s == AlgebraicReal::root_term(10, Rational(1, 5)));
  CHECK(*s * *s == AlgebraicReal(Rational(2, 5)));
  // (1 + sqrt(2))^2 = 3 + 2*sqrt(2)
  AlgebraicReal v = AlgebraicReal(1) + AlgebraicReal::root_term(2, 1);
  s = exact_sqrt(v * v);
  REQUIRE(s.has_value());
  CHECK(*s == v);
  // sqrt(sqrt(2)) leaves the ring
  CHECK(!exact_sqrt(AlgebraicReal::root_term(2, 1)).has_value());
  CHECK(exact_sqrt(AlgebraicReal()) == AlgebraicReal());
}

TEST_CASE("sqrt enclosure for off-ring roots") {
  AlgebraicReal v = AlgebraicReal(1) + AlgebraicReal::root_term(2, 1);
  FloatEnclosure f = sqrt_enclosure(v);
  CHECK(std::fabs(f.value - std::sqrt(1.0 + 1.4142135623730951)) <= f.bound + 1e-12);
  CHECK(f.bound <= 1e-10);
}

TEST_CASE("canonical strings") {
  CHECK(AlgebraicReal().str() == "0");
  CHECK(AlgebraicReal(Rational(2, 5)).str() == "2/5");
  CHECK(AlgebraicReal(-3).str() == "-3");
  AlgebraicReal mixed = AlgebraicReal(Rational(1, 2)) - AlgebraicReal::root_term(2, Rational(1, 3));
  CHECK(mixed.str() == "1/2 - 1/3*sqrt(2)");
  AlgebraicReal neg = -AlgebraicReal::root_term(3, Rational(1, 6));
  CHECK(neg.str() == "-1/6*sqrt(3)");
  CHECK(AlgebraicReal::root_term(2, 1).str() == "sqrt(2)");
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(AlgebraicReal::inv_sqrt(0), std::invalid_argument);
  CHECK_THROWS_AS(split_square_free(0), std::invalid_argument);
  CHECK_THROWS_AS(exact_sqrt(AlgebraicReal(-1)), std::domain_error);
}
