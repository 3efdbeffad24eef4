#include <cmath>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "treewitness/module.hpp"

using namespace treewitness;

namespace {

AlgebraicReal q(long long n, long long d = 1) {
  return AlgebraicReal(Rational(n, d));
}

Vertex lp(std::int64_t p) { return LinePoint{p}; }

struct ElementGen {
  const GroupAction& action;
  Window window;
  std::vector<Vertex> support_pool;
  std::vector<GroupElement> key_pool;
  std::mt19937_64 rng;

  ElementGen(const GroupAction& a, std::int64_t window_radius,
             std::int64_t support_radius, std::int64_t key_radius,
             std::uint64_t seed)
      : action(a),
        window(Window::ball(a.tree(), window_radius)),
        support_pool(a.tree().ball(a.tree().basepoint(), support_radius)),
        key_pool(a.orbit_ball_elements(key_radius)),
        rng(seed) {}

  AlgebraicReal coeff() {
    std::uniform_int_distribution<int> num(-4, 4);
    std::uniform_int_distribution<int> den(1, 3);
    std::uniform_int_distribution<int> kind(0, 3);
    AlgebraicReal c = AlgebraicReal(Rational(num(rng), den(rng)));
    if (kind(rng) == 0) c += AlgebraicReal(num(rng)) * AlgebraicReal::root_term(2, 1);
    return c;
  }

  WindowFunction window_function() {
    WindowFunction b(window);
    std::uniform_int_distribution<std::size_t> pick(0, support_pool.size() - 1);
    std::uniform_int_distribution<int> count(1, 4);
    int k = count(rng);
    for (int i = 0; i < k; ++i) b.set(support_pool[pick(rng)], coeff());
    return b;
  }

  ModuleElement element() {
    ModuleElement f(window);
    std::uniform_int_distribution<std::size_t> pick(0, key_pool.size() - 1);
    std::uniform_int_distribution<int> count(1, 3);
    int k = count(rng);
    for (int i = 0; i < k; ++i) f.set(key_pool[pick(rng)], window_function());
    return f;
  }
};

}  // namespace

TEST_CASE("window construction sorts and deduplicates") {
  TreeGeometry line = TreeGeometry::integer_line();
  Window w(line, {lp(3), lp(-1), lp(3), lp(0)});
  REQUIRE(w.size() == 3);
  REQUIRE(w.vertices() == std::vector<Vertex>{lp(-1), lp(0), lp(3)});
  REQUIRE(w.contains(lp(3)));
  REQUIRE_FALSE(w.contains(lp(2)));

  Window b = Window::ball(line, 4);
  REQUIRE(b.size() == 9);
  Window u = Window::balls(line, 2, {lp(0), lp(10)});
  REQUIRE(u.size() == 10);
  REQUIRE(u.contains(lp(-2)));
  REQUIRE(u.contains(lp(12)));
  REQUIRE_FALSE(u.contains(lp(5)));
}

TEST_CASE("window functions store sparse exact values") {
  TreeGeometry line = TreeGeometry::integer_line();
  Window w = Window::ball(line, 5);
  WindowFunction f(w);
  f.set(lp(2), q(3, 2));
  f.set(lp(-1), AlgebraicReal::root_term(2, 1));
  REQUIRE(f.support_size() == 2);
  REQUIRE(f.at(lp(2)) == q(3, 2));
  REQUIRE(f.at(lp(0)).is_zero());
  REQUIRE(f.at(lp(100)).is_zero());

  f.set(lp(2), AlgebraicReal());
  REQUIRE(f.support_size() == 1);
  REQUIRE_THROWS_AS(f.set(lp(6), q(1)), std::invalid_argument);

  REQUIRE(f.sup_norm() == AlgebraicReal::root_term(2, 1));
  REQUIRE(f.window_clean());
}

TEST_CASE("window function arithmetic is pointwise") {
  TreeGeometry line = TreeGeometry::integer_line();
  Window w = Window::ball(line, 5);
  WindowFunction f(w);
  f.set(lp(0), q(1));
  f.set(lp(1), q(2));
  WindowFunction g(w);
  g.set(lp(1), q(5));
  g.set(lp(2), q(7));

  WindowFunction s = f + g;
  REQUIRE(s.at(lp(0)) == q(1));
  REQUIRE(s.at(lp(1)) == q(7));
  REQUIRE(s.at(lp(2)) == q(7));

  WindowFunction p = f * g;
  REQUIRE(p.support_size() == 1);
  REQUIRE(p.at(lp(1)) == q(10));

  WindowFunction d = s - g;
  REQUIRE(d == f);
  REQUIRE((f - f).is_zero());

  WindowFunction c = q(-2) * f;
  REQUIRE(c.at(lp(1)) == q(-4));

  Window other = Window::ball(line, 6);
  WindowFunction h(other);
  REQUIRE_THROWS_AS(f + h, std::invalid_argument);
}

TEST_CASE("translate pushes values forward and flags truncation") {
  GroupAction line = GroupAction::line();
  Window w = Window::ball(line.tree(), 10);
  WindowFunction f(w);
  f.set(lp(5), q(1));
  f.set(lp(-2), q(3));

  WindowFunction g = translate(line, Translation{3}, f);
  REQUIRE(g.window_clean());
  REQUIRE(g.at(lp(8)) == q(1));
  REQUIRE(g.at(lp(1)) == q(3));
  REQUIRE(g.at(lp(5)).is_zero());

  WindowFunction far = translate(line, Translation{7}, f);
  REQUIRE_FALSE(far.window_clean());
  REQUIRE(far.at(lp(5)) == q(3));
  REQUIRE(far.support_size() == 1);
}

TEST_CASE("dihedral translate realizes reflections") {
  GroupAction dih = GroupAction::infinite_dihedral();
  Window w = Window::ball(dih.tree(), 8);
  WindowFunction f(w);
  f.set(lp(5), q(1));
  GroupElement g = DihedralMotion{2, -1};
  WindowFunction h = translate(dih, g, f);
  REQUIRE(h.window_clean());
  REQUIRE(h.at(lp(-3)) == q(1));
}

TEST_CASE("ball indicator matches distances") {
  TreeGeometry free2 = TreeGeometry::free_cayley(2);
  Window w = Window::ball(free2, 3);
  WindowFunction chi = ball_indicator(w, 2);
  REQUIRE(chi.support_size() == 17);
  REQUIRE(chi.at(Word::parse("ab", 2)) == q(1));
  REQUIRE(chi.at(Word::parse("aba", 2)).is_zero());
}

TEST_CASE("delta at the identity is a left unit") {
  for (const GroupAction& action :
       {GroupAction::line(), GroupAction::infinite_dihedral(), GroupAction::free_group(2)}) {
    ElementGen gen(action, 6, 4, 2, 20240815);
    Window w = gen.window;
    ModuleElement unit = ModuleElement::delta(w, action.identity(),
                                              WindowFunction::constant_one(w));
    for (int trial = 0; trial < 5; ++trial) {
      ModuleElement f = gen.element();
      REQUIRE(convolve(action, unit, f) == f);
      REQUIRE(convolve(action, f, unit) == f);
    }
  }
}

TEST_CASE("convolution on the line multiplies supports after shifting") {
  GroupAction line = GroupAction::line();
  Window w = Window::ball(line.tree(), 12);

  WindowFunction b1(w);
  for (int t = 0; t <= 3; ++t) b1.set(lp(t), q(1));
  WindowFunction b2(w);
  for (int t = 2; t <= 5; ++t) b2.set(lp(t), q(1));

  ModuleElement f = ModuleElement::delta(w, Translation{1}, b1);
  ModuleElement g = ModuleElement::delta(w, Translation{1}, b2);
  ModuleElement fg = convolve(line, f, g);
  REQUIRE(fg.support_size() == 1);
  WindowFunction v = fg.at(Translation{2});
  REQUIRE(v.at(lp(3)) == q(1));
  REQUIRE(v.support_size() == 1);

  WindowFunction b3(w);
  for (int t = 4; t <= 5; ++t) b3.set(lp(t), q(1));
  ModuleElement h = ModuleElement::delta(w, Translation{1}, b3);
  ModuleElement fh = convolve(line, f, h);
  REQUIRE(fh.is_zero());
}

TEST_CASE("convolving with a group delta translates values") {
  GroupAction free2 = GroupAction::free_group(2);
  GroupElement g1 = Word::parse("ab", 2);
  Window w = Window::balls(free2.tree(), 4, {free2.tree().basepoint(),
                                             free2.apply(g1, free2.tree().basepoint())});
  ModuleElement delta = ModuleElement::delta(w, g1, WindowFunction::constant_one(w));

  ElementGen gen(free2, 4, 2, 1, 777);
  ModuleElement sample = gen.element();
  ModuleElement f(w);
  for (const auto& [g, b] : sample.entries()) {
    WindowFunction moved(w);
    for (const auto& [v, c] : b.entries()) moved.set(v, c);
    f.set(g, moved);
  }

  ModuleElement lhs = convolve(free2, delta, f);
  ModuleElement rhs(w);
  for (const auto& [g, b] : f.entries())
    rhs.set(free2.compose(g1, g), translate(free2, g1, b));
  REQUIRE(lhs == rhs);
}

TEST_CASE("star algebra laws hold on clean windows") {
  struct Setup {
    GroupAction action;
    std::int64_t window_r, support_r, key_r;
  };
  std::vector<Setup> setups = {
      {GroupAction::line(), 12, 6, 3},
      {GroupAction::infinite_dihedral(), 12, 6, 3},
      {GroupAction::free_group(2), 6, 2, 2},
  };
  for (const auto& setup : setups) {
    ElementGen gen(setup.action, setup.window_r, setup.support_r, setup.key_r,
                   987654321);
    const GroupAction& A = setup.action;
    for (int trial = 0; trial < 8; ++trial) {
      ModuleElement f = gen.element();
      ModuleElement g = gen.element();
      ModuleElement h = gen.element();

      ModuleElement fg = convolve(A, f, g);
      REQUIRE(fg.window_clean());
      REQUIRE(convolve(A, fg, h) == convolve(A, f, convolve(A, g, h)));

      REQUIRE(convolve(A, f + g, h) == convolve(A, f, h) + convolve(A, g, h));
      REQUIRE(convolve(A, h, f + g) == convolve(A, h, f) + convolve(A, h, g));

      ModuleElement fs = involution(A, f);
      REQUIRE(fs.window_clean());
      REQUIRE(involution(A, fs) == f);
      REQUIRE(involution(A, fg) == convolve(A, involution(A, g), fs));
      REQUIRE(involution(A, f + g) == fs + involution(A, g));
    }
  }
}

TEST_CASE("involution of a single term inverts the key") {
  GroupAction dih = GroupAction::infinite_dihedral();
  Window w = Window::ball(dih.tree(), 10);
  WindowFunction b(w);
  b.set(lp(3), q(2));
  b.set(lp(4), q(-1));
  GroupElement g = DihedralMotion{5, -1};

  ModuleElement f = ModuleElement::delta(w, g, b);
  ModuleElement fs = involution(dih, f);
  REQUIRE(fs.support_size() == 1);
  GroupElement gi = dih.inverse(g);
  WindowFunction moved = fs.at(gi);
  REQUIRE(moved == translate(dih, gi, b));
  REQUIRE(moved.at(lp(2)) == q(2));
  REQUIRE(moved.at(lp(1)) == q(-1));
}

TEST_CASE("inner product pairs matching keys pointwise") {
  GroupAction line = GroupAction::line();
  Window w = Window::ball(line.tree(), 8);

  WindowFunction b1(w);
  b1.set(lp(0), q(2));
  b1.set(lp(1), q(3));
  WindowFunction b2(w);
  b2.set(lp(1), q(5));

  ModuleElement f(w);
  f.set(Translation{0}, b1);
  f.set(Translation{2}, b2);
  ModuleElement g(w);
  g.set(Translation{0}, b2);
  g.set(Translation{1}, b1);

  WindowFunction ip = inner(f, g);
  REQUIRE(ip.support_size() == 1);
  REQUIRE(ip.at(lp(1)) == q(15));

  WindowFunction self = inner(f, f);
  REQUIRE(self.at(lp(0)) == q(4));
  REQUIRE(self.at(lp(1)) == q(9 + 25));
  for (const auto& [v, c] : self.entries()) REQUIRE(c.sign() > 0);
}

TEST_CASE("module norms reduce to scalar magnitudes on point masses") {
  GroupAction line = GroupAction::line();
  Window w = Window::ball(line.tree(), 5);

  ModuleElement f = ModuleElement::delta(
      w, Translation{1}, WindowFunction::point(w, lp(2), q(-3, 2)));
  NormResult n = module_norm(f);
  REQUIRE(n.norm_sq == q(9, 4));
  REQUIRE(n.exact.has_value());
  REQUIRE(*n.exact == q(3, 2));

  ModuleElement r = ModuleElement::delta(
      w, Translation{0}, WindowFunction::point(w, lp(0), AlgebraicReal::root_term(2, 1)));
  NormResult nr = module_norm(r);
  REQUIRE(nr.norm_sq == q(2));
  REQUIRE(*nr.exact == AlgebraicReal::root_term(2, 1));

  ModuleElement z(w);
  REQUIRE(module_norm_sq(z).is_zero());
}

TEST_CASE("norm square root falls back to an enclosure outside the ring") {
  GroupAction line = GroupAction::line();
  Window w = Window::ball(line.tree(), 5);
  WindowFunction b(w);
  b.set(lp(0), q(1));
  b.set(lp(0), AlgebraicReal(1) + AlgebraicReal::root_term(2, 1));
  ModuleElement f = ModuleElement::delta(w, Translation{0}, b);
  NormResult n = module_norm(f);
  REQUIRE(n.norm_sq == AlgebraicReal(3) + AlgebraicReal(2) * AlgebraicReal::root_term(2, 1));
  REQUIRE(n.exact.has_value());

  ModuleElement g = f;
  g.set(Translation{1}, WindowFunction::point(w, lp(0), q(1)));
  NormResult m = module_norm(g);
  REQUIRE(m.norm_sq == AlgebraicReal(4) + AlgebraicReal(2) * AlgebraicReal::root_term(2, 1));
  REQUIRE_FALSE(m.exact.has_value());
  double expect = std::sqrt(4.0 + 2.0 * std::sqrt(2.0));
  REQUIRE(std::abs(m.approx.value - expect) < 1e-9);
  REQUIRE(m.approx.bound < 1e-9);
}

TEST_CASE("group translation preserves inner products on clean windows") {
  for (const GroupAction& action :
       {GroupAction::line(), GroupAction::infinite_dihedral(), GroupAction::free_group(2)}) {
    ElementGen gen(action, 8, 4, 2, 13579);
    std::vector<GroupElement> movers = action.orbit_ball_elements(2);
    for (int trial = 0; trial < 5; ++trial) {
      ModuleElement f = gen.element();
      ModuleElement g = gen.element();
      const GroupElement& c = movers[trial % movers.size()];

      ModuleElement cf = group_translate(action, c, f);
      ModuleElement cg = group_translate(action, c, g);
      REQUIRE(cf.window_clean());
      REQUIRE(inner(cf, cg) == translate(action, c, inner(f, g)));
      REQUIRE(module_norm_sq(cf) == module_norm_sq(f));
    }
  }
}

TEST_CASE("window mismatches are rejected") {
  GroupAction line = GroupAction::line();
  Window w1 = Window::ball(line.tree(), 4);
  Window w2 = Window::ball(line.tree(), 5);
  ModuleElement f(w1);
  ModuleElement g(w2);
  REQUIRE_THROWS_AS(convolve(line, f, g), std::invalid_argument);
  REQUIRE_THROWS_AS(inner(f, g), std::invalid_argument);
  REQUIRE_THROWS_AS(f + g, std::invalid_argument);
  ModuleElement h(w1);
  REQUIRE_THROWS_AS(h.set(Translation{0}, WindowFunction(w2)), std::invalid_argument);
}

TEST_CASE("truncation propagates through module operations") {
  GroupAction line = GroupAction::line();
  Window w = Window::ball(line.tree(), 3);
  WindowFunction b(w);
  b.set(lp(3), q(1));
  ModuleElement f = ModuleElement::delta(w, Translation{2}, b);
  ModuleElement g = ModuleElement::delta(w, Translation{2},
                                         WindowFunction::constant_one(w));
  ModuleElement fg = convolve(line, g, f);
  REQUIRE_FALSE(fg.window_clean());

  ModuleElement gt = group_translate(line, Translation{1}, f);
  REQUIRE_FALSE(gt.window_clean());

  ModuleElement clean_part = ModuleElement::delta(w, Translation{0}, b);
  REQUIRE(clean_part.window_clean());
}
