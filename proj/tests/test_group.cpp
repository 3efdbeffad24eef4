#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <treewitness/group.hpp>

using namespace treewitness;

TEST_CASE("dihedral motions") {
  GroupAction d = GroupAction::infinite_dihedral();
  CHECK(std::get<LinePoint>(d.apply(DihedralMotion{2, -1}, LinePoint{5})).pos == -3);
  CHECK(d.inverse(DihedralMotion{2, -1}) == GroupElement(DihedralMotion{2, -1}));
  CHECK(d.inverse(DihedralMotion{3, 1}) == GroupElement(DihedralMotion{-3, 1}));
  // (s2,f2)(s1,f1) = (f2*s1 + s2, f2*f1)
  CHECK(d.compose(DihedralMotion{1, -1}, DihedralMotion{2, 1}) ==
        GroupElement(DihedralMotion{-1, -1}));
  CHECK(d.compose(DihedralMotion{2, -1}, DihedralMotion{2, -1}) == d.identity());
  CHECK(d.stabilizer_order() == 2);
  CHECK(d.displacement(DihedralMotion{-4, -1}) == 4);
}

TEST_CASE("line translations") {
  GroupAction z = GroupAction::line();
  CHECK(std::get<LinePoint>(z.apply(Translation{-3}, LinePoint{5})).pos == 2);
  CHECK(z.compose(Translation{2}, Translation{5}) == GroupElement(Translation{7}));
  CHECK(z.inverse(Translation{9}) == GroupElement(Translation{-9}));
  CHECK(z.stabilizer_order() == 1);
}

TEST_CASE("free group by left multiplication") {
  GroupAction f = GroupAction::free_group(2);
  CHECK(vertex_str(f.apply(Word::parse("aB", 2), Word::parse("a", 2))) == "aBa");
  CHECK(vertex_str(f.apply(Word::parse("A", 2), Word::parse("a", 2))) == "e");
  CHECK(f.compose(Word::parse("ab", 2), Word::parse("BA", 2)) == f.identity());
  CHECK(f.stabilizer_order() == 1);
  CHECK(f.displacement(Word::parse("abA", 2)) == 3);
}

TEST_CASE("group laws on random elements") {
  for (const GroupAction& g :
       {GroupAction::line(), GroupAction::infinite_dihedral(), GroupAction::free_group(2)}) {
    auto elems = g.orbit_ball_elements(3);
    std::mt19937_64 rng(777);
    std::uniform_int_distribution<std::size_t> pick(0, elems.size() - 1);
    TreeGeometry t = g.tree();
    auto patch = t.ball(t.basepoint(), 2);
    std::uniform_int_distribution<std::size_t> pv(0, patch.size() - 1);
    for (int it = 0; it < 200; ++it) {
      GroupElement a = elems[pick(rng)], b = elems[pick(rng)], c = elems[pick(rng)];
      REQUIRE(g.compose(g.compose(a, b), c) == g.compose(a, g.compose(b, c)));
      REQUIRE(g.compose(a, g.inverse(a)) == g.identity());
      REQUIRE(g.inverse(g.compose(a, b)) == g.compose(g.inverse(b), g.inverse(a)));
      Vertex v = patch[pv(rng)];
      REQUIRE(g.apply(g.compose(a, b), v) == g.apply(a, g.apply(b, v)));
      REQUIRE(t.distance(g.apply(a, v), g.apply(a, patch[pv(rng)])) <= 4);
    }
  }
}

TEST_CASE("orbit balls have m elements per vertex") {
  GroupAction d = GroupAction::infinite_dihedral();
  auto elems = d.orbit_ball_elements(4);
  CHECK(elems.size() == 2 * 9);
  GroupAction f = GroupAction::free_group(2);
  CHECK(f.orbit_ball_elements(2).size() == 17);
  GroupAction z = GroupAction::line();
  CHECK(z.orbit_ball_elements(4).size() == 9);
  // deterministic order: grouped by image vertex, identity-flip first
  CHECK(elems[0] == GroupElement(DihedralMotion{-4, 1}));
  CHECK(elems[1] == GroupElement(DihedralMotion{-4, -1}));
}

TEST_CASE("action certification") {
  for (const GroupAction& g :
       {GroupAction::line(), GroupAction::infinite_dihedral(), GroupAction::free_group(2),
        GroupAction::free_group(1), GroupAction::free_group(3)}) {
    ActionReport rep = g.check_action(4);
    INFO(g.name() << " " << rep.first_violation);
    CHECK(rep.isometry_ok);
    CHECK(rep.transitivity_ok);
    CHECK(rep.properness_ok);
    CHECK(rep.stabilizer_order == g.stabilizer_order());
  }
}

TEST_CASE("element text forms") {
  GroupAction z = GroupAction::line();
  CHECK(z.element_str(Translation{3}) == "t^3");
  CHECK(z.parse_element("t^-2") == GroupElement(Translation{-2}));
  CHECK(z.parse_element("e") == z.identity());
  CHECK_THROWS_AS(z.parse_element("t^1·s"), std::invalid_argument);

  GroupAction d = GroupAction::infinite_dihedral();
  CHECK(d.element_str(DihedralMotion{2, -1}) == "t^2·s");
  CHECK(d.element_str(DihedralMotion{2, 1}) == "t^2");
  CHECK(d.parse_element("t^2·s") == GroupElement(DihedralMotion{2, -1}));
  CHECK(d.parse_element("t^2*s") == GroupElement(DihedralMotion{2, -1}));
  CHECK(d.parse_element("s") == GroupElement(DihedralMotion{0, -1}));
  CHECK(d.parse_element("t^5") == GroupElement(DihedralMotion{5, 1}));

  GroupAction f = GroupAction::free_group(2);
  CHECK(f.element_str(Word::parse("abA", 2)) == "abA");
  CHECK(f.parse_element("aA") == f.identity());  // reduced on parse
  CHECK_THROWS_AS(f.parse_element("xyz!"), std::invalid_argument);
}

TEST_CASE("family names round trip") {
  CHECK(GroupAction::from_name("line").name() == "line");
  CHECK(GroupAction::from_name("dihedral").name() == "dihedral");
  CHECK(GroupAction::from_name("free:2").name() == "free:2");
  CHECK(GroupAction::from_name("free:3").rank() == 3);
  CHECK_THROWS_AS(GroupAction::from_name("borel"), std::invalid_argument);
}

TEST_CASE("cross family element checks") {
  GroupAction z = GroupAction::line();
  CHECK_THROWS_AS(z.apply(Word::parse("a", 2), LinePoint{0}), std::invalid_argument);
  GroupAction f = GroupAction::free_group(2);
  CHECK_THROWS_AS(f.apply(Translation{1}, Word()), std::invalid_argument);
  CHECK_THROWS_AS(f.check_element(Word::parse("c", 3)), std::invalid_argument);
}
