#pragma once

// The three group families acting on the shipped trees: free groups on their
// Cayley trees (left multiplication), integer translations of the line, and
// the infinite dihedral group t -> flip*t + shift.  All three actions are
// proper, isometric and vertex transitive; check_action certifies that at
// finite scale instead of assuming it.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "tree.hpp"

namespace treewitness {

struct Translation {
  std::int64_t shift = 0;
  auto operator<=>(const Translation&) const = default;
};

// t -> flip*t + shift with flip in {+1, -1}
struct DihedralMotion {
  std::int64_t shift = 0;
  std::int8_t flip = 1;
  auto operator<=>(const DihedralMotion&) const = default;
};

using GroupElement = std::variant<Translation, DihedralMotion, Word>;

enum class GroupFamily { line_translation, infinite_dihedral, free_group };

struct ActionReport {
  bool isometry_ok = false;
  bool transitivity_ok = false;
  bool properness_ok = false;
  int stabilizer_order = 0;
  std::string first_violation;  // empty when everything checks out
};

class GroupAction {
 public:
  static GroupAction line() { return GroupAction(GroupFamily::line_translation, 0); }
  static GroupAction infinite_dihedral() {
    return GroupAction(GroupFamily::infinite_dihedral, 0);
  }
  static GroupAction free_group(int rank) {
    if (rank < 1 || rank > 26)
      throw std::invalid_argument("GroupAction: free rank must be in 1..26");
    return GroupAction(GroupFamily::free_group, rank);
  }

  // "line", "dihedral", "free:k"
  static GroupAction from_name(const std::string& name) {
    if (name == "line") return line();
    if (name == "dihedral") return infinite_dihedral();
    if (name.rfind("free:", 0) == 0) return free_group(std::stoi(name.substr(5)));
    throw std::invalid_argument("GroupAction: unknown family '" + name + "'");
  }

  GroupFamily family() const { return family_; }
  int rank() const { return rank_; }

  std::string name() const {
    switch (family_) {
      case GroupFamily::line_translation: return "line";
      case GroupFamily::infinite_dihedral: return "dihedral";
      case GroupFamily::free_group: return "free:" + std::to_string(rank_);
    }
    return {};
  }

  TreeGeometry tree() const {
    if (family_ == GroupFamily::free_group) return TreeGeometry::free_cayley(rank_);
    return TreeGeometry::integer_line();
  }

  GroupElement identity() const {
    switch (family_) {
      case GroupFamily::line_translation: return Translation{0};
      case GroupFamily::infinite_dihedral: return DihedralMotion{0, 1};
      case GroupFamily::free_group: return Word();
    }
    return Translation{0};
  }

  void check_element(const GroupElement& g) const {
    switch (family_) {
      case GroupFamily::line_translation:
        if (!std::holds_alternative<Translation>(g))
          throw std::invalid_argument("GroupAction: element is not a line translation");
        return;
      case GroupFamily::infinite_dihedral: {
        if (!std::holds_alternative<DihedralMotion>(g))
          throw std::invalid_argument("GroupAction: element is not a dihedral motion");
        auto f = std::get<DihedralMotion>(g).flip;
        if (f != 1 && f != -1)
          throw std::invalid_argument("GroupAction: dihedral flip must be +1 or -1");
        return;
      }
      case GroupFamily::free_group:
        if (!std::holds_alternative<Word>(g))
          throw std::invalid_argument("GroupAction: element is not a free word");
        for (std::int8_t l : std::get<Word>(g).letters())
          if (std::abs(l) > rank_)
            throw std::invalid_argument("GroupAction: word letter exceeds rank");
        return;
    }
  }

  Vertex apply(const GroupElement& g, const Vertex& v) const {
    check_element(g);
    tree().check_vertex(v);
    switch (family_) {
      case GroupFamily::line_translation:
        return LinePoint{std::get<LinePoint>(v).pos + std::get<Translation>(g).shift};
      case GroupFamily::infinite_dihedral: {
        const auto& m = std::get<DihedralMotion>(g);
        return LinePoint{m.flip * std::get<LinePoint>(v).pos + m.shift};
      }
      case GroupFamily::free_group:
        return std::get<Word>(g).concat(std::get<Word>(v));
    }
    return v;
  }

  GroupElement compose(const GroupElement& g, const GroupElement& h) const {
    check_element(g);
    check_element(h);
    switch (family_) {
      case GroupFamily::line_translation:
        return Translation{std::get<Translation>(g).shift + std::get<Translation>(h).shift};
      case GroupFamily::infinite_dihedral: {
        const auto& a = std::get<DihedralMotion>(g);
        const auto& b = std::get<DihedralMotion>(h);
        return DihedralMotion{a.flip * b.shift + a.shift,
                              static_cast<std::int8_t>(a.flip * b.flip)};
      }
      case GroupFamily::free_group:
        return std::get<Word>(g).concat(std::get<Word>(h));
    }
    return g;
  }

  GroupElement inverse(const GroupElement& g) const {
    check_element(g);
    switch (family_) {
      case GroupFamily::line_translation:
        return Translation{-std::get<Translation>(g).shift};
      case GroupFamily::infinite_dihedral: {
        const auto& m = std::get<DihedralMotion>(g);
        return DihedralMotion{-m.flip * m.shift, m.flip};
      }
      case GroupFamily::free_group:
        return std::get<Word>(g).inverse();
    }
    return g;
  }

  std::int64_t displacement(const GroupElement& g) const {
    TreeGeometry t = tree();
    return t.distance(t.basepoint(), apply(g, t.basepoint()));
  }

  int stabilizer_order() const {
    return family_ == GroupFamily::infinite_dihedral ? 2 : 1;
  }

  std::vector<GroupElement> stabilizer_elements() const {
    if (family_ == GroupFamily::infinite_dihedral)
      return {DihedralMotion{0, 1}, DihedralMotion{0, -1}};
    return {identity()};
  }

  // The elements carrying the basepoint to v, in a fixed order.
  std::vector<GroupElement> vertex_transversal(const Vertex& v) const {
    tree().check_vertex(v);
    switch (family_) {
      case GroupFamily::line_translation:
        return {Translation{std::get<LinePoint>(v).pos}};
      case GroupFamily::infinite_dihedral: {
        std::int64_t p = std::get<LinePoint>(v).pos;
        return {DihedralMotion{p, 1}, DihedralMotion{p, -1}};
      }
      case GroupFamily::free_group:
        return {std::get<Word>(v)};
    }
    return {};
  }

  // All g with d(g*o, o) <= R, ordered by image vertex then transversal slot.
  std::vector<GroupElement> orbit_ball_elements(std::int64_t R) const {
    std::vector<GroupElement> out;
    TreeGeometry t = tree();
    for (const Vertex& v : t.ball(t.basepoint(), R))
      for (const GroupElement& g : vertex_transversal(v)) out.push_back(g);
    return out;
  }

  std::string element_str(const GroupElement& g) const {
    check_element(g);
    switch (family_) {
      case GroupFamily::line_translation:
        return "t^" + std::to_string(std::get<Translation>(g).shift);
      case GroupFamily::infinite_dihedral: {
        const auto& m = std::get<DihedralMotion>(g);
        std::string s = "t^" + std::to_string(m.shift);
        if (m.flip < 0) s += "·s";
        return s;
      }
      case GroupFamily::free_group:
        return std::get<Word>(g).str();
    }
    return {};
  }

  GroupElement parse_element(const std::string& text) const {
    if (family_ == GroupFamily::free_group) return Word::parse(text, rank_);
    std::string body = text;
    bool flip = false;
    for (const std::string& tail : {std::string("·s"), std::string("*s")}) {
      if (body.size() >= tail.size() &&
          body.compare(body.size() - tail.size(), tail.size(), tail) == 0) {
        flip = true;
        body = body.substr(0, body.size() - tail.size());
        break;
      }
    }
    std::int64_t shift = 0;
    if (body == "s" && family_ == GroupFamily::infinite_dihedral) {
      flip = true;
    } else if (body == "e" || body.empty()) {
      shift = 0;
    } else if (body.rfind("t^", 0) == 0) {
      shift = std::stoll(body.substr(2));
    } else {
      throw std::invalid_argument("GroupAction: cannot parse element '" + text + "'");
    }
    if (family_ == GroupFamily::line_translation) {
      if (flip)
        throw std::invalid_argument("GroupAction: line translations have no flip part");
      return Translation{shift};
    }
    return DihedralMotion{shift, static_cast<std::int8_t>(flip ? -1 : 1)};
  }

  // Certify the action's standing assumptions at finite scale: isometric on
  // sampled triples, transitive on ball(R), proper with constant fibre size m
  // over ball(R), and group laws consistent with apply.
  ActionReport check_action(std::int64_t R) const {
    ActionReport rep;
    TreeGeometry t = tree();
    Vertex o = t.basepoint();
    std::int64_t small = std::min<std::int64_t>(R, 2);
    std::vector<Vertex> patch = t.ball(o, small);
    std::vector<GroupElement> movers = orbit_ball_elements(small);

    rep.isometry_ok = true;
    for (const GroupElement& g : movers)
      for (const Vertex& u : patch)
        for (const Vertex& v : patch)
          if (t.distance(apply(g, u), apply(g, v)) != t.distance(u, v)) {
            rep.isometry_ok = false;
            if (rep.first_violation.empty())
              rep.first_violation = "isometry broken by " + element_str(g);
          }

    rep.transitivity_ok = true;
    rep.properness_ok = true;
    std::vector<Vertex> reach = t.ball(o, R);
    for (const Vertex& v : reach) {
      auto fibre = vertex_transversal(v);
      if (static_cast<int>(fibre.size()) != stabilizer_order()) rep.properness_ok = false;
      for (const GroupElement& g : fibre)
        if (!(apply(g, o) == v)) {
          rep.transitivity_ok = false;
          if (rep.first_violation.empty())
            rep.first_violation = "transversal misses " + vertex_str(v);
        }
    }
    if (orbit_ball_elements(R).size() !=
        static_cast<std::size_t>(stabilizer_order()) * reach.size())
      rep.properness_ok = false;

    for (const GroupElement& g : stabilizer_elements())
      if (!(apply(g, o) == o)) rep.properness_ok = false;
    rep.stabilizer_order = stabilizer_order();

    for (const GroupElement& g : movers)
      for (const GroupElement& h : movers) {
        for (const Vertex& v : patch)
          if (!(apply(compose(g, h), v) == apply(g, apply(h, v)))) {
            rep.isometry_ok = false;
            if (rep.first_violation.empty())
              rep.first_violation = "compose inconsistent with apply";
          }
        if (!(compose(g, inverse(g)) == identity())) {
          rep.isometry_ok = false;
          if (rep.first_violation.empty())
            rep.first_violation = "inverse inconsistent with compose";
        }
      }
    return rep;
  }

  friend bool operator==(const GroupAction& a, const GroupAction& b) {
    return a.family_ == b.family_ && a.rank_ == b.rank_;
  }

 private:
  GroupAction(GroupFamily family, int rank) : family_(family), rank_(rank) {}

  GroupFamily family_;
  int rank_;
};

}  // namespace treewitness
