#pragma once

// Independent recomputation of the defect quantities, used to cross-check
// the module pipeline.  Everything here works from counting arguments:
// support sizes come from walking geodesics and counting vertices, cross
// terms from a count times two inverse roots rather than a sum over group
// elements, and the free group lane parametrizes vertex classes by the two
// distances (to the basepoint and to its shift) instead of the median
// profile, with its own parity and realizability logic and its own
// representative construction.
//
// This header deliberately depends only on the scalar, tree, and group
// layers, never on the witness or defect machinery it verifies.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "group.hpp"
#include "scalar.hpp"
#include "tree.hpp"

namespace treewitness {
namespace oracle {

inline std::uint64_t orbit_multiplicity(const GroupAction& action) {
  return action.vertex_transversal(action.tree().basepoint()).size();
}

// Column support size at t: orbit multiplicity times the number of geodesic
// vertices within distance i of the basepoint.
inline std::uint64_t support_count(const GroupAction& action, std::int64_t i,
                                   const Vertex& t) {
  if (i < 0) throw std::invalid_argument("oracle::support_count: i must be nonnegative");
  const TreeGeometry& tree = action.tree();
  const Vertex o = tree.basepoint();
  std::uint64_t vertices = 0;
  for (const Vertex& v : tree.geodesic(o, t))
    if (tree.distance(o, v) <= i) ++vertices;
  return orbit_multiplicity(action) * vertices;
}

// Size of the overlap between the support at t and the shifted support at
// the pullback of t, again by counting vertices.
inline std::uint64_t shared_count(const GroupAction& action, std::int64_t i,
                                  const GroupElement& g1, const Vertex& t) {
  if (i < 0) throw std::invalid_argument("oracle::shared_count: i must be nonnegative");
  const TreeGeometry& tree = action.tree();
  const Vertex o = tree.basepoint();
  GroupElement g1inv = action.inverse(g1);
  Vertex back = action.apply(g1inv, t);
  std::uint64_t vertices = 0;
  for (const Vertex& v : tree.geodesic(o, t)) {
    if (tree.distance(o, v) > i) continue;
    Vertex w = action.apply(g1inv, v);
    if (tree.distance(o, w) > i) continue;
    if (!tree.on_geodesic(w, o, back)) continue;
    ++vertices;
  }
  return orbit_multiplicity(action) * vertices;
}

// Cross term as count times inverse roots; zero when either the vertex or
// its pullback leaves the cutoff ball.
inline AlgebraicReal cross_value(const GroupAction& action, std::int64_t i,
                                 std::int64_t n, const GroupElement& g1,
                                 const Vertex& t) {
  if (n < 0) throw std::invalid_argument("oracle::cross_value: n must be nonnegative");
  const TreeGeometry& tree = action.tree();
  const Vertex o = tree.basepoint();
  Vertex back = action.apply(action.inverse(g1), t);
  if (tree.distance(o, t) > 2 * n || tree.distance(o, back) > 2 * n)
    return AlgebraicReal();
  std::uint64_t z = shared_count(action, i, g1, t);
  if (z == 0) return AlgebraicReal();
  return AlgebraicReal(static_cast<long long>(z)) *
         AlgebraicReal::inv_sqrt(support_count(action, i, t)) *
         AlgebraicReal::inv_sqrt(support_count(action, i, back));
}

struct OracleDefect {
  AlgebraicReal value;
  Integer region_size;
  bool region_empty = false;
};

namespace detail {

inline OracleDefect line_lane(const GroupAction& action, std::int64_t i,
                              std::int64_t n, const GroupElement& g1) {
  const std::int64_t p = std::get<LinePoint>(
      action.apply(g1, action.tree().basepoint())).pos;
  OracleDefect out;
  out.region_size = 0;
  for (std::int64_t t = -2 * n; t <= 2 * n; ++t) {
    std::int64_t d1 = std::abs(t);
    std::int64_t d2 = std::abs(t - p);
    if (d2 > 2 * n || d1 < i || d2 < i) continue;
    out.region_size += 1;
    AlgebraicReal cand = abs(AlgebraicReal(2) -
                             AlgebraicReal(2) * cross_value(action, i, n, g1,
                                                            LinePoint{t}));
    if (compare(cand, out.value) > 0) out.value = cand;
  }
  if (out.region_size == 0) out.region_empty = true;
  return out;
}

// Branch representative chosen with the largest admissible letter at each
// step, the reverse of any smallest-letter convention elsewhere, so lane
// agreement also exercises different members of each class.
inline Word branch_representative(const Word& g1, int rank, std::int64_t a,
                                  std::int64_t j) {
  Word t = g1.prefix(static_cast<std::size_t>(a));
  std::int64_t k = static_cast<std::int64_t>(g1.length());
  for (std::int64_t step = 0; step < j; ++step) {
    std::int8_t chosen = 0;
    for (int g = rank; g >= 1 && chosen == 0; --g) {
      for (std::int8_t l : {static_cast<std::int8_t>(-g), static_cast<std::int8_t>(g)}) {
        if (!t.empty() && t.letter(t.length() - 1) == -l) continue;
        if (step == 0 && a < k && g1.letter(static_cast<std::size_t>(a)) == l) continue;
        chosen = l;
        break;
      }
    }
    if (chosen == 0)
      throw std::logic_error("oracle::branch_representative: no admissible letter");
    t.push_reduced(chosen);
  }
  return t;
}

inline OracleDefect free_lane(const GroupAction& action, std::int64_t i,
                              std::int64_t n, const GroupElement& g1) {
  if (!std::holds_alternative<Word>(g1))
    throw std::logic_error("oracle::free_lane: needs a word");
  const Word& g1w = std::get<Word>(g1);
  const TreeGeometry& tree = action.tree();
  const int rank = tree.rank();
  const Vertex o = tree.basepoint();
  const Vertex g1o = action.apply(g1, o);
  const std::int64_t k = tree.distance(o, g1o);

  OracleDefect out;
  out.region_size = 0;
  for (std::int64_t rho1 = i; rho1 <= 2 * n; ++rho1) {
    for (std::int64_t rho2 = i; rho2 <= 2 * n; ++rho2) {
      std::int64_t num = rho1 + k - rho2;
      if (num < 0 || num % 2 != 0) continue;
      std::int64_t a = num / 2;
      if (a > k) continue;
      std::int64_t j = rho1 - a;
      if (j < 0) continue;

      Integer count;
      if (j == 0) count = 1;
      else {
        std::int64_t choices = 2 * rank - (a > 0 ? 1 : 0) - (a < k ? 1 : 0);
        if (choices <= 0) continue;
        count = Integer(choices) *
                boost::multiprecision::pow(Integer(2 * rank - 1),
                                           static_cast<unsigned>(j - 1));
      }

      Word rep = branch_representative(g1w, rank, a, j);
      if (tree.distance(o, rep) != rho1 || tree.distance(g1o, rep) != rho2)
        throw std::logic_error("oracle::free_lane: representative check failed");

      out.region_size += count;
      AlgebraicReal cand = abs(AlgebraicReal(2) -
                               AlgebraicReal(2) *
                                   cross_value(action, i, n, g1, rep));
      if (compare(cand, out.value) > 0) out.value = cand;
    }
  }
  if (out.region_size == 0) out.region_empty = true;
  return out;
}

}  // namespace detail

inline OracleDefect defect_sq(const GroupAction& action, std::int64_t i,
                              std::int64_t n, const GroupElement& g1) {
  if (i < 0 || n < 0)
    throw std::invalid_argument("oracle::defect_sq: i and n must be nonnegative");
  action.check_element(g1);
  if (action.family() == GroupFamily::free_group)
    return detail::free_lane(action, i, n, g1);
  return detail::line_lane(action, i, n, g1);
}

// Closed form the measurements corroborate: min(2, 2k/(i+1)) for shift
// length k at stage i.
inline AlgebraicReal closed_form_defect_sq(std::int64_t i, std::int64_t k) {
  if (i < 0 || k < 0)
    throw std::invalid_argument("closed_form_defect_sq: i and k must be nonnegative");
  if (k >= i + 1) return AlgebraicReal(2);
  return AlgebraicReal(Rational(2 * k, i + 1));
}

// Candidate closed forms kept for comparison; reports print these next to
// the measured values so any disagreement stays visible in the data.
inline Integer proposed_support_count(std::int64_t i, std::int64_t d, int m) {
  return Integer(m) * Integer(std::min(i, d));
}

inline Integer proposed_shared_count(std::int64_t i, std::int64_t k) {
  return Integer(i - k);
}

inline AlgebraicReal proposed_defect_sq(std::int64_t i, std::int64_t k, int m) {
  if (i <= 0 || m <= 0)
    throw std::invalid_argument("proposed_defect_sq: needs positive i and m");
  return AlgebraicReal(2) - AlgebraicReal(Rational(2 * (i - k), i * m));
}

}  // namespace oracle
}  // namespace treewitness
