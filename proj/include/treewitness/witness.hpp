#pragma once

// Stage-(i, n) witness elements.  The column at a vertex t is supported on
// the group elements that move the basepoint onto the geodesic from the
// basepoint to t, no further than distance i out, and each of those elements
// carries the same value: the inverse square root of the column's support
// count.  Columns vanish outside the radius-2n ball.
//
// witness_value evaluates a single entry from distances alone and never
// enumerates, so it stays usable at vertices far beyond any enumerable ball.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "group.hpp"
#include "module.hpp"
#include "scalar.hpp"
#include "tree.hpp"

namespace treewitness {

inline std::int64_t geodesic_reach(const GroupAction& action, std::int64_t i,
                                   const Vertex& t) {
  std::int64_t d = action.tree().distance(action.tree().basepoint(), t);
  return std::min(i, d);
}

// All g with g.o on the geodesic [o, t] and d(o, g.o) <= i, ordered by the
// position of g.o along the geodesic, then by transversal slot.
inline std::vector<GroupElement> orbit_geodesic_set(const GroupAction& action,
                                                    std::int64_t i, const Vertex& t) {
  if (i < 0) throw std::invalid_argument("orbit_geodesic_set: i must be nonnegative");
  const TreeGeometry& tree = action.tree();
  std::vector<Vertex> path = tree.geodesic(tree.basepoint(), t);
  std::size_t keep = static_cast<std::size_t>(geodesic_reach(action, i, t)) + 1;
  std::vector<GroupElement> out;
  for (std::size_t k = 0; k < keep; ++k)
    for (const GroupElement& g : action.vertex_transversal(path[k])) out.push_back(g);
  return out;
}

inline std::uint64_t orbit_geodesic_count(const GroupAction& action, std::int64_t i,
                                          const Vertex& t) {
  if (i < 0) throw std::invalid_argument("orbit_geodesic_count: i must be nonnegative");
  return static_cast<std::uint64_t>(action.stabilizer_order()) *
         static_cast<std::uint64_t>(geodesic_reach(action, i, t) + 1);
}

inline AlgebraicReal normalizer(const GroupAction& action, std::int64_t i,
                                const Vertex& t) {
  return AlgebraicReal::inv_sqrt(orbit_geodesic_count(action, i, t));
}

// Single-entry evaluation by distance tests only.
inline AlgebraicReal witness_value(const GroupAction& action, std::int64_t i,
                                   std::int64_t n, const GroupElement& g,
                                   const Vertex& t) {
  if (i < 0 || n < 0)
    throw std::invalid_argument("witness_value: i and n must be nonnegative");
  const TreeGeometry& tree = action.tree();
  const Vertex o = tree.basepoint();
  if (tree.distance(o, t) > 2 * n) return AlgebraicReal();
  Vertex go = action.apply(g, o);
  if (tree.distance(o, go) > i) return AlgebraicReal();
  if (!tree.on_geodesic(go, o, t)) return AlgebraicReal();
  return normalizer(action, i, t);
}

// The full stage element on an explicit window.  Only vertices inside both
// the window and the radius-2n ball receive values, so pass a window
// containing that ball to get the whole element.
inline ModuleElement build_witness(const GroupAction& action, std::int64_t i,
                                   std::int64_t n, const Window& window) {
  if (i < 0 || n < 0)
    throw std::invalid_argument("build_witness: i and n must be nonnegative");
  const TreeGeometry& tree = action.tree();
  const Vertex o = tree.basepoint();
  std::map<GroupElement, WindowFunction> columns;
  for (const Vertex& t : window.vertices()) {
    if (tree.distance(o, t) > 2 * n) continue;
    AlgebraicReal value = normalizer(action, i, t);
    for (const GroupElement& g : orbit_geodesic_set(action, i, t)) {
      auto it = columns.find(g);
      if (it == columns.end())
        it = columns.emplace(g, WindowFunction(window)).first;
      it->second.set(t, value);
    }
  }
  ModuleElement out(window);
  for (const auto& [g, b] : columns) out.set(g, b);
  return out;
}

inline ModuleElement build_witness(const GroupAction& action, std::int64_t i,
                                   std::int64_t n) {
  return build_witness(action, i, n, Window::ball(action.tree(), 2 * n));
}

// Windows up to this many vertices are enumerated outright; larger free
// group windows switch to exact per-class evaluation.
inline constexpr std::uint64_t dense_vertex_limit = 30000;

// Canonical vertex at distance d from the basepoint: the line walks right,
// free groups alternate the first two generators (or repeat the only one).
inline Vertex distance_representative(const TreeGeometry& tree, std::int64_t d) {
  if (d < 0)
    throw std::invalid_argument("distance_representative: d must be nonnegative");
  if (tree.kind() == TreeKind::integer_line) return LinePoint{d};
  Word w;
  for (std::int64_t s = 0; s < d; ++s)
    w.push_reduced(static_cast<std::int8_t>(tree.rank() >= 2 && s % 2 == 1 ? 2 : 1));
  return w;
}

struct GramCheck {
  bool ok = true;
  Integer vertex_count;            // size of the radius-2n ball the identity covers
  std::int64_t classes_checked = 0;  // distance classes, when the class lane ran
  bool dense = true;
};

// Checks that the witness columns square-sum to one on the whole 2n ball:
// every vertex individually when the ball is enumerable, otherwise one
// vertex per distance class (the column sum at t depends on t only through
// d(o, t); the unit tests confirm that on exhaustively enumerated balls).
inline GramCheck gram_check(const GroupAction& action, std::int64_t i, std::int64_t n) {
  if (i < 0 || n < 0)
    throw std::invalid_argument("gram_check: i and n must be nonnegative");
  const TreeGeometry& tree = action.tree();
  GramCheck out;
  out.vertex_count = tree.ball_size(2 * n);

  auto vertex_ok = [&](const Vertex& t) {
    auto set = orbit_geodesic_set(action, i, t);
    if (set.size() != orbit_geodesic_count(action, i, t)) return false;
    AlgebraicReal sum;
    for (const GroupElement& g : set) {
      AlgebraicReal v = witness_value(action, i, n, g, t);
      sum += v * v;
    }
    return sum == AlgebraicReal(1);
  };

  if (out.vertex_count <= Integer(dense_vertex_limit)) {
    for (const Vertex& t : tree.ball(tree.basepoint(), 2 * n))
      if (!vertex_ok(t)) { out.ok = false; break; }
    return out;
  }
  out.dense = false;
  for (std::int64_t d = 0; d <= 2 * n; ++d) {
    ++out.classes_checked;
    if (!vertex_ok(distance_representative(tree, d))) { out.ok = false; break; }
  }
  return out;
}

}  // namespace treewitness
