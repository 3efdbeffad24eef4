#pragma once

// Commutation defect of the stage-(i, n) witness against a fixed group
// element g1.  The pairing of (left translation by g1 of the witness) minus
// (the witness itself) with itself is evaluated on the far region, where
// both the vertex and its pullback sit deep inside the cutoff ball; the
// squared defect is the sup of those values.
//
// Two lanes compute it.  The dense lane materializes the witness on the
// union of the two relevant balls and runs the module algebra; it needs an
// enumerable window.  The class lane, used for free groups whose windows
// outgrow enumeration, partitions vertices by the position of the median of
// (basepoint, g1 basepoint, vertex) and the branch length beyond it, counts
// each class in closed form, and evaluates the cross term at one canonical
// representative per class.  The unit tests check the two lanes against
// each other where both run, and check class constancy exhaustively on
// small balls.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "group.hpp"
#include "module.hpp"
#include "scalar.hpp"
#include "tree.hpp"
#include "witness.hpp"

namespace treewitness {

// Vertices t with both t and its pullback inside the radius-2n ball and
// both basepoints at distance at least i.  Enumerates the ball, so this is
// the dense lane's region only.
inline std::vector<Vertex> far_region(const GroupAction& action, std::int64_t i,
                                      std::int64_t n, const GroupElement& g1) {
  if (i < 0 || n < 0)
    throw std::invalid_argument("far_region: i and n must be nonnegative");
  action.check_element(g1);
  const TreeGeometry& tree = action.tree();
  const Vertex o = tree.basepoint();
  const Vertex g1o = action.apply(g1, o);
  std::vector<Vertex> out;
  for (const Vertex& t : tree.ball(o, 2 * n)) {
    if (tree.distance(g1o, t) > 2 * n) continue;
    if (tree.distance(o, t) < i) continue;
    if (tree.distance(g1o, t) < i) continue;
    out.push_back(t);
  }
  return out;
}

// Support elements shared by the column at t and the g1-shift of the column
// at the pullback of t.
inline std::vector<GroupElement> overlap_set(const GroupAction& action, std::int64_t i,
                                             const GroupElement& g1, const Vertex& t) {
  const TreeGeometry& tree = action.tree();
  const Vertex o = tree.basepoint();
  GroupElement g1inv = action.inverse(g1);
  Vertex back = action.apply(g1inv, t);
  std::vector<GroupElement> out;
  for (const GroupElement& g : orbit_geodesic_set(action, i, t)) {
    GroupElement h = action.compose(g1inv, g);
    Vertex ho = action.apply(h, o);
    if (tree.distance(o, ho) > i) continue;
    if (!tree.on_geodesic(ho, o, back)) continue;
    out.push_back(g);
  }
  return out;
}

// Sum over the column support at t of the entry there times the pulled-back
// entry at the pullback vertex.  Needs no enumeration beyond the geodesic
// to t, so it works at arbitrary distance.
inline AlgebraicReal cross_term(const GroupAction& action, std::int64_t i,
                                std::int64_t n, const GroupElement& g1,
                                const Vertex& t) {
  GroupElement g1inv = action.inverse(g1);
  Vertex back = action.apply(g1inv, t);
  AlgebraicReal out;
  for (const GroupElement& g : orbit_geodesic_set(action, i, t))
    out += witness_value(action, i, n, g, t) *
           witness_value(action, i, n, action.compose(g1inv, g), back);
  return out;
}

struct DefectValue {
  AlgebraicReal value;       // sup of |2 - 2 cross| over the far region
  Integer region_size;       // exact number of far-region vertices
  bool region_empty = false; // sup over nothing; value stays zero
  bool dense_lane = true;
};

namespace detail {

inline Integer median_class_count(int rank, std::int64_t k, std::int64_t a,
                                  std::int64_t j) {
  if (j == 0) return 1;
  std::int64_t first = 2 * rank - (a > 0 ? 1 : 0) - (a < k ? 1 : 0);
  if (first <= 0) return 0;
  return Integer(first) *
         boost::multiprecision::pow(Integer(2 * rank - 1),
                                    static_cast<unsigned>(j - 1));
}

// Canonical member of the class: take the length-a prefix of g1, then walk
// j steps, always choosing the collation-smallest letter that neither
// backtracks nor (on the first step) continues along g1.
inline Word median_class_representative(const Word& g1, int rank, std::int64_t a,
                                        std::int64_t j) {
  Word t = g1.prefix(static_cast<std::size_t>(a));
  std::int64_t k = static_cast<std::int64_t>(g1.length());
  for (std::int64_t step = 0; step < j; ++step) {
    std::int8_t chosen = 0;
    for (int g = 1; g <= rank && chosen == 0; ++g) {
      for (std::int8_t l : {static_cast<std::int8_t>(g), static_cast<std::int8_t>(-g)}) {
        if (!t.empty() && t.letter(t.length() - 1) == -l) continue;
        if (step == 0 && a < k && g1.letter(static_cast<std::size_t>(a)) == l) continue;
        chosen = l;
        break;
      }
    }
    if (chosen == 0)
      throw std::logic_error("median_class_representative: no admissible letter");
    t.push_reduced(chosen);
  }
  return t;
}

inline DefectValue defect_sq_dense(const GroupAction& action, std::int64_t i,
                                   std::int64_t n, const GroupElement& g1) {
  const TreeGeometry& tree = action.tree();
  const Vertex o = tree.basepoint();
  const Vertex g1o = action.apply(g1, o);
  Window w = Window::balls(tree, 2 * n, {o, g1o});
  ModuleElement T = build_witness(action, i, n, w);
  ModuleElement shifted = convolve(
      action, ModuleElement::delta(w, g1, WindowFunction::constant_one(w)), T);
  if (!shifted.window_clean())
    throw std::logic_error("defect_sq: window failed to hold the shifted witness");
  WindowFunction gram = inner(shifted - T, shifted - T);

  DefectValue out;
  std::vector<Vertex> region = far_region(action, i, n, g1);
  out.region_size = region.size();
  if (region.empty()) { out.region_empty = true; return out; }
  for (const Vertex& t : region) {
    AlgebraicReal cand = abs(gram.at(t));
    if (compare(cand, out.value) > 0) out.value = cand;
  }
  return out;
}

inline DefectValue defect_sq_classes(const GroupAction& action, std::int64_t i,
                                     std::int64_t n, const GroupElement& g1) {
  if (!std::holds_alternative<Word>(g1))
    throw std::logic_error("defect_sq_classes: free group lane needs a word");
  const Word& g1w = std::get<Word>(g1);
  const TreeGeometry& tree = action.tree();
  const int rank = tree.rank();
  const std::int64_t k = static_cast<std::int64_t>(g1w.length());
  const Vertex o = tree.basepoint();
  const Vertex g1o = action.apply(g1, o);

  DefectValue out;
  out.dense_lane = false;
  out.region_size = 0;
  for (std::int64_t a = 0; a <= k; ++a) {
    for (std::int64_t j = 0; a + j <= 2 * n && (k - a) + j <= 2 * n; ++j) {
      if (a + j < i || (k - a) + j < i) continue;
      Integer count = median_class_count(rank, k, a, j);
      if (count == 0) continue;
      Word rep = median_class_representative(g1w, rank, a, j);
      if (tree.distance(o, rep) != a + j ||
          tree.distance(g1o, rep) != (k - a) + j ||
          !(tree.median(o, g1o, rep) == Vertex(g1w.prefix(static_cast<std::size_t>(a)))))
        throw std::logic_error("defect_sq_classes: representative check failed");
      out.region_size += count;
      AlgebraicReal cand =
          abs(AlgebraicReal(2) - AlgebraicReal(2) * cross_term(action, i, n, g1, rep));
      if (compare(cand, out.value) > 0) out.value = cand;
    }
  }
  if (out.region_size == 0) out.region_empty = true;
  return out;
}

}  // namespace detail

inline DefectValue defect_sq(const GroupAction& action, std::int64_t i,
                             std::int64_t n, const GroupElement& g1) {
  if (i < 0 || n < 0)
    throw std::invalid_argument("defect_sq: i and n must be nonnegative");
  action.check_element(g1);
  if (action.family() == GroupFamily::free_group &&
      action.tree().ball_size(2 * n) * 2 > Integer(dense_vertex_limit))
    return detail::defect_sq_classes(action, i, n, g1);
  return detail::defect_sq_dense(action, i, n, g1);
}

struct StabilityRow {
  std::int64_t n = 0;
  DefectValue defect;
};

inline std::vector<StabilityRow> defect_sweep(const GroupAction& action,
                                              std::int64_t i, const GroupElement& g1,
                                              std::int64_t n_lo, std::int64_t n_hi) {
  if (n_lo > n_hi) throw std::invalid_argument("defect_sweep: empty n range");
  std::vector<StabilityRow> rows;
  for (std::int64_t n = n_lo; n <= n_hi; ++n)
    rows.push_back({n, defect_sq(action, i, n, g1)});
  return rows;
}

// The defect value must not depend on n once the far region is nonempty;
// empty-region rows carry no value and are excluded.
inline bool defect_stable(const std::vector<StabilityRow>& rows) {
  const AlgebraicReal* ref = nullptr;
  for (const StabilityRow& row : rows) {
    if (row.defect.region_empty) continue;
    if (ref == nullptr) ref = &row.defect.value;
    else if (*ref != row.defect.value) return false;
  }
  return true;
}

// One-norm mismatch of the squared column weights at basepoint x against
// the g1-shifted weights at the pullback of x.
inline AlgebraicReal l1_defect(const GroupAction& action, std::int64_t i,
                               std::int64_t n, const GroupElement& g1,
                               const Vertex& x) {
  if (i < 0 || n < 0)
    throw std::invalid_argument("l1_defect: i and n must be nonnegative");
  action.check_element(g1);
  GroupElement g1inv = action.inverse(g1);
  Vertex back = action.apply(g1inv, x);
  std::map<GroupElement, AlgebraicReal> diff;
  for (const GroupElement& g : orbit_geodesic_set(action, i, x)) {
    AlgebraicReal v = witness_value(action, i, n, g, x);
    diff[g] += v * v;
  }
  for (const GroupElement& h : orbit_geodesic_set(action, i, back)) {
    AlgebraicReal v = witness_value(action, i, n, h, back);
    diff[action.compose(g1, h)] -= v * v;
  }
  AlgebraicReal out;
  for (const auto& [g, c] : diff) out += abs(c);
  return out;
}

}  // namespace treewitness
