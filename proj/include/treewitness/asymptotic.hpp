#pragma once

// Finite-stage model of sequence algebras over a discretized proper metric
// space.  A FunctionSequence is a finite list of bounded stage functions on
// a fixed finite space, each restricted to a nondecreasing window; "for all
// n in the tail" replaces any limit notion, with the tail start N0
// defaulting to half the stage count.
//
// Stage values are doubles.  The operations that acceptance checks call
// exact (indicator products, stage differences of equal values) only ever
// multiply by 0/1 or subtract identical doubles, so those comparisons are
// exact in IEEE arithmetic; the cutoff bound survives rounding because
// multiplying by a factor in [0, 1] cannot increase a double's magnitude
// past a representable bound.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "group.hpp"
#include "tree.hpp"

namespace treewitness {

class DiscretizedSpace {
 public:
  enum class Kind { tree_ball, segment };

  static DiscretizedSpace tree_ball(const TreeGeometry& geometry, std::int64_t radius) {
    if (radius < 0)
      throw std::invalid_argument("DiscretizedSpace: radius must be nonnegative");
    auto data = std::make_shared<Data>();
    data->kind = Kind::tree_ball;
    data->radius = radius;
    data->scale_bits = 0;
    data->geometry = geometry;
    data->vertices = geometry.ball(geometry.basepoint(), radius);
    data->base_dist.reserve(data->vertices.size());
    for (std::size_t idx = 0; idx < data->vertices.size(); ++idx) {
      data->base_dist.push_back(static_cast<double>(
          geometry.distance(geometry.basepoint(), data->vertices[idx])));
      if (data->vertices[idx] == geometry.basepoint()) data->base_index = idx;
    }
    return DiscretizedSpace(std::move(data));
  }

  static DiscretizedSpace integer_segment(std::int64_t radius) {
    return segment(radius, 0);
  }

  // points j * 2^-scale_bits for |j| <= radius * 2^scale_bits
  static DiscretizedSpace dyadic_segment(std::int64_t radius, int scale_bits) {
    if (scale_bits < 1 || scale_bits > 20)
      throw std::invalid_argument("DiscretizedSpace: scale_bits out of range");
    return segment(radius, scale_bits);
  }

  Kind kind() const { return data_->kind; }
  std::int64_t radius() const { return data_->radius; }
  double step() const { return std::ldexp(1.0, -data_->scale_bits); }
  bool integer_metric() const { return data_->scale_bits == 0; }
  std::size_t size() const {
    return data_->kind == Kind::tree_ball
               ? data_->vertices.size()
               : static_cast<std::size_t>(2 * data_->steps + 1);
  }
  std::size_t base_index() const { return data_->base_index; }

  double base_distance(std::size_t idx) const {
    if (data_->kind == Kind::tree_ball) return data_->base_dist[idx];
    return std::abs(coordinate(idx));
  }

  double distance(std::size_t a, std::size_t b) const {
    if (data_->kind == Kind::tree_ball)
      return static_cast<double>(
          data_->geometry->distance(data_->vertices[a], data_->vertices[b]));
    return std::abs(coordinate(a) - coordinate(b));
  }

  // segments only: the real coordinate of a point
  double coordinate(std::size_t idx) const {
    if (data_->kind != Kind::segment)
      throw std::logic_error("DiscretizedSpace::coordinate: not a segment");
    return static_cast<double>(static_cast<std::int64_t>(idx) - data_->steps) * step();
  }

  const TreeGeometry& tree() const {
    if (data_->kind != Kind::tree_ball)
      throw std::logic_error("DiscretizedSpace::tree: not a tree ball");
    return *data_->geometry;
  }

  const std::vector<Vertex>& vertices() const {
    if (data_->kind != Kind::tree_ball)
      throw std::logic_error("DiscretizedSpace::vertices: not a tree ball");
    return data_->vertices;
  }

  std::optional<std::size_t> find(const Vertex& v) const {
    const auto& vs = vertices();
    auto it = std::lower_bound(vs.begin(), vs.end(), v);
    if (it == vs.end() || !(*it == v)) return std::nullopt;
    return static_cast<std::size_t>(it - vs.begin());
  }

  friend bool operator==(const DiscretizedSpace& a, const DiscretizedSpace& b) {
    if (a.data_ == b.data_) return true;
    if (a.data_->kind != b.data_->kind || a.data_->radius != b.data_->radius ||
        a.data_->scale_bits != b.data_->scale_bits)
      return false;
    if (a.data_->kind == Kind::tree_ball) return a.data_->vertices == b.data_->vertices;
    return true;
  }
  friend bool operator!=(const DiscretizedSpace& a, const DiscretizedSpace& b) {
    return !(a == b);
  }

 private:
  struct Data {
    Kind kind = Kind::segment;
    std::int64_t radius = 0;
    int scale_bits = 0;
    std::int64_t steps = 0;  // segment: index range is -steps..steps
    std::optional<TreeGeometry> geometry;
    std::vector<Vertex> vertices;
    std::vector<double> base_dist;
    std::size_t base_index = 0;
  };

  explicit DiscretizedSpace(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

  static DiscretizedSpace segment(std::int64_t radius, int scale_bits) {
    if (radius < 0)
      throw std::invalid_argument("DiscretizedSpace: radius must be nonnegative");
    auto data = std::make_shared<Data>();
    data->kind = Kind::segment;
    data->radius = radius;
    data->scale_bits = scale_bits;
    data->steps = radius << scale_bits;
    data->base_index = static_cast<std::size_t>(data->steps);
    return DiscretizedSpace(std::move(data));
  }

  std::shared_ptr<const Data> data_;
};

// The far cutoff: zero on B(n), one from distance n+1 outward, and on
// sub-integer discretizations a linear ramp in between.
inline std::vector<double> chi(const DiscretizedSpace& space, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("chi: n must be nonnegative");
  std::vector<double> out(space.size());
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    double d = space.base_distance(idx);
    if (space.integer_metric()) out[idx] = d >= static_cast<double>(n) + 1 ? 1.0 : 0.0;
    else out[idx] = std::clamp(d - static_cast<double>(n), 0.0, 1.0);
  }
  return out;
}

inline std::vector<double> compact_indicator(const DiscretizedSpace& space, double s) {
  std::vector<double> out(space.size());
  for (std::size_t idx = 0; idx < out.size(); ++idx)
    out[idx] = space.base_distance(idx) <= s ? 1.0 : 0.0;
  return out;
}

class FunctionSequence {
 public:
  FunctionSequence(DiscretizedSpace space, std::vector<std::vector<double>> stages,
                   std::vector<std::int64_t> windows)
      : space_(std::move(space)), stages_(std::move(stages)), windows_(std::move(windows)) {
    if (stages_.size() != windows_.size())
      throw std::invalid_argument("FunctionSequence: one window per stage");
    if (stages_.empty()) throw std::invalid_argument("FunctionSequence: no stages");
    std::int64_t last = 0;
    for (std::size_t n = 0; n < stages_.size(); ++n) {
      if (stages_[n].size() != space_.size())
        throw std::invalid_argument("FunctionSequence: stage size mismatch");
      if (windows_[n] < 0 || windows_[n] > space_.radius())
        throw std::invalid_argument("FunctionSequence: window outside the space");
      if (n > 0 && windows_[n] < last)
        throw std::invalid_argument("FunctionSequence: windows must be nondecreasing");
      last = windows_[n];
      for (std::size_t idx = 0; idx < stages_[n].size(); ++idx) {
        if (!std::isfinite(stages_[n][idx]))
          throw std::invalid_argument("FunctionSequence: stage values must be finite");
        if (space_.base_distance(idx) > static_cast<double>(windows_[n]))
          stages_[n][idx] = 0.0;
      }
    }
  }

  static FunctionSequence constant_windows(DiscretizedSpace space,
                                           std::vector<std::vector<double>> stages) {
    std::vector<std::int64_t> windows(stages.size(), space.radius());
    return FunctionSequence(std::move(space), std::move(stages), std::move(windows));
  }

  const DiscretizedSpace& space() const { return space_; }
  std::size_t stage_count() const { return stages_.size(); }
  const std::vector<double>& stage(std::size_t n) const { return stages_.at(n); }
  std::int64_t window(std::size_t n) const { return windows_.at(n); }

  bool in_window(std::size_t n, std::size_t idx) const {
    return space_.base_distance(idx) <= static_cast<double>(windows_.at(n));
  }

  double bound() const {
    double m = 0;
    for (const auto& stage : stages_)
      for (double v : stage) m = std::max(m, std::abs(v));
    return m;
  }

  std::size_t default_tail() const { return stages_.size() / 2; }

 private:
  DiscretizedSpace space_;
  std::vector<std::vector<double>> stages_;
  std::vector<std::int64_t> windows_;
};

inline void require_same_space(const FunctionSequence& a, const FunctionSequence& b,
                               const char* op) {
  if (a.space() != b.space() || a.stage_count() != b.stage_count())
    throw std::invalid_argument(std::string(op) + ": sequence shape mismatch");
}

// stage n: indicator of n < d <= 2n
inline FunctionSequence bump_family(const DiscretizedSpace& space, std::size_t count) {
  std::vector<std::vector<double>> stages;
  for (std::size_t n = 0; n < count; ++n) {
    std::vector<double> f(space.size());
    for (std::size_t idx = 0; idx < f.size(); ++idx) {
      double d = space.base_distance(idx);
      f[idx] = d > static_cast<double>(n) && d <= 2.0 * static_cast<double>(n) ? 1.0 : 0.0;
    }
    stages.push_back(std::move(f));
  }
  return FunctionSequence::constant_windows(space, std::move(stages));
}

// stage 0 is the constant 1, stage n >= 1 the constant 1/n
inline FunctionSequence reciprocal_family(const DiscretizedSpace& space,
                                          std::size_t count) {
  std::vector<std::vector<double>> stages;
  for (std::size_t n = 0; n < count; ++n) {
    double v = n == 0 ? 1.0 : 1.0 / static_cast<double>(n);
    stages.emplace_back(space.size(), v);
  }
  return FunctionSequence::constant_windows(space, std::move(stages));
}

// random far-supported stages: stage n carries one value in [1/2, 1) on the
// complement of a ball whose radius trails n by at most 2 and never shrinks
inline FunctionSequence random_tail_family(const DiscretizedSpace& space,
                                           std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> lag(0, 2);
  std::uniform_int_distribution<int> thousandths(0, 999);
  std::vector<std::vector<double>> stages;
  std::int64_t floor = 0;
  for (std::size_t n = 0; n < count; ++n) {
    double level = 0.5 + static_cast<double>(thousandths(rng)) / 2000.0;
    std::int64_t inner = std::max<std::int64_t>(0, static_cast<std::int64_t>(n) - lag(rng));
    inner = floor = std::max(floor, inner);
    std::vector<double> f(space.size());
    for (std::size_t idx = 0; idx < f.size(); ++idx)
      f[idx] = space.base_distance(idx) > static_cast<double>(inner) ? level : 0.0;
    stages.push_back(std::move(f));
  }
  return FunctionSequence::constant_windows(space, std::move(stages));
}

inline FunctionSequence stage_sum(const FunctionSequence& a, const FunctionSequence& b) {
  require_same_space(a, b, "stage_sum");
  std::vector<std::vector<double>> stages;
  std::vector<std::int64_t> windows;
  for (std::size_t n = 0; n < a.stage_count(); ++n) {
    std::vector<double> f = a.stage(n);
    for (std::size_t idx = 0; idx < f.size(); ++idx) f[idx] += b.stage(n)[idx];
    stages.push_back(std::move(f));
    windows.push_back(std::min(a.window(n), b.window(n)));
  }
  return FunctionSequence(a.space(), std::move(stages), std::move(windows));
}

inline FunctionSequence stage_product(const FunctionSequence& a,
                                      const FunctionSequence& b) {
  require_same_space(a, b, "stage_product");
  std::vector<std::vector<double>> stages;
  std::vector<std::int64_t> windows;
  for (std::size_t n = 0; n < a.stage_count(); ++n) {
    std::vector<double> f = a.stage(n);
    for (std::size_t idx = 0; idx < f.size(); ++idx) f[idx] *= b.stage(n)[idx];
    stages.push_back(std::move(f));
    windows.push_back(std::min(a.window(n), b.window(n)));
  }
  return FunctionSequence(a.space(), std::move(stages), std::move(windows));
}

inline FunctionSequence stage_scale(const FunctionSequence& a, double c) {
  std::vector<std::vector<double>> stages;
  std::vector<std::int64_t> windows;
  for (std::size_t n = 0; n < a.stage_count(); ++n) {
    std::vector<double> f = a.stage(n);
    for (double& v : f) v *= c;
    stages.push_back(std::move(f));
    windows.push_back(a.window(n));
  }
  return FunctionSequence(a.space(), std::move(stages), std::move(windows));
}

// pointwise difference of equal-shape sequences
inline FunctionSequence stage_difference(const FunctionSequence& a,
                                         const FunctionSequence& b) {
  return stage_sum(a, stage_scale(b, -1.0));
}

// stage n = (1 - chi(n)) * f
inline FunctionSequence embed_bounded(const DiscretizedSpace& space,
                                      const std::vector<double>& f, std::size_t count) {
  if (f.size() != space.size())
    throw std::invalid_argument("embed_bounded: function size mismatch");
  std::vector<std::vector<double>> stages;
  for (std::size_t n = 0; n < count; ++n) {
    std::vector<double> cut = chi(space, static_cast<std::int64_t>(n));
    std::vector<double> stage(space.size());
    for (std::size_t idx = 0; idx < stage.size(); ++idx)
      stage[idx] = (1.0 - cut[idx]) * f[idx];
    stages.push_back(std::move(stage));
  }
  return FunctionSequence::constant_windows(space, std::move(stages));
}

// a fixed function repeated at every stage
inline FunctionSequence constant_sequence(const DiscretizedSpace& space,
                                          const std::vector<double>& f,
                                          std::size_t count) {
  if (f.size() != space.size())
    throw std::invalid_argument("constant_sequence: function size mismatch");
  return FunctionSequence::constant_windows(space,
                                            std::vector<std::vector<double>>(count, f));
}

// (g . f_n)(t) = f_n(g^-1 t); values whose preimage leaves the ball read 0
inline FunctionSequence translate(const GroupAction& action, const GroupElement& g,
                                  const FunctionSequence& seq) {
  const DiscretizedSpace& space = seq.space();
  if (space.kind() != DiscretizedSpace::Kind::tree_ball)
    throw std::invalid_argument("translate: sequence must live on a tree ball");
  if (action.tree().kind() != space.tree().kind() ||
      action.tree().rank() != space.tree().rank())
    throw std::invalid_argument("translate: action and sequence trees differ");
  GroupElement ginv = action.inverse(g);
  std::vector<std::vector<double>> stages;
  std::vector<std::int64_t> windows;
  for (std::size_t n = 0; n < seq.stage_count(); ++n) {
    std::vector<double> f(space.size(), 0.0);
    for (std::size_t idx = 0; idx < f.size(); ++idx) {
      auto src = space.find(action.apply(ginv, space.vertices()[idx]));
      if (src) f[idx] = seq.stage(n)[*src];
    }
    stages.push_back(std::move(f));
    windows.push_back(seq.window(n));
  }
  return FunctionSequence(space, std::move(stages), std::move(windows));
}

// Smallest grid step under which the tail stages move by at most eps across
// pairs closer than it.  Integer-metric spaces get a grid reaching below
// the vertex spacing; sub-integer ones a grid of small step multiples.
inline std::optional<double> equicontinuity_check(const FunctionSequence& seq, double r,
                                                  double eps,
                                                  std::int64_t tail_start = -1) {
  if (eps <= 0) throw std::invalid_argument("equicontinuity_check: eps must be positive");
  std::size_t n0 = tail_start < 0 ? seq.default_tail()
                                  : static_cast<std::size_t>(tail_start);
  if (n0 >= seq.stage_count())
    throw std::invalid_argument("equicontinuity_check: tail start beyond stages");
  for (std::size_t n = n0; n < seq.stage_count(); ++n)
    if (static_cast<double>(seq.window(n)) < r)
      throw std::invalid_argument("equicontinuity_check: r outside a tail window");

  const DiscretizedSpace& space = seq.space();
  std::vector<std::size_t> inside;
  for (std::size_t idx = 0; idx < space.size(); ++idx)
    if (space.base_distance(idx) <= r) inside.push_back(idx);

  std::vector<double> grid;
  if (space.integer_metric()) grid = {0.5, 1.0, 2.0, 4.0};
  else {
    double h = space.step();
    grid = {2 * h, 4 * h, 8 * h, 16 * h, 32 * h};
  }

  for (double delta : grid) {
    bool ok = true;
    for (std::size_t n = n0; n < seq.stage_count() && ok; ++n) {
      for (std::size_t ai = 0; ai < inside.size() && ok; ++ai) {
        for (std::size_t bi = ai + 1; bi < inside.size(); ++bi) {
          std::size_t a = inside[ai], b = inside[bi];
          if (space.distance(a, b) >= delta) continue;
          if (std::abs(seq.stage(n)[a] - seq.stage(n)[b]) > eps) { ok = false; break; }
        }
      }
    }
    if (ok) return delta;
  }
  return std::nullopt;
}

struct IdealWitness {
  std::vector<std::optional<double>> radii;  // per stage; absent when f(o) != 0
  bool accepted = false;
};

// Per stage the largest grid radius whose ball the stage vanishes on.
// Accepted when every tail radius exists, clears the threshold, and the
// tail is nondecreasing.
inline IdealWitness ideal_witness(const FunctionSequence& seq, double threshold = 1.0,
                                  std::int64_t tail_start = -1) {
  std::size_t n0 = tail_start < 0 ? seq.default_tail()
                                  : static_cast<std::size_t>(tail_start);
  if (n0 >= seq.stage_count())
    throw std::invalid_argument("ideal_witness: tail start beyond stages");
  const DiscretizedSpace& space = seq.space();
  IdealWitness out;
  for (std::size_t n = 0; n < seq.stage_count(); ++n) {
    std::optional<double> first_live;
    for (std::size_t idx = 0; idx < space.size(); ++idx) {
      if (!seq.in_window(n, idx) || seq.stage(n)[idx] == 0.0) continue;
      double d = space.base_distance(idx);
      if (!first_live || d < *first_live) first_live = d;
    }
    if (!first_live) out.radii.emplace_back(static_cast<double>(seq.window(n)));
    else if (*first_live == 0.0) out.radii.emplace_back(std::nullopt);
    else out.radii.emplace_back(*first_live - (space.integer_metric() ? 1.0 : space.step()));
  }
  out.accepted = true;
  double prev = -1;
  for (std::size_t n = n0; n < seq.stage_count(); ++n) {
    if (!out.radii[n] || *out.radii[n] < threshold || *out.radii[n] < prev) {
      out.accepted = false;
      break;
    }
    prev = *out.radii[n];
  }
  return out;
}

struct CutoffProjection {
  FunctionSequence trimmed;
  std::vector<std::int64_t> levels;  // l(n); 0 means no usable cutoff level
};

// l(n) is the largest k <= n (and within the window) with |g_n| < 1/k on
// B(k); the trimmed stage keeps only the part beyond B(l(n)-1).
inline CutoffProjection cutoff_project(const FunctionSequence& g) {
  const DiscretizedSpace& space = g.space();
  std::vector<std::vector<double>> stages;
  std::vector<std::int64_t> windows;
  std::vector<std::int64_t> levels;
  for (std::size_t n = 0; n < g.stage_count(); ++n) {
    std::int64_t cap = std::min<std::int64_t>(static_cast<std::int64_t>(n), g.window(n));
    std::int64_t level = 0;
    for (std::int64_t k = cap; k >= 1; --k) {
      bool small = true;
      for (std::size_t idx = 0; idx < space.size(); ++idx) {
        if (space.base_distance(idx) > static_cast<double>(k)) continue;
        if (std::abs(g.stage(n)[idx]) < 1.0 / static_cast<double>(k)) continue;
        small = false;
        break;
      }
      if (small) { level = k; break; }
    }
    levels.push_back(level);
    std::vector<double> stage = g.stage(n);
    if (level >= 1) {
      std::vector<double> cut = chi(space, level - 1);
      for (std::size_t idx = 0; idx < stage.size(); ++idx) stage[idx] *= cut[idx];
    }
    stages.push_back(std::move(stage));
    windows.push_back(g.window(n));
  }
  return CutoffProjection{FunctionSequence(space, std::move(stages), std::move(windows)),
                          std::move(levels)};
}

inline double stage_sup_difference(const FunctionSequence& a, const FunctionSequence& b,
                                   std::size_t n) {
  require_same_space(a, b, "stage_sup_difference");
  double sup = 0;
  for (std::size_t idx = 0; idx < a.space().size(); ++idx) {
    if (!a.in_window(n, idx) && !b.in_window(n, idx)) continue;
    sup = std::max(sup, std::abs(a.stage(n)[idx] - b.stage(n)[idx]));
  }
  return sup;
}

// Every stage with a usable level obeys sup|g_n - h_n| <= 1/l(n).
inline bool cutoff_bound_holds(const FunctionSequence& g, const CutoffProjection& p) {
  for (std::size_t n = 0; n < g.stage_count(); ++n) {
    if (p.levels[n] < 1) continue;
    if (stage_sup_difference(g, p.trimmed, n) >
        1.0 / static_cast<double>(p.levels[n]))
      return false;
  }
  return true;
}

// max over tail stages of the sup of |f_n| outside B(r)
inline double corona_seminorm(const FunctionSequence& seq, double r,
                              std::int64_t tail_start) {
  if (tail_start < 0 || static_cast<std::size_t>(tail_start) >= seq.stage_count())
    throw std::invalid_argument("corona_seminorm: tail start out of range");
  const DiscretizedSpace& space = seq.space();
  double out = 0;
  for (std::size_t n = static_cast<std::size_t>(tail_start); n < seq.stage_count(); ++n)
    for (std::size_t idx = 0; idx < space.size(); ++idx) {
      if (!seq.in_window(n, idx)) continue;
      if (space.base_distance(idx) < r) continue;
      out = std::max(out, std::abs(seq.stage(n)[idx]));
    }
  return out;
}

struct TailValue {
  double value = 0;        // last-stage value
  double oscillation = 0;  // spread across the tail at that point
};

inline TailValue tail_value(const FunctionSequence& seq, std::size_t idx,
                            std::int64_t tail_start = -1) {
  std::size_t n0 = tail_start < 0 ? seq.default_tail()
                                  : static_cast<std::size_t>(tail_start);
  if (n0 >= seq.stage_count())
    throw std::invalid_argument("tail_value: tail start beyond stages");
  TailValue out;
  out.value = seq.stage(seq.stage_count() - 1).at(idx);
  for (std::size_t n = n0; n < seq.stage_count(); ++n)
    out.oscillation = std::max(out.oscillation, std::abs(seq.stage(n).at(idx) - out.value));
  return out;
}

}  // namespace treewitness
