#pragma once

// Finite-stage model of compactly supported functions from the group into
// bounded functions on the tree.  A ModuleElement assigns a WindowFunction
// (finitely supported values on a shared finite window) to finitely many
// group elements.  Convolution, involution, the B-valued inner product and
// translation are computed exactly.
//
// Window policy: values at vertices outside the window count as zero.  Every
// operation that moves values records whether a nonzero value was pushed
// across the window boundary and truncated; the result's window_clean flag
// reports it.  Computations meant to be exact must choose windows large
// enough to stay clean, and tests assert the flag.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "group.hpp"
#include "scalar.hpp"
#include "tree.hpp"

namespace treewitness {

class Window {
 public:
  Window(const TreeGeometry& geometry, std::vector<Vertex> vertices) {
    auto data = std::make_shared<Data>(Data{geometry, std::move(vertices)});
    for (const Vertex& v : data->vertices) geometry.check_vertex(v);
    std::sort(data->vertices.begin(), data->vertices.end());
    data->vertices.erase(std::unique(data->vertices.begin(), data->vertices.end()),
                         data->vertices.end());
    data_ = std::move(data);
  }

  static Window ball(const TreeGeometry& geometry, std::int64_t r) {
    return Window(geometry, geometry.ball(geometry.basepoint(), r));
  }

  // Union of same-radius balls around several centers; the usual defect
  // window is balls(tree, 2n, {o, g1*o}).
  static Window balls(const TreeGeometry& geometry, std::int64_t r,
                      const std::vector<Vertex>& centers) {
    std::vector<Vertex> all;
    for (const Vertex& c : centers) {
      auto b = geometry.ball(c, r);
      all.insert(all.end(), b.begin(), b.end());
    }
    return Window(geometry, std::move(all));
  }

  const TreeGeometry& geometry() const { return data_->geometry; }
  const std::vector<Vertex>& vertices() const { return data_->vertices; }
  std::size_t size() const { return data_->vertices.size(); }

  bool contains(const Vertex& v) const {
    return std::binary_search(data_->vertices.begin(), data_->vertices.end(), v);
  }

  friend bool operator==(const Window& a, const Window& b) {
    return a.data_ == b.data_ || a.data_->vertices == b.data_->vertices;
  }
  friend bool operator!=(const Window& a, const Window& b) { return !(a == b); }

 private:
  struct Data {
    TreeGeometry geometry;
    std::vector<Vertex> vertices;
  };
  std::shared_ptr<const Data> data_;
};

inline void require_same_window(const Window& a, const Window& b, const char* op) {
  if (a != b) throw std::invalid_argument(std::string(op) + ": window mismatch");
}

class WindowFunction {
 public:
  explicit WindowFunction(Window window) : window_(std::move(window)) {}

  static WindowFunction constant_one(const Window& w) {
    WindowFunction f(w);
    for (const Vertex& v : w.vertices()) f.values_[v] = AlgebraicReal(1);
    return f;
  }

  static WindowFunction point(const Window& w, const Vertex& v, const AlgebraicReal& c) {
    WindowFunction f(w);
    f.set(v, c);
    return f;
  }

  const Window& window() const { return window_; }
  bool window_clean() const { return window_clean_; }
  void mark_truncated() { window_clean_ = false; }
  bool is_zero() const { return values_.empty(); }
  std::size_t support_size() const { return values_.size(); }
  const std::map<Vertex, AlgebraicReal>& entries() const { return values_; }

  void set(const Vertex& v, const AlgebraicReal& c) {
    if (!window_.contains(v))
      throw std::invalid_argument("WindowFunction::set: vertex outside window");
    if (c.is_zero()) values_.erase(v);
    else values_[v] = c;
  }

  // Out-of-window evaluations count as zero by policy.
  AlgebraicReal at(const Vertex& v) const {
    auto it = values_.find(v);
    return it == values_.end() ? AlgebraicReal() : it->second;
  }

  friend WindowFunction operator+(const WindowFunction& a, const WindowFunction& b) {
    require_same_window(a.window_, b.window_, "WindowFunction::operator+");
    WindowFunction out = a;
    out.window_clean_ = a.window_clean_ && b.window_clean_;
    for (const auto& [v, c] : b.values_) out.add(v, c);
    return out;
  }

  friend WindowFunction operator-(const WindowFunction& a, const WindowFunction& b) {
    require_same_window(a.window_, b.window_, "WindowFunction::operator-");
    WindowFunction out = a;
    out.window_clean_ = a.window_clean_ && b.window_clean_;
    for (const auto& [v, c] : b.values_) out.add(v, -c);
    return out;
  }

  WindowFunction operator-() const {
    WindowFunction out(window_);
    out.window_clean_ = window_clean_;
    for (const auto& [v, c] : values_) out.values_[v] = -c;
    return out;
  }

  // pointwise product
  friend WindowFunction operator*(const WindowFunction& a, const WindowFunction& b) {
    require_same_window(a.window_, b.window_, "WindowFunction::operator*");
    WindowFunction out(a.window_);
    out.window_clean_ = a.window_clean_ && b.window_clean_;
    const auto& small = a.values_.size() <= b.values_.size() ? a : b;
    const auto& large = a.values_.size() <= b.values_.size() ? b : a;
    for (const auto& [v, c] : small.values_) {
      auto it = large.values_.find(v);
      if (it == large.values_.end()) continue;
      AlgebraicReal p = c * it->second;
      if (!p.is_zero()) out.values_[v] = p;
    }
    return out;
  }

  friend WindowFunction operator*(const AlgebraicReal& c, const WindowFunction& a) {
    WindowFunction out(a.window_);
    out.window_clean_ = a.window_clean_;
    if (c.is_zero()) return out;
    for (const auto& [v, q] : a.values_) out.values_[v] = c * q;
    return out;
  }

  AlgebraicReal sup_norm() const {
    AlgebraicReal best;
    for (const auto& [v, c] : values_) {
      AlgebraicReal a = abs(c);
      if (compare(a, best) > 0) best = a;
    }
    return best;
  }

  friend bool operator==(const WindowFunction& a, const WindowFunction& b) {
    return a.window_ == b.window_ && a.values_ == b.values_;
  }
  friend bool operator!=(const WindowFunction& a, const WindowFunction& b) {
    return !(a == b);
  }

 private:
  void add(const Vertex& v, const AlgebraicReal& c) {
    auto it = values_.find(v);
    if (it == values_.end()) {
      if (!c.is_zero()) values_[v] = c;
      return;
    }
    it->second += c;
    if (it->second.is_zero()) values_.erase(it);
  }

  Window window_;
  std::map<Vertex, AlgebraicReal> values_;
  bool window_clean_ = true;

  friend WindowFunction translate(const GroupAction&, const GroupElement&,
                                  const WindowFunction&);
};

// (g . b)(x) = b(g^-1 x), realized by pushing stored values forward through
// g.  A nonzero value whose image leaves the window is dropped and the
// result is marked unclean.
inline WindowFunction translate(const GroupAction& action, const GroupElement& g,
                                const WindowFunction& b) {
  WindowFunction out(b.window());
  out.window_clean_ = b.window_clean();
  for (const auto& [v, c] : b.entries()) {
    Vertex w = action.apply(g, v);
    if (out.window().contains(w)) out.values_[w] = c;
    else out.window_clean_ = false;
  }
  return out;
}

// indicator of the radius-r ball around the basepoint, within the window
inline WindowFunction ball_indicator(const Window& w, std::int64_t r) {
  WindowFunction f(w);
  const TreeGeometry& t = w.geometry();
  Vertex o = t.basepoint();
  for (const Vertex& v : w.vertices())
    if (t.distance(o, v) <= r) f.set(v, AlgebraicReal(1));
  return f;
}

class ModuleElement {
 public:
  explicit ModuleElement(Window window) : window_(std::move(window)) {}

  static ModuleElement delta(const Window& w, const GroupElement& g,
                             const WindowFunction& b) {
    ModuleElement f(w);
    f.set(g, b);
    return f;
  }

  const Window& window() const { return window_; }
  const std::map<GroupElement, WindowFunction>& entries() const { return support_; }
  std::size_t support_size() const { return support_.size(); }
  bool is_zero() const { return support_.empty(); }

  bool window_clean() const {
    if (!window_clean_) return false;
    for (const auto& [g, b] : support_)
      if (!b.window_clean()) return false;
    return true;
  }

  void set(const GroupElement& g, const WindowFunction& b) {
    require_same_window(window_, b.window(), "ModuleElement::set");
    if (b.is_zero() && b.window_clean()) { support_.erase(g); return; }
    support_.insert_or_assign(g, b);
  }

  WindowFunction at(const GroupElement& g) const {
    auto it = support_.find(g);
    return it == support_.end() ? WindowFunction(window_) : it->second;
  }

  friend ModuleElement operator+(const ModuleElement& a, const ModuleElement& b) {
    require_same_window(a.window_, b.window_, "ModuleElement::operator+");
    ModuleElement out = a;
    for (const auto& [g, f] : b.support_) out.add(g, f);
    return out;
  }

  friend ModuleElement operator-(const ModuleElement& a, const ModuleElement& b) {
    require_same_window(a.window_, b.window_, "ModuleElement::operator-");
    ModuleElement out = a;
    for (const auto& [g, f] : b.support_) out.add(g, -f);
    return out;
  }

  friend bool operator==(const ModuleElement& a, const ModuleElement& b) {
    if (a.window_ != b.window_) return false;
    auto ai = a.support_.begin();
    auto bi = b.support_.begin();
    while (ai != a.support_.end() && bi != b.support_.end()) {
      if (ai->first != bi->first || ai->second != bi->second) return false;
      ++ai; ++bi;
    }
    return ai == a.support_.end() && bi == b.support_.end();
  }
  friend bool operator!=(const ModuleElement& a, const ModuleElement& b) {
    return !(a == b);
  }

 private:
  void add(const GroupElement& g, const WindowFunction& b) {
    auto it = support_.find(g);
    if (it == support_.end()) {
      if (!b.is_zero() || !b.window_clean()) support_.emplace(g, b);
      return;
    }
    WindowFunction s = it->second + b;
    if (s.is_zero() && s.window_clean()) support_.erase(it);
    else it->second = s;
  }

  Window window_;
  std::map<GroupElement, WindowFunction> support_;
  bool window_clean_ = true;

  friend ModuleElement convolve(const GroupAction&, const ModuleElement&,
                                const ModuleElement&);
  friend ModuleElement involution(const GroupAction&, const ModuleElement&);
  friend ModuleElement group_translate(const GroupAction&, const GroupElement&,
                                       const ModuleElement&);
};

// (f * g)(c) = sum over a*b = c of f(a) . (a . g(b))
inline ModuleElement convolve(const GroupAction& action, const ModuleElement& f,
                              const ModuleElement& g) {
  require_same_window(f.window(), g.window(), "convolve");
  ModuleElement out(f.window());
  for (const auto& [a, fa] : f.entries()) {
    for (const auto& [b, gb] : g.entries()) {
      GroupElement c = action.compose(a, b);
      WindowFunction term = fa * translate(action, a, gb);
      out.add(c, term);
    }
  }
  return out;
}

// f*(c) = c . conj(f(c^-1)); scalars are real, conjugation is identity
inline ModuleElement involution(const GroupAction& action, const ModuleElement& f) {
  ModuleElement out(f.window());
  for (const auto& [g, b] : f.entries()) {
    GroupElement gi = action.inverse(g);
    out.add(gi, translate(action, gi, b));
  }
  return out;
}

// <f, g> = sum over c of conj(f(c)) g(c), a window function
inline WindowFunction inner(const ModuleElement& f, const ModuleElement& g) {
  require_same_window(f.window(), g.window(), "inner");
  WindowFunction out(f.window());
  auto fi = f.entries().begin();
  auto gi = g.entries().begin();
  while (fi != f.entries().end() && gi != g.entries().end()) {
    if (fi->first < gi->first) { ++fi; continue; }
    if (gi->first < fi->first) { ++gi; continue; }
    out = out + fi->second * gi->second;
    ++fi; ++gi;
  }
  return out;
}

// value-wise action: (c . f)(a) = c . (f(a))
inline ModuleElement group_translate(const GroupAction& action, const GroupElement& c,
                                     const ModuleElement& f) {
  ModuleElement out(f.window());
  for (const auto& [g, b] : f.entries()) out.add(g, translate(action, c, b));
  return out;
}

inline AlgebraicReal module_norm_sq(const ModuleElement& f) {
  return inner(f, f).sup_norm();
}

struct NormResult {
  AlgebraicReal norm_sq;
  std::optional<AlgebraicReal> exact;  // set when a closed-form ring root is found
  FloatEnclosure approx;
};

inline NormResult module_norm(const ModuleElement& f) {
  NormResult out;
  out.norm_sq = module_norm_sq(f);
  out.exact = exact_sqrt(out.norm_sq);
  out.approx = sqrt_enclosure(out.norm_sq);
  return out;
}

}  // namespace treewitness
