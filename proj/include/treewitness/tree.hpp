#pragma once

// Vertex addressing and geometry for the two tree families the workbench
// ships: the integer line and Cayley trees of finitely generated free groups.
// Addresses are the geometry: distances, geodesics and balls are computed
// from them directly, there is no global adjacency store.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace treewitness {

using Integer = boost::multiprecision::cpp_int;

// Freely reduced word over generators 1..rank; negative letters are inverses.
// Text form: 'a'..'z' for generators, 'A'..'Z' for inverses, "e" when empty.
class Word {
 public:
  Word() = default;

  static Word parse(const std::string& text, int rank) {
    Word w;
    if (text == "e" || text.empty()) return w;
    for (char ch : text) {
      int letter = 0;
      if (ch >= 'a' && ch <= 'z') letter = ch - 'a' + 1;
      else if (ch >= 'A' && ch <= 'Z') letter = -(ch - 'A' + 1);
      else throw std::invalid_argument("Word::parse: bad character in '" + text + "'");
      if (std::abs(letter) > rank)
        throw std::invalid_argument("Word::parse: letter out of rank in '" + text + "'");
      w.push_reduced(static_cast<std::int8_t>(letter));
    }
    return w;
  }

  std::size_t length() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  std::int8_t letter(std::size_t i) const { return letters_[i]; }
  const std::vector<std::int8_t>& letters() const { return letters_; }

  void push_reduced(std::int8_t letter) {
    if (letter == 0) throw std::invalid_argument("Word: zero letter");
    if (!letters_.empty() && letters_.back() == -letter) letters_.pop_back();
    else letters_.push_back(letter);
  }

  Word concat(const Word& other) const {
    Word out = *this;
    for (std::int8_t l : other.letters_) out.push_reduced(l);
    return out;
  }

  Word inverse() const {
    Word out;
    out.letters_.reserve(letters_.size());
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it)
      out.letters_.push_back(static_cast<std::int8_t>(-*it));
    return out;
  }

  Word prefix(std::size_t n) const {
    Word out;
    out.letters_.assign(letters_.begin(), letters_.begin() + std::min(n, letters_.size()));
    return out;
  }

  std::size_t common_prefix_length(const Word& other) const {
    std::size_t n = std::min(letters_.size(), other.letters_.size());
    std::size_t i = 0;
    while (i < n && letters_[i] == other.letters_[i]) ++i;
    return i;
  }

  std::string str() const {
    if (letters_.empty()) return "e";
    std::string s;
    s.reserve(letters_.size());
    for (std::int8_t l : letters_)
      s.push_back(l > 0 ? static_cast<char>('a' + l - 1) : static_cast<char>('A' - l - 1));
    return s;
  }

  // Deterministic collation: letter order a < A < b < B < ..., prefixes first.
  friend std::strong_ordering operator<=>(const Word& x, const Word& y) {
    std::size_t n = std::min(x.letters_.size(), y.letters_.size());
    for (std::size_t i = 0; i < n; ++i) {
      int kx = letter_key(x.letters_[i]), ky = letter_key(y.letters_[i]);
      if (kx != ky) return kx <=> ky;
    }
    return x.letters_.size() <=> y.letters_.size();
  }
  friend bool operator==(const Word& x, const Word& y) { return x.letters_ == y.letters_; }

 private:
  static int letter_key(std::int8_t l) { return l > 0 ? 2 * l : -2 * l + 1; }

  std::vector<std::int8_t> letters_;
};

struct LinePoint {
  std::int64_t pos = 0;
  auto operator<=>(const LinePoint&) const = default;
};

using Vertex = std::variant<LinePoint, Word>;

inline std::string vertex_str(const Vertex& v) {
  if (std::holds_alternative<LinePoint>(v))
    return std::to_string(std::get<LinePoint>(v).pos);
  return std::get<Word>(v).str();
}

enum class TreeKind { integer_line, free_cayley };

class TreeGeometry {
 public:
  static TreeGeometry integer_line() { return TreeGeometry(TreeKind::integer_line, 0); }
  static TreeGeometry free_cayley(int rank) {
    if (rank < 1 || rank > 26)
      throw std::invalid_argument("TreeGeometry: rank must be in 1..26");
    return TreeGeometry(TreeKind::free_cayley, rank);
  }

  TreeKind kind() const { return kind_; }
  int rank() const { return rank_; }
  int degree() const { return kind_ == TreeKind::integer_line ? 2 : 2 * rank_; }

  Vertex basepoint() const {
    if (kind_ == TreeKind::integer_line) return LinePoint{0};
    return Word();
  }

  void check_vertex(const Vertex& v) const {
    if (kind_ == TreeKind::integer_line) {
      if (!std::holds_alternative<LinePoint>(v))
        throw std::invalid_argument("TreeGeometry: word vertex on the integer line");
      return;
    }
    if (!std::holds_alternative<Word>(v))
      throw std::invalid_argument("TreeGeometry: line vertex in a Cayley tree");
    for (std::int8_t l : std::get<Word>(v).letters())
      if (std::abs(l) > rank_)
        throw std::invalid_argument("TreeGeometry: vertex letter exceeds rank");
  }

  Vertex parse_vertex(const std::string& text) const {
    if (kind_ == TreeKind::integer_line) return LinePoint{std::stoll(text)};
    return Word::parse(text, rank_);
  }

  std::int64_t distance(const Vertex& u, const Vertex& v) const {
    check_vertex(u);
    check_vertex(v);
    if (kind_ == TreeKind::integer_line) {
      std::int64_t a = std::get<LinePoint>(u).pos, b = std::get<LinePoint>(v).pos;
      return a < b ? b - a : a - b;
    }
    const Word& x = std::get<Word>(u);
    const Word& y = std::get<Word>(v);
    std::size_t p = x.common_prefix_length(y);
    return static_cast<std::int64_t>(x.length() + y.length() - 2 * p);
  }

  std::vector<Vertex> geodesic(const Vertex& u, const Vertex& v) const {
    check_vertex(u);
    check_vertex(v);
    std::vector<Vertex> path;
    if (kind_ == TreeKind::integer_line) {
      std::int64_t a = std::get<LinePoint>(u).pos, b = std::get<LinePoint>(v).pos;
      std::int64_t step = a <= b ? 1 : -1;
      for (std::int64_t p = a;; p += step) {
        path.push_back(LinePoint{p});
        if (p == b) break;
      }
      return path;
    }
    const Word& x = std::get<Word>(u);
    const Word& y = std::get<Word>(v);
    std::size_t p = x.common_prefix_length(y);
    for (std::size_t n = x.length(); n > p; --n) path.push_back(x.prefix(n));
    for (std::size_t n = p; n <= y.length(); ++n) path.push_back(y.prefix(n));
    return path;
  }

  bool on_geodesic(const Vertex& mid, const Vertex& u, const Vertex& v) const {
    return distance(u, mid) + distance(mid, v) == distance(u, v);
  }

  Vertex median(const Vertex& u, const Vertex& v, const Vertex& w) const {
    std::int64_t a = (distance(u, v) + distance(u, w) - distance(v, w)) / 2;
    std::vector<Vertex> path = geodesic(u, v);
    return path[static_cast<std::size_t>(a)];
  }

  Integer sphere_size(std::int64_t r) const {
    if (r < 0) return 0;
    if (r == 0) return 1;
    if (degree() == 2) return 2;
    Integer branching = degree() - 1;
    return Integer(degree()) * boost::multiprecision::pow(branching, static_cast<unsigned>(r - 1));
  }

  Integer ball_size(std::int64_t r) const {
    Integer total = 0;
    if (degree() == 2) return r < 0 ? Integer(0) : Integer(2 * r + 1);
    for (std::int64_t s = 0; s <= r; ++s) total += sphere_size(s);
    return total;
  }

  // Sorted enumeration.  Guarded: callers must stay within windows that are
  // actually materializable.
  std::vector<Vertex> ball(const Vertex& center, std::int64_t r) const {
    check_vertex(center);
    if (r < 0) return {};
    if (ball_size(r) > Integer(enumeration_cap()))
      throw std::length_error("TreeGeometry::ball: window of " + ball_size(r).str() +
                              " vertices exceeds the enumeration cap");
    std::vector<Vertex> out;
    if (kind_ == TreeKind::integer_line) {
      std::int64_t c = std::get<LinePoint>(center).pos;
      out.reserve(static_cast<std::size_t>(2 * r + 1));
      for (std::int64_t p = c - r; p <= c + r; ++p) out.push_back(LinePoint{p});
      return out;
    }
    const Word& c = std::get<Word>(center);
    out.reserve(static_cast<std::size_t>(ball_size(r)));
    Word offset;
    grow(c, offset, r, out);
    std::sort(out.begin(), out.end());
    return out;
  }

  static constexpr std::int64_t enumeration_cap() { return 4'000'000; }

 private:
  TreeGeometry(TreeKind kind, int rank) : kind_(kind), rank_(rank) {}

  // Depth-first over reduced offsets w, emitting center*w.  Distinct reduced
  // offsets give distinct vertices at distance |w| from the center.
  void grow(const Word& center, Word& offset, std::int64_t budget,
            std::vector<Vertex>& out) const {
    out.push_back(center.concat(offset));
    if (budget == 0) return;
    std::int8_t last = offset.empty() ? 0 : offset.letter(offset.length() - 1);
    for (int g = 1; g <= rank_; ++g) {
      for (std::int8_t l : {static_cast<std::int8_t>(g), static_cast<std::int8_t>(-g)}) {
        if (last == -l) continue;
        Word next = offset;
        next.push_reduced(l);
        grow(center, next, budget - 1, out);
        // recursion depth is the radius, fine for enumerable windows
      }
    }
  }

  TreeKind kind_;
  int rank_;
};

}  // namespace treewitness
