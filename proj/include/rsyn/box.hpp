#pragma once

#include <optional>

#include "rsyn/linalg.hpp"
#include "rsyn/rational.hpp"

namespace rsyn {

/// Closed axis-aligned hyperrectangle, the product of [lo[i], hi[i]].
struct Box {
  Vec lo, hi;

  Box() = default;
  Box(Vec lo_, Vec hi_);

  size_t dim() const { return lo.size(); }

  bool contains_point(const Vec& x) const;
  bool contains_box(const Box& b) const;
  bool intersects_box(const Box& b) const;          // closed sets
  bool interior_intersects_box(const Box& b) const; // open overlap on every axis
  std::optional<Box> intersection(const Box& b) const;

  Rat side(size_t axis) const { return hi[axis] - lo[axis]; }
  /// Infinity-norm diameter: the longest side.
  Rat diameter() const;
  Rat volume() const;
  Vec midpoint() const;
  bool degenerate() const; // some side has zero width

  std::vector<Vec> vertices() const; // 2^dim corners

  bool operator==(const Box&) const = default;
};

/// { center + generators·alpha : alpha in [-1,1]^n }. Exact image of a box
/// under an affine map; generators are the matrix columns.
struct Parallelotope {
  Vec center;
  Mat generators; // n x n

  size_t dim() const { return center.size(); }

  /// Tight per-axis interval hull (each bound is attained at a vertex).
  Box bounding_box() const;

  /// The box this set equals when the generators are axis-aligned.
  std::optional<Box> as_box() const;

  std::vector<Vec> vertices() const;
};

/// Exact image { a·x + offset : x in b }.
Parallelotope affine_image(const Box& b, const Mat& a, const Vec& offset);

/// Closed-set intersection test, decided exactly.
bool intersects(const Parallelotope& p, const Box& b);

/// b ⊆ p, decided exactly (vertex containment in the convex carrier).
bool contains(const Parallelotope& p, const Box& b);

/// Point membership in a parallelotope, decided exactly.
bool parallelotope_contains_point(const Parallelotope& p, const Vec& x);

} // namespace rsyn
