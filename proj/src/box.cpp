#include "rsyn/box.hpp"

#include <stdexcept>

#include "rsyn/lp.hpp"

namespace rsyn {

Box::Box(Vec lo_, Vec hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size() || lo.empty())
    throw std::invalid_argument("Box: bound vectors must match and be nonempty");
  for (size_t i = 0; i < lo.size(); ++i)
    if (lo[i] > hi[i])
      throw std::invalid_argument("Box: lo > hi on axis " + std::to_string(i));
}

bool Box::contains_point(const Vec& x) const {
  if (x.size() != dim()) throw std::invalid_argument("Box: dimension mismatch");
  for (size_t i = 0; i < dim(); ++i)
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  return true;
}

bool Box::contains_box(const Box& b) const {
  if (b.dim() != dim()) throw std::invalid_argument("Box: dimension mismatch");
  for (size_t i = 0; i < dim(); ++i)
    if (b.lo[i] < lo[i] || b.hi[i] > hi[i]) return false;
  return true;
}

bool Box::intersects_box(const Box& b) const {
  if (b.dim() != dim()) throw std::invalid_argument("Box: dimension mismatch");
  for (size_t i = 0; i < dim(); ++i)
    if (b.hi[i] < lo[i] || b.lo[i] > hi[i]) return false;
  return true;
}

bool Box::interior_intersects_box(const Box& b) const {
  if (b.dim() != dim()) throw std::invalid_argument("Box: dimension mismatch");
  for (size_t i = 0; i < dim(); ++i)
    if (b.hi[i] <= lo[i] || b.lo[i] >= hi[i]) return false;
  return true;
}

std::optional<Box> Box::intersection(const Box& b) const {
  if (!intersects_box(b)) return std::nullopt;
  Vec l(dim()), h(dim());
  for (size_t i = 0; i < dim(); ++i) {
    l[i] = std::max(lo[i], b.lo[i]);
    h[i] = std::min(hi[i], b.hi[i]);
  }
  return Box(std::move(l), std::move(h));
}

Rat Box::diameter() const {
  Rat d(0);
  for (size_t i = 0; i < dim(); ++i) d = std::max(d, side(i));
  return d;
}

Rat Box::volume() const {
  Rat v(1);
  for (size_t i = 0; i < dim(); ++i) v *= side(i);
  return v;
}

Vec Box::midpoint() const {
  Vec m(dim());
  for (size_t i = 0; i < dim(); ++i) m[i] = (lo[i] + hi[i]) / 2;
  return m;
}

bool Box::degenerate() const {
  for (size_t i = 0; i < dim(); ++i)
    if (lo[i] == hi[i]) return true;
  return false;
}

std::vector<Vec> Box::vertices() const {
  size_t n = dim();
  std::vector<Vec> out;
  out.reserve(size_t(1) << n);
  for (size_t mask = 0; mask < (size_t(1) << n); ++mask) {
    Vec v(n);
    for (size_t i = 0; i < n; ++i) v[i] = (mask >> i) & 1 ? hi[i] : lo[i];
    out.push_back(std::move(v));
  }
  return out;
}

Box Parallelotope::bounding_box() const {
  size_t n = dim();
  Vec l(n), h(n);
  for (size_t i = 0; i < n; ++i) {
    Rat spread(0);
    for (size_t j = 0; j < n; ++j) spread += rat_abs(generators[i][j]);
    l[i] = center[i] - spread;
    h[i] = center[i] + spread;
  }
  return Box(std::move(l), std::move(h));
}

std::optional<Box> Parallelotope::as_box() const {
  size_t n = dim();
  // axis-aligned iff every row and every column has at most one nonzero
  for (size_t i = 0; i < n; ++i) {
    size_t nz = 0;
    for (size_t j = 0; j < n; ++j)
      if (generators[i][j] != 0) ++nz;
    if (nz > 1) return std::nullopt;
  }
  for (size_t j = 0; j < n; ++j) {
    size_t nz = 0;
    for (size_t i = 0; i < n; ++i)
      if (generators[i][j] != 0) ++nz;
    if (nz > 1) return std::nullopt;
  }
  return bounding_box();
}

std::vector<Vec> Parallelotope::vertices() const {
  size_t n = dim();
  std::vector<Vec> out;
  out.reserve(size_t(1) << n);
  for (size_t mask = 0; mask < (size_t(1) << n); ++mask) {
    Vec v = center;
    for (size_t j = 0; j < n; ++j) {
      Rat s((mask >> j) & 1 ? 1 : -1);
      for (size_t i = 0; i < n; ++i) v[i] += s * generators[i][j];
    }
    out.push_back(std::move(v));
  }
  return out;
}

Parallelotope affine_image(const Box& b, const Mat& a, const Vec& offset) {
  size_t n = b.dim();
  if (a.size() != n || offset.size() != n || !is_square(a))
    throw std::invalid_argument("affine_image: dimension mismatch");
  Vec mid = b.midpoint();
  Parallelotope p;
  p.center = vec_add(mat_vec(a, mid), offset);
  p.generators = zero_matrix(n, n);
  for (size_t j = 0; j < n; ++j) {
    Rat half = b.side(j) / 2;
    for (size_t i = 0; i < n; ++i) p.generators[i][j] = a[i][j] * half;
  }
  return p;
}

namespace {

// alpha-space constraint system for p ∩ b:  -1 <= alpha <= 1  and
// lo - c <= G·alpha <= hi - c.
IneqSystem intersection_system(const Parallelotope& p, const Box& b) {
  size_t n = p.dim();
  IneqSystem sys;
  for (size_t i = 0; i < n; ++i) {
    Vec row(n, Rat(0)), neg(n, Rat(0));
    row[i] = 1;
    neg[i] = -1;
    sys.push_row(std::move(row), Rat(1));
    sys.push_row(std::move(neg), Rat(1));
  }
  for (size_t i = 0; i < n; ++i) {
    Vec row = p.generators[i];
    Vec neg(n);
    for (size_t j = 0; j < n; ++j) neg[j] = -row[j];
    sys.push_row(std::move(row), Rat(b.hi[i] - p.center[i]));
    sys.push_row(std::move(neg), Rat(p.center[i] - b.lo[i]));
  }
  return sys;
}

std::optional<Vec> solve_alpha(const Mat& inv, const Vec& center, const Vec& x) {
  return mat_vec(inv, vec_sub(x, center));
}

bool alpha_in_unit_cube(const Vec& alpha) {
  for (const Rat& a : alpha)
    if (a < -1 || a > 1) return false;
  return true;
}

} // namespace

bool parallelotope_contains_point(const Parallelotope& p, const Vec& x) {
  if (x.size() != p.dim())
    throw std::invalid_argument("parallelotope_contains_point: dimension mismatch");
  if (auto inv = mat_inverse(p.generators)) {
    auto alpha = solve_alpha(*inv, p.center, x);
    return alpha_in_unit_cube(*alpha);
  }
  size_t n = p.dim();
  IneqSystem sys;
  for (size_t i = 0; i < n; ++i) {
    Vec row(n, Rat(0)), neg(n, Rat(0));
    row[i] = 1;
    neg[i] = -1;
    sys.push_row(std::move(row), Rat(1));
    sys.push_row(std::move(neg), Rat(1));
  }
  for (size_t i = 0; i < n; ++i)
    sys.push_eq(p.generators[i], Rat(x[i] - p.center[i]));
  return lp_feasible(sys);
}

bool intersects(const Parallelotope& p, const Box& b) {
  if (p.dim() != b.dim())
    throw std::invalid_argument("intersects: dimension mismatch");
  Box bbox = p.bounding_box();
  if (!bbox.intersects_box(b)) return false;
  if (b.contains_box(bbox)) return true; // p ⊆ bbox ⊆ b
  if (p.as_box()) return true;           // p equals bbox, already known to meet b

  // cheap witnesses before falling back to the LP
  for (const Vec& v : p.vertices())
    if (b.contains_point(v)) return true;

  if (auto inv = mat_inverse(p.generators)) {
    // interval hull of b in alpha coordinates; separating-axis test on the
    // parallelotope frame (complete together with the box frame when n <= 2)
    size_t n = p.dim();
    Vec alo(n, Rat(0)), ahi(n, Rat(0));
    for (size_t i = 0; i < n; ++i) {
      Rat acc_lo(0), acc_hi(0);
      for (size_t j = 0; j < n; ++j) {
        const Rat& g = (*inv)[i][j];
        Rat a = g * (b.lo[j] - p.center[j]);
        Rat c = g * (b.hi[j] - p.center[j]);
        acc_lo += std::min(a, c);
        acc_hi += std::max(a, c);
      }
      if (acc_hi < -1 || acc_lo > 1) return false;
      alo[i] = acc_lo;
      ahi[i] = acc_hi;
    }
    bool inside = true;
    for (size_t i = 0; i < n; ++i)
      if (alo[i] < -1 || ahi[i] > 1) { inside = false; break; }
    if (inside) return true; // b ⊆ p
    if (p.dim() <= 2) return true;
  }
  return lp_feasible(intersection_system(p, b));
}

bool contains(const Parallelotope& p, const Box& b) {
  if (p.dim() != b.dim())
    throw std::invalid_argument("contains: dimension mismatch");
  if (!p.bounding_box().contains_box(b)) return false;
  if (auto pb = p.as_box()) return pb->contains_box(b);

  std::optional<Mat> inv = mat_inverse(p.generators);
  for (const Vec& w : b.vertices()) {
    if (inv) {
      auto alpha = solve_alpha(*inv, p.center, w);
      if (!alpha_in_unit_cube(*alpha)) return false;
    } else if (!parallelotope_contains_point(p, w)) {
      return false;
    }
  }
  return true;
}

} // namespace rsyn
