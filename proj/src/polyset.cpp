#include "rsyn/polyset.hpp"

#include <algorithm>
#include <stdexcept>

namespace rsyn {

IneqSystem hpoly_from_box(const Box& b) {
  size_t n = b.dim();
  IneqSystem sys;
  for (size_t i = 0; i < n; ++i) {
    Vec row(n, Rat(0)), neg(n, Rat(0));
    row[i] = 1;
    neg[i] = -1;
    sys.push_row(std::move(row), Rat(b.hi[i]));
    sys.push_row(std::move(neg), Rat(-b.lo[i]));
  }
  return sys;
}

std::optional<IneqSystem> hpoly_from_parallelotope(const Parallelotope& p) {
  auto inv = mat_inverse(p.generators);
  if (!inv) return std::nullopt;
  size_t n = p.dim();
  IneqSystem sys;
  for (size_t i = 0; i < n; ++i) {
    // -1 <= inv_i·(x - c) <= 1
    Rat ic(0);
    for (size_t j = 0; j < n; ++j) ic += (*inv)[i][j] * p.center[j];
    Vec row = (*inv)[i];
    Vec neg(n);
    for (size_t j = 0; j < n; ++j) neg[j] = -row[j];
    sys.push_row(std::move(row), Rat(1 + ic));
    sys.push_row(std::move(neg), Rat(1 - ic));
  }
  return sys;
}

namespace {

// Substitutes fixed coordinates into a constraint system, keeping only the
// columns listed in free_axes. Returns nullopt when a constraint becomes
// identically false (the polytope misses the substituted plane entirely).
std::optional<IneqSystem> substitute(const IneqSystem& sys,
                                     const std::vector<size_t>& free_axes,
                                     const Vec& point) {
  IneqSystem out;
  for (size_t r = 0; r < sys.rows(); ++r) {
    Rat rhs = sys.b[r];
    Vec row;
    row.reserve(free_axes.size());
    std::vector<bool> is_free(sys.a[r].size(), false);
    for (size_t ax : free_axes) is_free[ax] = true;
    bool all_zero = true;
    for (size_t j = 0; j < sys.a[r].size(); ++j) {
      if (is_free[j]) continue;
      rhs -= sys.a[r][j] * point[j];
    }
    for (size_t ax : free_axes) {
      row.push_back(sys.a[r][ax]);
      if (sys.a[r][ax] != 0) all_zero = false;
    }
    if (all_zero) {
      if (rhs < 0) return std::nullopt;
      continue;
    }
    out.push_row(std::move(row), std::move(rhs));
  }
  // an empty system means the piece covers the whole substituted plane
  return out;
}

IneqSystem conjoin(const IneqSystem& a, const IneqSystem& b, size_t upto_row,
                   bool flip_row) {
  IneqSystem out = a;
  for (size_t r = 0; r < upto_row; ++r) out.push_row(b.a[r], b.b[r]);
  if (flip_row) {
    Vec neg(b.a[upto_row].size());
    for (size_t j = 0; j < neg.size(); ++j) neg[j] = -b.a[upto_row][j];
    out.push_row(std::move(neg), Rat(-b.b[upto_row]));
  }
  return out;
}

} // namespace

bool box_subset_of_union(const Box& q, const std::vector<Parallelotope>& pieces) {
  size_t n = q.dim();
  std::vector<size_t> free_axes;
  for (size_t i = 0; i < n; ++i)
    if (q.lo[i] < q.hi[i]) free_axes.push_back(i);

  if (free_axes.empty()) {
    // q is a single point
    Vec pt = q.lo;
    for (const auto& p : pieces)
      if (parallelotope_contains_point(p, pt)) return true;
    return false;
  }

  Vec fixed_point = q.lo; // only the fixed coordinates are read
  Box reduced = [&] {
    Vec lo, hi;
    for (size_t ax : free_axes) {
      lo.push_back(q.lo[ax]);
      hi.push_back(q.hi[ax]);
    }
    return Box(std::move(lo), std::move(hi));
  }();

  std::vector<IneqSystem> cover;
  for (const auto& p : pieces) {
    auto h = hpoly_from_parallelotope(p);
    if (!h) continue; // lower-dimensional, cannot cover volume
    auto sub = substitute(*h, free_axes, fixed_point);
    if (!sub) continue;
    cover.push_back(std::move(*sub));
  }

  // peel each covering polytope off the remaining regions; q is covered iff
  // nothing full-dimensional survives
  std::vector<IneqSystem> regions{hpoly_from_box(reduced)};
  for (const auto& piece : cover) {
    std::vector<IneqSystem> next;
    for (const auto& region : regions) {
      IneqSystem overlap = region;
      for (size_t r = 0; r < piece.rows(); ++r) overlap.push_row(piece.a[r], piece.b[r]);
      if (!lp_feasible(overlap)) {
        next.push_back(region);
        continue;
      }
      for (size_t r = 0; r < piece.rows(); ++r) {
        IneqSystem part = conjoin(region, piece, r, true);
        if (lp_strictly_feasible(part)) next.push_back(std::move(part));
      }
    }
    regions = std::move(next);
    if (regions.empty()) return true;
  }
  for (const auto& region : regions)
    if (lp_strictly_feasible(region)) return false;
  return true;
}

bool box_covered_by_union(const Box& target, const std::vector<Box>& members) {
  size_t n = target.dim();
  std::vector<Box> clipped;
  for (const auto& m : members) {
    if (m.dim() != n)
      throw std::invalid_argument("box_covered_by_union: dimension mismatch");
    if (auto c = target.intersection(m)) clipped.push_back(std::move(*c));
  }
  if (clipped.empty()) return false;
  if (clipped.size() == 1) return clipped[0] == target;

  std::vector<std::vector<Rat>> cuts(n);
  for (size_t i = 0; i < n; ++i) {
    cuts[i].push_back(target.lo[i]);
    cuts[i].push_back(target.hi[i]);
    for (const auto& c : clipped) {
      cuts[i].push_back(c.lo[i]);
      cuts[i].push_back(c.hi[i]);
    }
    std::sort(cuts[i].begin(), cuts[i].end());
    cuts[i].erase(std::unique(cuts[i].begin(), cuts[i].end()), cuts[i].end());
  }

  // enumerate the grid of sub-boxes induced by the cuts
  std::vector<size_t> steps(n);
  size_t total = 1;
  for (size_t i = 0; i < n; ++i) {
    steps[i] = cuts[i].size() > 1 ? cuts[i].size() - 1 : 1;
    total *= steps[i];
  }
  for (size_t idx = 0; idx < total; ++idx) {
    size_t rem = idx;
    Vec lo(n), hi(n);
    for (size_t i = 0; i < n; ++i) {
      size_t k = rem % steps[i];
      rem /= steps[i];
      if (cuts[i].size() == 1) {
        lo[i] = cuts[i][0];
        hi[i] = cuts[i][0];
      } else {
        lo[i] = cuts[i][k];
        hi[i] = cuts[i][k + 1];
      }
    }
    Box sub(std::move(lo), std::move(hi));
    bool covered = false;
    for (const auto& c : clipped)
      if (c.contains_box(sub)) { covered = true; break; }
    if (!covered) return false;
  }
  return true;
}

bool union_subset(const std::vector<Box>& as, const std::vector<Box>& bs) {
  for (const auto& a : as)
    if (!box_covered_by_union(a, bs)) return false;
  return true;
}

} // namespace rsyn
