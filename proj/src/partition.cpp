#include "rsyn/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rsyn/polyset.hpp"

namespace rsyn {

namespace {

double double_below(const Rat& q) {
  double d = rat_to_double(q);
  return std::nextafter(std::nextafter(d, -HUGE_VAL), -HUGE_VAL);
}

double double_above(const Rat& q) {
  double d = rat_to_double(q);
  return std::nextafter(std::nextafter(d, HUGE_VAL), HUGE_VAL);
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t h) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

} // namespace

Partition::Partition(Box domain, std::vector<Box> cells) : domain_(std::move(domain)) {
  if (cells.empty()) throw std::invalid_argument("Partition: no cells");
  boxes_ = std::move(cells);
  live_.assign(boxes_.size(), true);
  parent_.assign(boxes_.size(), kOutCell);
  for (const auto& b : boxes_) {
    if (b.dim() != domain_.dim())
      throw std::invalid_argument("Partition: cell dimension mismatch");
    if (!domain_.contains_box(b))
      throw std::invalid_argument("Partition: cell outside domain");
  }
  rebuild_cache();
  validate_cover();
}

Partition::Partition(unchecked_tag, Box domain, std::vector<Box> boxes,
                     std::vector<bool> live, std::vector<CellId> parent)
    : domain_(std::move(domain)),
      boxes_(std::move(boxes)),
      live_(std::move(live)),
      parent_(std::move(parent)) {
  rebuild_cache();
}

Partition Partition::from_lineage(Box domain, std::vector<Box> boxes,
                                  std::vector<bool> live, std::vector<CellId> parent) {
  if (boxes.size() != live.size() || boxes.size() != parent.size())
    throw std::invalid_argument("from_lineage: slot vectors must have equal length");
  for (const auto& b : boxes)
    if (b.dim() != domain.dim())
      throw std::invalid_argument("from_lineage: cell dimension mismatch");
  Partition p(unchecked_tag{}, std::move(domain), std::move(boxes), std::move(live),
              std::move(parent));
  p.validate_cover();
  return p;
}

void Partition::rebuild_cache() {
  live_ids_.clear();
  for (CellId id = 0; id < boxes_.size(); ++id)
    if (live_[id]) live_ids_.push_back(id);

  size_t n = domain_.dim();
  grid_ = GridIndex{};
  if (live_ids_.size() < 64) return;
  size_t per_axis = std::max<size_t>(
      2, static_cast<size_t>(std::pow(static_cast<double>(live_ids_.size()),
                                      1.0 / static_cast<double>(n))));
  per_axis = std::min<size_t>(per_axis, 16);
  grid_.per_axis = per_axis;
  grid_.lo.resize(n);
  grid_.inv_width.resize(n);
  size_t total = 1;
  for (size_t i = 0; i < n; ++i) {
    double lo = double_below(domain_.lo[i]);
    double hi = double_above(domain_.hi[i]);
    if (!(hi > lo)) hi = lo + 1.0;
    grid_.lo[i] = lo;
    grid_.inv_width[i] = static_cast<double>(per_axis) / (hi - lo);
    total *= per_axis;
  }
  grid_.buckets.assign(total, {});
  auto bucket_range = [&](const Box& b, std::vector<size_t>& lo_idx,
                          std::vector<size_t>& hi_idx) {
    for (size_t i = 0; i < n; ++i) {
      double l = (double_below(b.lo[i]) - grid_.lo[i]) * grid_.inv_width[i];
      double h = (double_above(b.hi[i]) - grid_.lo[i]) * grid_.inv_width[i];
      long li = std::max(0L, static_cast<long>(std::floor(l)));
      long hi_b = std::min<long>(static_cast<long>(per_axis) - 1,
                                 static_cast<long>(std::floor(h)));
      lo_idx[i] = static_cast<size_t>(std::min<long>(li, per_axis - 1));
      hi_idx[i] = static_cast<size_t>(std::max<long>(hi_b, 0));
    }
  };
  std::vector<size_t> lo_idx(n), hi_idx(n), cur(n);
  for (CellId id : live_ids_) {
    bucket_range(boxes_[id], lo_idx, hi_idx);
    cur = lo_idx;
    while (true) {
      size_t flat = 0;
      for (size_t i = n; i-- > 0;) flat = flat * per_axis + cur[i];
      grid_.buckets[flat].push_back(id);
      size_t axis = 0;
      while (axis < n && ++cur[axis] > hi_idx[axis]) {
        cur[axis] = lo_idx[axis];
        ++axis;
      }
      if (axis == n) break;
    }
  }
}

void Partition::validate_cover() const {
  Rat vol(0);
  for (CellId id : live_ids_) {
    vol += boxes_[id].volume();
    auto overlapping = cells_interior_intersecting(boxes_[id]);
    for (CellId other : overlapping)
      if (other != id)
        throw std::invalid_argument("Partition: cells " + std::to_string(id) +
                                    " and " + std::to_string(other) +
                                    " overlap with positive volume");
  }
  if (vol != domain_.volume())
    throw std::invalid_argument("Partition: cells do not cover the domain exactly");
  if (vol == 0) {
    // volume comparison says nothing for a degenerate domain; cover directly
    std::vector<Box> cells;
    for (CellId id : live_ids_) cells.push_back(boxes_[id]);
    if (!union_subset({domain_}, cells))
      throw std::invalid_argument("Partition: cells do not cover the domain exactly");
  }
}

bool Partition::live(CellId id) const {
  return id < live_.size() && live_[id];
}

const Box& Partition::cell(CellId id) const {
  if (!live(id)) throw std::out_of_range("Partition: cell not live: " + std::to_string(id));
  return boxes_[id];
}

const Box& Partition::cell_any(CellId id) const {
  if (id >= boxes_.size()) throw std::out_of_range("Partition: no such cell");
  return boxes_[id];
}

std::optional<CellId> Partition::parent(CellId id) const {
  if (id >= parent_.size() || parent_[id] == kOutCell) return std::nullopt;
  return parent_[id];
}

CellId Partition::live_ancestor_in(const Partition& coarser, CellId id) const {
  CellId cur = id;
  while (true) {
    if (coarser.live(cur)) return cur;
    if (cur >= parent_.size() || parent_[cur] == kOutCell)
      throw std::invalid_argument("live_ancestor_in: no ancestor live in the coarser partition");
    cur = parent_[cur];
  }
}

Rat Partition::resolution() const {
  Rat r(0);
  for (CellId id : live_ids_) r = std::max(r, boxes_[id].diameter());
  return r;
}

Partition Partition::split_cell(CellId id, size_t axis) const {
  return split_cells({{id, axis}});
}

Partition Partition::split_cells(const std::vector<std::pair<CellId, size_t>>& splits) const {
  auto sorted = splits;
  std::sort(sorted.begin(), sorted.end());
  std::vector<Box> boxes = boxes_;
  std::vector<bool> live = live_;
  std::vector<CellId> parent = parent_;
  for (auto [id, axis] : sorted) {
    if (!this->live(id))
      throw std::invalid_argument("split_cells: cell not live: " + std::to_string(id));
    const Box& b = boxes_[id];
    if (axis >= b.dim())
      throw std::invalid_argument("split_cells: axis out of range");
    if (b.lo[axis] == b.hi[axis])
      throw std::invalid_argument("split_cells: zero-width axis " + std::to_string(axis) +
                                  " of cell " + std::to_string(id));
    Rat mid = (b.lo[axis] + b.hi[axis]) / 2;
    Box left = b, right = b;
    left.hi[axis] = mid;
    right.lo[axis] = mid;
    live[id] = false;
    boxes.push_back(std::move(left));
    live.push_back(true);
    parent.push_back(id);
    boxes.push_back(std::move(right));
    live.push_back(true);
    parent.push_back(id);
  }
  return Partition(unchecked_tag{}, domain_, std::move(boxes), std::move(live),
                   std::move(parent));
}

std::optional<CellId> Partition::find_cell(const Vec& x) const {
  if (!domain_.contains_point(x)) return std::nullopt;
  Box probe(x, x);
  auto hits = cells_intersecting(probe);
  if (hits.empty()) return std::nullopt;
  return hits.front();
}

template <typename Pred>
std::vector<CellId> Partition::collect(const Box& b, Pred pred) const {
  std::vector<CellId> out;
  if (!grid_.enabled()) {
    for (CellId id : live_ids_)
      if (pred(boxes_[id])) out.push_back(id);
    return out;
  }
  size_t n = domain_.dim();
  std::vector<size_t> lo_idx(n), hi_idx(n), cur(n);
  for (size_t i = 0; i < n; ++i) {
    double l = (double_below(b.lo[i]) - grid_.lo[i]) * grid_.inv_width[i];
    double h = (double_above(b.hi[i]) - grid_.lo[i]) * grid_.inv_width[i];
    long li = static_cast<long>(std::floor(l));
    long hi_b = static_cast<long>(std::floor(h));
    li = std::clamp<long>(li, 0, static_cast<long>(grid_.per_axis) - 1);
    hi_b = std::clamp<long>(hi_b, 0, static_cast<long>(grid_.per_axis) - 1);
    lo_idx[i] = static_cast<size_t>(li);
    hi_idx[i] = static_cast<size_t>(hi_b);
  }
  std::vector<CellId> cand;
  cur = lo_idx;
  while (true) {
    size_t flat = 0;
    for (size_t i = n; i-- > 0;) flat = flat * grid_.per_axis + cur[i];
    for (CellId id : grid_.buckets[flat]) cand.push_back(id);
    size_t axis = 0;
    while (axis < n && ++cur[axis] > hi_idx[axis]) {
      cur[axis] = lo_idx[axis];
      ++axis;
    }
    if (axis == n) break;
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  for (CellId id : cand)
    if (pred(boxes_[id])) out.push_back(id);
  return out;
}

std::vector<CellId> Partition::cells_intersecting(const Box& b) const {
  return collect(b, [&](const Box& c) { return c.intersects_box(b); });
}

std::vector<CellId> Partition::cells_interior_intersecting(const Box& b) const {
  return collect(b, [&](const Box& c) { return c.interior_intersects_box(b); });
}

std::uint64_t Partition::content_hash() const {
  std::uint64_t h = 14695981039346656037ull;
  auto feed_box = [&](const Box& b) {
    for (size_t i = 0; i < b.dim(); ++i) {
      h = fnv1a(rat_str(b.lo[i]), h);
      h = fnv1a("|", h);
      h = fnv1a(rat_str(b.hi[i]), h);
      h = fnv1a(";", h);
    }
  };
  feed_box(domain_);
  for (CellId id : live_ids_) {
    h = fnv1a(std::to_string(id), h);
    h = fnv1a(":", h);
    feed_box(boxes_[id]);
  }
  return h;
}

bool preserves(const Partition& p, const std::vector<Box>& s) {
  std::vector<Box> covered;
  for (CellId id : p.ids()) {
    const Box& cell = p.cell(id);
    bool disjoint = true;
    for (const auto& m : s)
      if (cell.interior_intersects_box(m)) { disjoint = false; break; }
    if (disjoint) continue;
    if (!box_covered_by_union(cell, s)) return false;
    covered.push_back(cell);
  }
  // the covered cells must reproduce s exactly (catches degenerate slivers)
  if (s.empty()) return true;
  return union_subset(s, covered);
}

bool subsumes(const Partition& fine, const Partition& coarse) {
  if (!(fine.domain() == coarse.domain())) return false;
  for (CellId id : fine.ids()) {
    const Box& b = fine.cell(id);
    bool found = false;
    for (CellId cid : coarse.cells_intersecting(b))
      if (coarse.cell(cid).contains_box(b)) { found = true; break; }
    if (!found) return false;
  }
  return true;
}

} // namespace rsyn
