#include "rsyn/post.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "rsyn/polyset.hpp"

namespace rsyn {

bool SplitPost::escapes(const Box& state_space) const {
  for (const auto& [sub, image] : pieces)
    if (!state_space.contains_box(image.bounding_box())) return true;
  return false;
}

SplitPost exact_post(const PiecewiseAffineSystem& sys, const Box& cell,
                     size_t input_index) {
  if (input_index >= sys.num_inputs())
    throw std::out_of_range("exact_post: input index out of range");
  const Vec& u = sys.input_points[input_index];
  bool full_dim = !cell.degenerate();
  SplitPost out;
  for (const auto& loc : sys.locations) {
    auto sub = cell.intersection(loc.invariant);
    if (!sub) continue;
    if (full_dim && !cell.interior_intersects_box(loc.invariant)) continue;
    Vec offset = loc.dynamics.c;
    for (size_t i = 0; i < offset.size(); ++i) {
      Rat acc(0);
      for (size_t j = 0; j < u.size(); ++j) acc += loc.dynamics.b[i][j] * u[j];
      offset[i] += acc;
    }
    out.pieces.emplace_back(*sub, affine_image(*sub, loc.dynamics.a, offset));
  }
  if (out.pieces.empty())
    throw std::invalid_argument("exact_post: cell does not meet any location invariant");
  return out;
}

namespace {

std::vector<Parallelotope> piece_images(const SplitPost& sp) {
  std::vector<Parallelotope> images;
  images.reserve(sp.pieces.size());
  for (const auto& [sub, image] : sp.pieces) images.push_back(image);
  return images;
}

std::vector<CellId> over_cells_of_images(const Partition& partition,
                                         const std::vector<Parallelotope>& images,
                                         bool escapes) {
  std::vector<CellId> acc;
  for (const auto& image : images) {
    for (CellId id : partition.cells_intersecting(image.bounding_box()))
      if (intersects(image, partition.cell(id))) acc.push_back(id);
  }
  std::sort(acc.begin(), acc.end());
  acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
  if (escapes) acc.push_back(kOutCell);
  return acc;
}

std::vector<CellId> under_cells_of_images(const Partition& partition,
                                          const std::vector<Parallelotope>& images,
                                          const std::vector<CellId>& over_candidates) {
  std::vector<CellId> acc;
  for (CellId id : over_candidates) {
    if (id == kOutCell) continue;
    const Box& target = partition.cell(id);
    bool inside = false;
    if (images.size() == 1) {
      inside = contains(images[0], target);
    } else {
      for (const auto& image : images)
        if (contains(image, target)) { inside = true; break; }
      if (!inside) inside = box_subset_of_union(target, images);
    }
    if (inside) acc.push_back(id);
  }
  return acc;
}

SuccessorTable::Row compute_row(const PiecewiseAffineSystem& sys,
                                const Partition& partition, const Box& cell,
                                size_t input) {
  SplitPost sp = exact_post(sys, cell, input);
  auto images = piece_images(sp);
  SuccessorTable::Row row;
  row.over = over_cells_of_images(partition, images, sp.escapes(sys.state_space));
  row.under = under_cells_of_images(partition, images, row.over);
  return row;
}

size_t location_of_cell(const PiecewiseAffineSystem& sys, const Box& cell) {
  bool full_dim = !cell.degenerate();
  for (size_t l = 0; l < sys.locations.size(); ++l) {
    const Box& inv = sys.locations[l].invariant;
    if (full_dim ? cell.interior_intersects_box(inv) : cell.intersects_box(inv))
      return l;
  }
  throw std::logic_error("location_of_cell: no overlapping location");
}

CellId control_of_cell(const Partition& control, const Box& cell) {
  for (CellId cid : control.cells_intersecting(cell))
    if (control.cell(cid).contains_box(cell)) return cid;
  throw std::invalid_argument("control_of_cell: partition cell straddles control cells");
}

void run_parallel(size_t jobs, unsigned threads, const std::function<void(size_t)>& work) {
  unsigned hw = threads ? threads : std::thread::hardware_concurrency();
  if (hw <= 1 || jobs < 2) {
    for (size_t i = 0; i < jobs; ++i) work(i);
    return;
  }
  hw = std::min<unsigned>(hw, 16);
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (unsigned t = 0; t < hw; ++t)
    pool.emplace_back([&] {
      while (true) {
        size_t i = next.fetch_add(1);
        if (i >= jobs) return;
        try {
          work(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

} // namespace

const SuccessorTable::Row& SuccessorTable::row(CellId cell, size_t input) const {
  auto it = rows.find(cell);
  if (it == rows.end() || input >= it->second.size())
    throw std::out_of_range("SuccessorTable: no row for cell " + std::to_string(cell));
  return it->second[input];
}

std::vector<CellId> over_post(const PiecewiseAffineSystem& sys,
                              const Partition& partition, CellId cell,
                              size_t input_index) {
  return compute_row(sys, partition, partition.cell(cell), input_index).over;
}

std::vector<CellId> under_post(const PiecewiseAffineSystem& sys,
                               const Partition& partition, CellId cell,
                               size_t input_index) {
  return compute_row(sys, partition, partition.cell(cell), input_index).under;
}

SuccessorTable build_table(const PiecewiseAffineSystem& sys,
                           const Partition& partition, const Partition& control,
                           unsigned threads) {
  SuccessorTable table;
  table.partition_hash = partition.content_hash();
  table.num_inputs = sys.num_inputs();
  const auto& ids = partition.ids();
  std::vector<std::vector<SuccessorTable::Row>> slots(ids.size());
  run_parallel(ids.size(), threads, [&](size_t i) {
    const Box& cell = partition.cell(ids[i]);
    std::vector<SuccessorTable::Row> rows(sys.num_inputs());
    for (size_t u = 0; u < sys.num_inputs(); ++u)
      rows[u] = compute_row(sys, partition, cell, u);
    slots[i] = std::move(rows);
  });
  for (size_t i = 0; i < ids.size(); ++i) {
    const Box& cell = partition.cell(ids[i]);
    table.rows[ids[i]] = std::move(slots[i]);
    table.cell_location[ids[i]] = location_of_cell(sys, cell);
    table.cell_control[ids[i]] = control_of_cell(control, cell);
  }
  return table;
}

SuccessorTable refresh_table(const PiecewiseAffineSystem& sys,
                             const SuccessorTable& old_table,
                             const Partition& old_partition,
                             const Partition& new_partition,
                             const Partition& control, unsigned threads) {
  // live descendants in the new partition of each cell retired since the old
  std::map<CellId, std::vector<CellId>> descendants;
  for (CellId id : new_partition.ids()) {
    if (old_partition.live(id)) continue;
    CellId anc = new_partition.live_ancestor_in(old_partition, id);
    descendants[anc].push_back(id);
  }

  SuccessorTable table;
  table.partition_hash = new_partition.content_hash();
  table.num_inputs = sys.num_inputs();

  const auto& ids = new_partition.ids();
  std::vector<std::vector<SuccessorTable::Row>> slots(ids.size());
  run_parallel(ids.size(), threads, [&](size_t i) {
    CellId id = ids[i];
    const Box& cell = new_partition.cell(id);
    std::vector<SuccessorTable::Row> rows(sys.num_inputs());
    if (!old_partition.live(id)) {
      for (size_t u = 0; u < sys.num_inputs(); ++u)
        rows[u] = compute_row(sys, new_partition, cell, u);
      slots[i] = std::move(rows);
      return;
    }
    for (size_t u = 0; u < sys.num_inputs(); ++u) {
      const auto& old_row = old_table.row(id, u);
      bool touched = false;
      for (CellId q : old_row.over)
        if (q != kOutCell && !new_partition.live(q)) { touched = true; break; }
      if (!touched) {
        rows[u] = old_row;
        continue;
      }
      SplitPost sp = exact_post(sys, cell, u);
      auto images = piece_images(sp);
      SuccessorTable::Row row;
      std::vector<CellId> under_candidates;
      for (CellId q : old_row.over) {
        if (q == kOutCell) {
          row.over.push_back(kOutCell);
          continue;
        }
        if (new_partition.live(q)) {
          row.over.push_back(q);
          if (std::binary_search(old_row.under.begin(), old_row.under.end(), q))
            row.under.push_back(q);
          else
            under_candidates.push_back(q);
          continue;
        }
        bool was_under = std::binary_search(old_row.under.begin(), old_row.under.end(), q);
        for (CellId child : descendants.at(q)) {
          const Box& cb = new_partition.cell(child);
          bool hits = false;
          for (const auto& image : images)
            if (intersects(image, cb)) { hits = true; break; }
          if (!hits) continue;
          row.over.push_back(child);
          if (was_under)
            row.under.push_back(child); // child ⊆ split target ⊆ image
          else
            under_candidates.push_back(child);
        }
      }
      for (CellId q : under_candidates) {
        const Box& target = new_partition.cell(q);
        bool inside = false;
        if (images.size() == 1) {
          inside = contains(images[0], target);
        } else {
          for (const auto& image : images)
            if (contains(image, target)) { inside = true; break; }
          if (!inside) inside = box_subset_of_union(target, images);
        }
        if (inside) row.under.push_back(q);
      }
      auto norm = [](std::vector<CellId>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
      };
      norm(row.over);
      norm(row.under);
      rows[u] = std::move(row);
    }
    slots[i] = std::move(rows);
  });
  for (size_t i = 0; i < ids.size(); ++i) {
    const Box& cell = new_partition.cell(ids[i]);
    table.rows[ids[i]] = std::move(slots[i]);
    table.cell_location[ids[i]] = location_of_cell(sys, cell);
    table.cell_control[ids[i]] = control_of_cell(control, cell);
  }
  return table;
}

namespace {

std::set<CellId> k_step(const SuccessorTable& table,
                        const std::map<CellId, size_t>& choice, CellId cell,
                        unsigned k, const std::set<CellId>& goal_cells, bool over) {
  if (k < 1) throw std::invalid_argument("k_step: k must be at least 1");
  std::set<CellId> frontier{cell};
  for (unsigned t = 0; t < k; ++t) {
    std::set<CellId> next;
    for (CellId p : frontier) {
      if (p == kOutCell || goal_cells.count(p)) {
        next.insert(p); // absorbing
        continue;
      }
      auto it = choice.find(p);
      if (it == choice.end())
        throw std::invalid_argument("k_step: controller choice missing for cell " +
                                    std::to_string(p));
      const auto& row = table.row(p, it->second);
      const auto& succ = over ? row.over : row.under;
      next.insert(succ.begin(), succ.end());
    }
    frontier = std::move(next);
  }
  return frontier;
}

} // namespace

std::set<CellId> k_step_over(const SuccessorTable& table,
                             const std::map<CellId, size_t>& choice, CellId cell,
                             unsigned k, const std::set<CellId>& goal_cells) {
  return k_step(table, choice, cell, k, goal_cells, true);
}

std::set<CellId> k_step_under(const SuccessorTable& table,
                              const std::map<CellId, size_t>& choice, CellId cell,
                              unsigned k, const std::set<CellId>& goal_cells) {
  return k_step(table, choice, cell, k, goal_cells, false);
}

std::set<CellId> over_post_of_set(const SuccessorTable& table,
                                  const std::map<CellId, size_t>& choice,
                                  const std::set<CellId>& sources) {
  std::set<CellId> out;
  for (CellId p : sources) {
    if (p == kOutCell) {
      out.insert(kOutCell);
      continue;
    }
    const auto& row = table.row(p, choice.at(p));
    out.insert(row.over.begin(), row.over.end());
  }
  return out;
}

std::set<CellId> under_post_of_set(const PiecewiseAffineSystem& sys,
                                   const Partition& partition,
                                   const std::map<CellId, size_t>& choice,
                                   const std::set<CellId>& sources) {
  std::vector<Parallelotope> images;
  for (CellId p : sources) {
    if (p == kOutCell) continue;
    SplitPost sp = exact_post(sys, partition.cell(p), choice.at(p));
    for (auto& [sub, image] : sp.pieces) images.push_back(image);
  }
  std::set<CellId> out;
  if (images.empty()) return out;
  // candidates: cells touching some image
  std::set<CellId> candidates;
  for (const auto& image : images)
    for (CellId id : partition.cells_intersecting(image.bounding_box()))
      if (intersects(image, partition.cell(id))) candidates.insert(id);
  for (CellId q : candidates) {
    const Box& target = partition.cell(q);
    bool inside = false;
    for (const auto& image : images)
      if (contains(image, target)) { inside = true; break; }
    if (!inside) inside = box_subset_of_union(target, images);
    if (inside) out.insert(q);
  }
  return out;
}

} // namespace rsyn
