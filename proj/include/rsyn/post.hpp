#pragma once

#include <map>

#include "rsyn/model.hpp"

namespace rsyn {

/// Exact one-step image of a cell under a fixed input, split by the
/// locations the cell overlaps. Pieces are closed; a cell living inside one
/// location yields a single piece.
struct SplitPost {
  std::vector<std::pair<Box, Parallelotope>> pieces;
  /// True when some piece image leaves the state space.
  bool escapes(const Box& state_space) const;
};

SplitPost exact_post(const PiecewiseAffineSystem& sys, const Box& cell,
                     size_t input_index);

/// Per-(cell, input) over- and under-approximate successor cell sets,
/// materialized for a whole partition. kOutCell marks images leaving the
/// state space and can only appear on the over side.
struct SuccessorTable {
  std::uint64_t partition_hash = 0;
  size_t num_inputs = 0;

  struct Row {
    std::vector<CellId> over;  // sorted; may contain kOutCell (last)
    std::vector<CellId> under; // sorted
    bool operator==(const Row&) const = default;
  };

  // rows[cell][input]
  std::map<CellId, std::vector<Row>> rows;
  std::map<CellId, size_t> cell_location;
  std::map<CellId, CellId> cell_control;

  const Row& row(CellId cell, size_t input) const;
  bool operator==(const SuccessorTable&) const = default;
};

std::vector<CellId> over_post(const PiecewiseAffineSystem& sys,
                              const Partition& partition, CellId cell,
                              size_t input_index);
std::vector<CellId> under_post(const PiecewiseAffineSystem& sys,
                               const Partition& partition, CellId cell,
                               size_t input_index);

/// Builds the full table. Work is spread over (cell, input) pairs across
/// threads; the result is independent of the thread count.
SuccessorTable build_table(const PiecewiseAffineSystem& sys,
                           const Partition& partition, const Partition& control,
                           unsigned threads = 0);

/// Rebuilds a table after refinement, recomputing only rows of split cells
/// and entries that referenced split cells. Equivalent to build_table on the
/// new partition.
SuccessorTable refresh_table(const PiecewiseAffineSystem& sys,
                             const SuccessorTable& old_table,
                             const Partition& old_partition,
                             const Partition& new_partition,
                             const Partition& control, unsigned threads = 0);

/// k-fold composition of one-step over rows under a fixed controller choice
/// (input index per partition cell). Goal cells and kOutCell are absorbing.
std::set<CellId> k_step_over(const SuccessorTable& table,
                             const std::map<CellId, size_t>& choice, CellId cell,
                             unsigned k, const std::set<CellId>& goal_cells);
std::set<CellId> k_step_under(const SuccessorTable& table,
                              const std::map<CellId, size_t>& choice, CellId cell,
                              unsigned k, const std::set<CellId>& goal_cells);

/// Set-level post operators for a controller choice: the image of the whole
/// source set is used, not the per-cell rows. Over distributes over unions
/// so the table rows are reused; under is decided against the union image.
std::set<CellId> over_post_of_set(const SuccessorTable& table,
                                  const std::map<CellId, size_t>& choice,
                                  const std::set<CellId>& sources);
std::set<CellId> under_post_of_set(const PiecewiseAffineSystem& sys,
                                   const Partition& partition,
                                   const std::map<CellId, size_t>& choice,
                                   const std::set<CellId>& sources);

} // namespace rsyn
