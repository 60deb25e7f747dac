#pragma once

#include <set>
#include <string>

#include "rsyn/partition.hpp"

namespace rsyn {

/// x' = a·x + b·u + c
struct AffineDynamics {
  Mat a;
  Mat b;
  Vec c;
};

struct Location {
  Box invariant;
  AffineDynamics dynamics;
};

/// Discrete-time piecewise-affine system. Location invariants partition the
/// state space; inputs are a finite point set drawn from the input box.
struct PiecewiseAffineSystem {
  Box state_space;
  Box input_space;
  std::vector<Vec> input_points;
  std::vector<Location> locations;

  size_t state_dim() const { return state_space.dim(); }
  size_t input_dim() const { return input_space.dim(); }
  size_t num_inputs() const { return input_points.size(); }
};

/// Lowest-indexed location whose closed invariant contains x. Throws
/// std::domain_error when x is outside the state space.
size_t locate(const PiecewiseAffineSystem& sys, const Vec& x);

/// One step of the dynamics under the indexed input.
Vec step(const PiecewiseAffineSystem& sys, const Vec& x, size_t input_index);

/// Lookup-table feedback law: one input index per control cell.
struct Controller {
  std::vector<size_t> input_by_cell; // indexed by control cell id
};

/// Piecewise-constant ranking function on control cells.
struct RankingFunction {
  std::vector<unsigned> rank_by_cell; // indexed by control cell id
  unsigned max_rank = 0;
};

struct Problem {
  PiecewiseAffineSystem system;
  Partition control;
  std::vector<Box> init, safe, goal;
  unsigned k = 1;
  unsigned max_rank = 0; // 0 = default |C|

  unsigned effective_max_rank() const {
    return max_rank ? max_rank : static_cast<unsigned>(control.size());
  }
};

/// Empty iff every Problem invariant holds; entries name the failed
/// invariant and the offending box or cell.
std::vector<std::string> validate(const Problem& problem);

/// Control-cell classification against the problem sets. Only valid once
/// validate() passes (cells are aligned with init/safe/goal).
struct CellRoles {
  std::set<CellId> init_cells;
  std::set<CellId> goal_cells;
  std::set<CellId> unsafe_cells; // cells not inside the safe union
};
CellRoles classify_control_cells(const Problem& problem);

/// Roles lifted to a refinement of the control partition through the
/// cell-to-control map.
CellRoles lift_roles(const CellRoles& control_roles,
                     const std::map<CellId, CellId>& cell_control);

} // namespace rsyn
