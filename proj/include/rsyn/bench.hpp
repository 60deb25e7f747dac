#pragma once

#include "rsyn/model.hpp"

namespace rsyn {

/// Piecewise-linearized Dubins vehicle over state (x, y, v, theta) and
/// inputs (acceleration, turn rate). Locations are the (v-bin, theta-bin)
/// grid; per location the planar update uses the midpoint cosine/sine
/// rounded to an exact rational, and the heading gain is the bin's midpoint
/// velocity.
struct VehicleConfig {
  unsigned theta_bins = 6;
  unsigned v_bins = 4;
  Box xy = Box({Rat(0), Rat(0)}, {Rat(8), Rat(4)});
  // explicit v edges (v_bins + 1 of them); a zero-width lowest bin pins the
  // no-turn-at-standstill behaviour exactly (midpoint velocity zero)
  std::vector<Rat> v_edges = {Rat(0), Rat(0), Rat(1, 3), Rat(2, 3), Rat(1)};
  Rat theta_lo = Rat(-3), theta_hi = Rat(3);
  std::vector<Rat> alphas = {Rat(-1, 4), Rat(0), Rat(1, 4)};
  std::vector<Rat> betas = {Rat(-1, 2), Rat(0), Rat(1, 2)};
  unsigned long coeff_denom_pow2 = 20;
  bool tangent_offsets = false; // tangent-plane linearization (nonzero offsets)
};

PiecewiseAffineSystem dubins_pwl(const VehicleConfig& cfg);

/// The 768-control-cell vehicle instance: 8x4 position grid times the 4x6
/// velocity/heading bins, corner init, opposite-corner goal, two interior
/// unsafe blocks. Intended for structural checks and manual solver runs.
Problem paper_scale_instance();

/// Unit-step mover on an nx-by-ny grid: five inputs (axis steps and stay),
/// init/goal/wall cells by grid coordinate.
struct GridLayout {
  std::vector<std::pair<unsigned, unsigned>> init_cells;
  std::vector<std::pair<unsigned, unsigned>> goal_cells;
  std::vector<std::pair<unsigned, unsigned>> wall_cells;
};
Problem gridworld(unsigned nx, unsigned ny, const GridLayout& layout);

/// 1-D conveyor: n cells over [0,1], shift dynamics with the given input
/// offsets, first cell init, last cell goal.
Problem conveyor_1d(unsigned cells, std::vector<Rat> input_offsets);

/// Randomized desk-scale instances inside the brute-force budget
/// (|C| <= 12, |U| <= 4, k = 1). Instances in the aligned family have every
/// post image equal to a cell union, so the exact encoding accepts them.
struct RandomInstance {
  Problem problem;
  bool exact_alignable = false;
};
RandomInstance random_oracle_instance(std::uint64_t seed);

} // namespace rsyn
