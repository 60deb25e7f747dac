#pragma once

#include "rsyn/box.hpp"
#include "rsyn/lp.hpp"

namespace rsyn {

IneqSystem hpoly_from_box(const Box& b);

/// H-representation of a parallelotope; nullopt when the generator matrix is
/// singular (the set is lower-dimensional and has no full-dimensional H-rep).
std::optional<IneqSystem> hpoly_from_parallelotope(const Parallelotope& p);

/// Exact test for  q ⊆ ∪ pieces  (closed sets). Degenerate axes of q are
/// eliminated by substitution; pieces that are lower-dimensional within the
/// remaining space cannot cover volume and are ignored.
bool box_subset_of_union(const Box& q, const std::vector<Parallelotope>& pieces);

/// Exact test for  target ⊆ ∪ members, all axis-aligned boxes.
bool box_covered_by_union(const Box& target, const std::vector<Box>& members);

/// Exact test for  ∪ as ⊆ ∪ bs.
bool union_subset(const std::vector<Box>& as, const std::vector<Box>& bs);

} // namespace rsyn
