#pragma once

#include <cstdint>
#include <optional>

#include "rsyn/box.hpp"

namespace rsyn {

using CellId = std::uint32_t;

/// Sentinel id for the pseudo-cell collecting post images that leave the
/// state space.
inline constexpr CellId kOutCell = 0xFFFFFFFFu;

/// Finite interior-disjoint cover of a domain box by closed boxes. Cell ids
/// are stable across refinement: splitting retires the parent id and appends
/// two child ids, and the lineage map records parentage. Immutable once
/// constructed; refinement produces new values.
class Partition {
public:
  Partition(Box domain, std::vector<Box> cells);

  /// Reconstructs a partition with tombstones from serialized slots. The
  /// live cells are validated as an exact cover; parentage is taken as-is.
  static Partition from_lineage(Box domain, std::vector<Box> boxes,
                                std::vector<bool> live, std::vector<CellId> parent);

  const Box& domain() const { return domain_; }
  const std::vector<CellId>& ids() const { return live_ids_; }
  size_t size() const { return live_ids_.size(); }
  size_t id_bound() const { return boxes_.size(); }

  bool live(CellId id) const;
  const Box& cell(CellId id) const;     // live cells only
  const Box& cell_any(CellId id) const; // live or retired

  std::optional<CellId> parent(CellId id) const;
  /// Walks the lineage of `id` upward until a cell live in `coarser`.
  CellId live_ancestor_in(const Partition& coarser, CellId id) const;

  /// Largest infinity-norm diameter over live cells.
  Rat resolution() const;

  /// Bisects one live cell on the given axis. Throws on a zero-width axis.
  Partition split_cell(CellId id, size_t axis) const;
  /// Batched variant; splits are applied in ascending id order.
  Partition split_cells(const std::vector<std::pair<CellId, size_t>>& splits) const;

  /// Lowest-id live cell containing the point, if any.
  std::optional<CellId> find_cell(const Vec& x) const;

  /// Live cells whose closed box meets `b`, ascending ids.
  std::vector<CellId> cells_intersecting(const Box& b) const;
  /// Live cells overlapping `b` with positive volume, ascending ids.
  std::vector<CellId> cells_interior_intersecting(const Box& b) const;

  /// Hash of the domain plus live (id, box) content.
  std::uint64_t content_hash() const;

private:
  struct unchecked_tag {};
  Partition(unchecked_tag, Box domain, std::vector<Box> boxes,
            std::vector<bool> live, std::vector<CellId> parent);

  void rebuild_cache();
  void validate_cover() const;

  template <typename Pred>
  std::vector<CellId> collect(const Box& b, Pred pred) const;

  Box domain_;
  std::vector<Box> boxes_;
  std::vector<bool> live_;
  std::vector<CellId> parent_; // kOutCell marks a root
  std::vector<CellId> live_ids_;

  // uniform bucket grid over double-approximated coordinates; pruning only,
  // every hit is confirmed exactly
  struct GridIndex {
    size_t per_axis = 0;
    std::vector<double> lo, inv_width;
    std::vector<std::vector<CellId>> buckets;
    bool enabled() const { return per_axis > 0; }
  };
  GridIndex grid_;
};

/// True iff every live cell is inside the union of `s` or shares no volume
/// with it, and the union is reproduced exactly by the covered cells.
bool preserves(const Partition& p, const std::vector<Box>& s);

/// True iff every cell of `fine` fits inside some cell of `coarse`.
bool subsumes(const Partition& fine, const Partition& coarse);

} // namespace rsyn
