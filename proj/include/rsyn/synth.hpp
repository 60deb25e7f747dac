#pragma once

#include "rsyn/encode.hpp"
#include "rsyn/solver.hpp"

namespace rsyn {

enum class StrategyKind { uniform, must_guided, complement_guided, heuristic };

StrategyKind strategy_from_name(const std::string& name);
const char* strategy_name(StrategyKind kind);

struct RefinementStrategy {
  StrategyKind kind = StrategyKind::must_guided;
  unsigned proximity_threshold = 1; // cell-adjacency hops for the heuristic
};

struct Budget {
  unsigned max_iters = 12;
  size_t max_cells = 1 << 16;
  double wallclock_seconds = 0; // 0 = unlimited
};

struct IterationRecord {
  unsigned iter = 0;
  std::uint64_t partition_hash = 0;
  size_t cells = 0;
  std::string resolution;
  SolveStatus w_status = SolveStatus::unknown;
  SolveStatus s_status = SolveStatus::unknown;
  size_t w_assertions = 0, s_assertions = 0;
  double w_seconds = 0, s_seconds = 0, build_seconds = 0;
  std::string refinement; // action taken after this iteration
};

enum class VerdictKind { sat, unsat, unknown };

const char* verdict_name(VerdictKind kind);

struct Verdict {
  VerdictKind kind = VerdictKind::unknown;
  std::optional<Certificate> certificate; // sat
  std::optional<Partition> partition;     // final partition
  std::uint64_t w_text_hash = 0;          // impossibility witness (unsat)
  std::string reason;                     // unknown diagnostics
};

struct SynthesisRun {
  std::vector<IterationRecord> iterations;
  VerdictKind final_kind = VerdictKind::unknown;
};

/// Initial partition: every control cell bisected on its `splits` widest
/// distinct axes (default 2, i.e. four pieces per cell in 2+ dimensions).
Partition init_partition(const Problem& problem, unsigned splits_per_cell = 2);

/// One refinement step: splits exactly the strategy-selected cells on their
/// widest axes. An empty must-guided selection falls back to uniform.
/// `force_cells` are split in addition to the selection.
Partition refine(const Partition& partition, const std::set<CellId>& must_cells,
                 const RefinementStrategy& strategy,
                 const std::set<CellId>& unsafe_cells = {},
                 const std::set<CellId>& force_cells = {});

/// Executable form of the must-guided refinement fixed-point statement:
/// computes Must/May fixed points for a fixed controller on the partition
/// and on its must-guided refinement and reports whether both point sets
/// are unchanged.
bool check_prop3(const Problem& problem, const Controller& controller,
                 const Partition& partition);

std::pair<Verdict, SynthesisRun> synthesize(const Problem& problem,
                                            const SolverConfig& solver_cfg,
                                            const RefinementStrategy& strategy,
                                            const Budget& budget,
                                            unsigned init_splits = 2);

/// Must/May fixed points for a fixed controller: the least cell sets
/// containing the init cells closed under the set-level under/over post.
std::pair<std::set<CellId>, std::set<CellId>> must_may_fixpoints(
    const Problem& problem, const Partition& partition, const SuccessorTable& table,
    const Controller& controller);

} // namespace rsyn
