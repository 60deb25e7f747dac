#pragma once

#include <optional>

#include "rsyn/model.hpp"
#include "rsyn/post.hpp"

namespace rsyn {

enum class Variant { exact, weakened, strengthened };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

/// Synthesis output: a lookup-table controller with its inductive proof
/// pieces, bound to a specific partition by hash.
struct Certificate {
  Controller controller;
  RankingFunction ranking;
  std::set<CellId> invariant_cells; // partition cell ids
  Variant variant = Variant::strengthened;
  unsigned k = 1;
  std::uint64_t partition_hash = 0;
};

struct RuleViolation {
  std::string rule; // "R1".."R6" or "domain"
  CellId cell = kOutCell;
  CellId other = kOutCell;
  std::string detail;
};

struct CheckReport {
  std::vector<RuleViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks the basic inductive rules R1-R6 directly against exact one-step
/// geometry. Independent of the encoder and the successor tables: every
/// image is recomputed here.
CheckReport check_exact_rules(const Problem& problem, const Partition& partition,
                              const Certificate& cert);

struct SimOutcome {
  std::vector<Vec> trace;
  bool safe_ok = true;
  bool progress_ok = false;
  std::optional<size_t> violation_step;
  std::optional<size_t> goal_step;
};

/// Closed-loop simulation from x0 under table lookups. The default horizon
/// (0) is k * max_rank * |C|.
SimOutcome simulate(const Problem& problem, const Controller& controller, const Vec& x0,
                    size_t horizon = 0);

/// Per-location constant perturbation family with sup-norm bound epsilon.
struct PerturbationSpec {
  Rat epsilon;
  size_t samples = 32; // random samples in addition to the axis extremes
  std::uint64_t seed = 1;
};

struct ProbeReport {
  size_t total = 0;
  size_t passed = 0;
  std::optional<size_t> first_failure;    // sample index
  std::vector<RuleViolation> first_failure_violations;
  double pass_fraction() const { return total ? double(passed) / double(total) : 1.0; }
};

/// Re-checks the certificate's controller and ranking on sampled
/// epsilon-perturbations of the dynamics, with a fresh invariant computed as
/// the reach closure per sample. Evidence, not a decision procedure.
ProbeReport probe_robustness(const Problem& problem, const Partition& partition,
                             const Certificate& cert, const PerturbationSpec& spec);

} // namespace rsyn
