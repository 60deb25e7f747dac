#pragma once

#include "rsyn/encode.hpp"

namespace rsyn {

/// External SMT solver invocation. The child is fed the SMT-LIB text on
/// stdin and must print sat/unsat/unknown followed by the model.
struct SolverConfig {
  std::string executable = "z3";
  std::vector<std::string> args = {"-in"};
  double timeout_seconds = 60.0;
  size_t memory_mb = 0; // 0 = no cap

  /// Honors REACH_SYNTH_SOLVER ("executable arg arg..."); falls back to the
  /// default above.
  static SolverConfig from_environment();
};

enum class SolveStatus { sat, unsat, unknown, timeout, crash, config_error };

const char* solve_status_name(SolveStatus s);

struct SolverOutcome {
  SolveStatus status = SolveStatus::crash;
  std::string model_text; // nonempty iff status == sat
  double wall_seconds = 0.0;
  std::string stderr_tail;
};

SolverOutcome solve(const EncodedProblem& encoded, const SolverConfig& cfg);

/// Raw variant for harnesses that already hold SMT-LIB text.
SolverOutcome solve_text(const std::string& smtlib, const SolverConfig& cfg);

struct OracleWitness {
  Controller controller;
  RankingFunction ranking;
  std::set<CellId> members;
};

struct OracleResult {
  bool sat = false;
  std::optional<OracleWitness> witness;
  size_t controllers_tried = 0;
};

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Independent enumerator: tries every controller table, computes the
/// membership set as a least fixed point per controller, and decides rank
/// existence by longest-path layering. Budget: |C| <= 12 and |U| <= 4.
OracleResult brute_force(const Problem& problem, const Partition& partition,
                         const SuccessorTable& table, Variant variant, unsigned k);

/// Rank feasibility for a fixed controller and membership set, the layering
/// the oracle uses internally. Exposed for property tests against direct
/// enumeration of rank assignments.
bool rank_assignment_exists(const Problem& problem, const Partition& partition,
                            const SuccessorTable& table, Variant variant, unsigned k,
                            const Controller& controller, const std::set<CellId>& members,
                            RankingFunction* out = nullptr);

} // namespace rsyn
