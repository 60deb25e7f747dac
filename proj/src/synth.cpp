#include "rsyn/synth.hpp"

#include <chrono>
#include <future>
#include <sstream>

#include "rsyn/problem_io.hpp"

namespace rsyn {

StrategyKind strategy_from_name(const std::string& name) {
  if (name == "uniform") return StrategyKind::uniform;
  if (name == "must" || name == "must_guided") return StrategyKind::must_guided;
  if (name == "complement" || name == "complement_guided")
    return StrategyKind::complement_guided;
  if (name == "heuristic") return StrategyKind::heuristic;
  throw std::invalid_argument("unknown refinement strategy: " + name);
}

const char* strategy_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::uniform: return "uniform";
    case StrategyKind::must_guided: return "must_guided";
    case StrategyKind::complement_guided: return "complement_guided";
    case StrategyKind::heuristic: return "heuristic";
  }
  return "?";
}

const char* verdict_name(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::sat: return "SAT";
    case VerdictKind::unsat: return "UNSAT";
    case VerdictKind::unknown: return "UNKNOWN";
  }
  return "?";
}

namespace {

size_t widest_axis(const Box& b) {
  size_t best = 0;
  for (size_t ax = 1; ax < b.dim(); ++ax)
    if (b.side(ax) > b.side(best)) best = ax;
  return best;
}

std::vector<size_t> widest_axes(const Box& b, unsigned count) {
  std::vector<size_t> axes(b.dim());
  for (size_t i = 0; i < axes.size(); ++i) axes[i] = i;
  std::stable_sort(axes.begin(), axes.end(),
                   [&](size_t a, size_t c) { return b.side(a) > b.side(c); });
  std::vector<size_t> out;
  for (size_t ax : axes) {
    if (out.size() >= count) break;
    if (b.side(ax) > 0) out.push_back(ax);
  }
  return out;
}

} // namespace

Partition init_partition(const Problem& problem, unsigned splits_per_cell) {
  Partition p = problem.control;
  if (splits_per_cell == 0) return p;
  // axes chosen per original control cell, then applied one round at a time
  std::map<CellId, std::vector<size_t>> plan;
  for (CellId id : p.ids()) plan[id] = widest_axes(p.cell(id), splits_per_cell);
  size_t rounds = 0;
  for (auto& [id, axes] : plan) rounds = std::max(rounds, axes.size());
  for (size_t round = 0; round < rounds; ++round) {
    std::vector<std::pair<CellId, size_t>> splits;
    for (CellId id : p.ids()) {
      CellId root = p.live_ancestor_in(problem.control, id);
      const auto& axes = plan.at(root);
      if (round < axes.size()) splits.push_back({id, axes[round]});
    }
    if (!splits.empty()) p = p.split_cells(splits);
  }
  return p;
}

namespace {

// cell adjacency = closed boxes touching; hop distance via breadth-first
// wavefronts from the unsafe cells
bool must_near_unsafe(const Partition& partition, const std::set<CellId>& must_cells,
                      const std::set<CellId>& unsafe_cells, unsigned threshold) {
  if (must_cells.empty() || unsafe_cells.empty()) return false;
  std::set<CellId> frontier = unsafe_cells;
  std::set<CellId> seen = unsafe_cells;
  for (unsigned hop = 0; hop < threshold; ++hop) {
    std::set<CellId> next;
    for (CellId p : frontier) {
      if (!partition.live(p)) continue;
      for (CellId q : partition.cells_intersecting(partition.cell(p)))
        if (seen.insert(q).second) next.insert(q);
    }
    for (CellId q : next)
      if (must_cells.count(q)) return true;
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  return false;
}

} // namespace

Partition refine(const Partition& partition, const std::set<CellId>& must_cells,
                 const RefinementStrategy& strategy, const std::set<CellId>& unsafe_cells,
                 const std::set<CellId>& force_cells) {
  StrategyKind kind = strategy.kind;
  if (kind == StrategyKind::heuristic)
    kind = must_near_unsafe(partition, must_cells, unsafe_cells,
                            strategy.proximity_threshold)
               ? StrategyKind::complement_guided
               : StrategyKind::must_guided;

  std::set<CellId> selection;
  switch (kind) {
    case StrategyKind::uniform:
      selection.insert(partition.ids().begin(), partition.ids().end());
      break;
    case StrategyKind::must_guided:
      for (CellId p : must_cells)
        if (partition.live(p)) selection.insert(p);
      if (selection.empty())
        selection.insert(partition.ids().begin(), partition.ids().end());
      break;
    case StrategyKind::complement_guided:
      for (CellId p : partition.ids())
        if (!must_cells.count(p)) selection.insert(p);
      if (selection.empty())
        selection.insert(partition.ids().begin(), partition.ids().end());
      break;
    case StrategyKind::heuristic:
      break; // resolved above
  }
  for (CellId p : force_cells)
    if (partition.live(p)) selection.insert(p);

  std::vector<std::pair<CellId, size_t>> splits;
  for (CellId p : selection) {
    const Box& b = partition.cell(p);
    if (b.degenerate() && b.side(widest_axis(b)) == 0) continue; // point cell
    splits.push_back({p, widest_axis(b)});
  }
  if (splits.empty()) return partition;
  return partition.split_cells(splits);
}

std::pair<std::set<CellId>, std::set<CellId>> must_may_fixpoints(
    const Problem& problem, const Partition& partition, const SuccessorTable& table,
    const Controller& controller) {
  CellRoles roles = lift_roles(classify_control_cells(problem), table.cell_control);
  std::map<CellId, size_t> choice;
  for (const auto& [p, c] : table.cell_control)
    choice[p] = controller.input_by_cell.at(c);

  // May: over sets distribute over unions, so the table rows compose
  std::set<CellId> may = roles.init_cells;
  {
    std::vector<CellId> work(may.begin(), may.end());
    while (!work.empty()) {
      CellId p = work.back();
      work.pop_back();
      for (CellId q : table.row(p, choice.at(p)).over) {
        if (q == kOutCell) continue; // escaping mass has no cell
        if (may.insert(q).second) work.push_back(q);
      }
    }
  }
  // Must: the under post of the whole set, not per cell
  std::set<CellId> must = roles.init_cells;
  while (true) {
    std::set<CellId> next = under_post_of_set(problem.system, partition, choice, must);
    size_t before = must.size();
    must.insert(next.begin(), next.end());
    if (must.size() == before) break;
  }
  return {std::move(must), std::move(may)};
}

bool check_prop3(const Problem& problem, const Controller& controller,
                 const Partition& partition) {
  SuccessorTable table = build_table(problem.system, partition, problem.control);
  auto [must, may] = must_may_fixpoints(problem, partition, table, controller);

  RefinementStrategy strategy{StrategyKind::must_guided};
  Partition refined = refine(partition, must, strategy);
  SuccessorTable table2 =
      refresh_table(problem.system, table, partition, refined, problem.control);
  auto [must2, may2] = must_may_fixpoints(problem, refined, table2, controller);

  // point-set comparison through the lineage: descendants of a coarse cell
  // tile it exactly
  auto same_set = [&](const std::set<CellId>& coarse, const std::set<CellId>& fine) {
    for (CellId p : fine)
      if (!coarse.count(refined.live_ancestor_in(partition, p))) return false;
    std::set<CellId> covered; // coarse cells fully covered by fine members
    std::map<CellId, size_t> pieces_seen, pieces_total;
    for (CellId p : refined.ids()) ++pieces_total[refined.live_ancestor_in(partition, p)];
    for (CellId p : fine) ++pieces_seen[refined.live_ancestor_in(partition, p)];
    for (CellId p : coarse) {
      auto it = pieces_seen.find(p);
      if (it == pieces_seen.end() || it->second != pieces_total.at(p)) return false;
    }
    return true;
  };
  return same_set(must, must2) && same_set(may, may2);
}

namespace {

std::string resolution_str(const Partition& p) { return rat_str(p.resolution()); }

std::set<CellId> argmax_diameter_cells(const Partition& p) {
  Rat best(0);
  for (CellId id : p.ids()) best = std::max(best, p.cell(id).diameter());
  std::set<CellId> out;
  for (CellId id : p.ids())
    if (p.cell(id).diameter() == best) out.insert(id);
  return out;
}

} // namespace

std::pair<Verdict, SynthesisRun> synthesize(const Problem& problem,
                                            const SolverConfig& solver_cfg,
                                            const RefinementStrategy& strategy,
                                            const Budget& budget, unsigned init_splits) {
  auto violations = validate(problem);
  if (!violations.empty())
    throw std::invalid_argument("synthesize: invalid problem: " + violations.front());

  SynthesisRun run;
  Verdict verdict;
  auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  Partition partition = init_partition(problem, init_splits);
  std::optional<SuccessorTable> table;
  CellRoles control_roles = classify_control_cells(problem);

  auto give_up = [&](const std::string& reason) {
    verdict.kind = VerdictKind::unknown;
    verdict.reason = reason;
    verdict.partition = partition;
    run.final_kind = verdict.kind;
    return std::make_pair(std::move(verdict), std::move(run));
  };

  for (unsigned iter = 1; iter <= budget.max_iters; ++iter) {
    if (partition.size() > budget.max_cells)
      return give_up("cell budget exhausted: " + std::to_string(partition.size()) + " > " +
                     std::to_string(budget.max_cells));
    if (budget.wallclock_seconds > 0 && elapsed() > budget.wallclock_seconds)
      return give_up("wall clock budget exhausted");

    IterationRecord rec;
    rec.iter = iter;
    auto tb0 = std::chrono::steady_clock::now();
    if (!table)
      table = build_table(problem.system, partition, problem.control);
    rec.build_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - tb0).count();
    rec.partition_hash = partition.content_hash();
    rec.cells = partition.size();
    rec.resolution = resolution_str(partition);

    EncodedProblem enc_s = encode_strengthened(problem, partition, *table);
    EncodedProblem enc_w = encode_weakened(problem, partition, *table);
    rec.s_assertions = enc_s.assertion_count;
    rec.w_assertions = enc_w.assertion_count;

    // both problems of the iteration are solved concurrently
    auto fut_s = std::async(std::launch::async, [&] { return solve(enc_s, solver_cfg); });
    auto fut_w = std::async(std::launch::async, [&] { return solve(enc_w, solver_cfg); });
    SolverOutcome out_s = fut_s.get();
    SolverOutcome out_w = fut_w.get();
    rec.s_status = out_s.status;
    rec.w_status = out_w.status;
    rec.s_seconds = out_s.wall_seconds;
    rec.w_seconds = out_w.wall_seconds;

    auto hard_failure = [](const SolverOutcome& o) {
      return o.status == SolveStatus::timeout || o.status == SolveStatus::crash ||
             o.status == SolveStatus::unknown || o.status == SolveStatus::config_error;
    };

    if (out_s.status == SolveStatus::sat) {
      rec.refinement = "none (strengthened sat)";
      run.iterations.push_back(rec);
      DecodedModel model = decode_model(enc_s, problem, out_s.model_text);
      Certificate cert = make_certificate(model, Variant::strengthened, problem.k, partition);
      CheckReport report = check_exact_rules(problem, partition, cert);
      if (!report.ok())
        return give_up("internal soundness check failed: decoded certificate violates " +
                       report.violations.front().rule);
      verdict.kind = VerdictKind::sat;
      verdict.certificate = std::move(cert);
      verdict.partition = partition;
      run.final_kind = verdict.kind;
      return {std::move(verdict), std::move(run)};
    }
    if (hard_failure(out_s)) {
      rec.refinement = "none (solver failure)";
      run.iterations.push_back(rec);
      return give_up(std::string("strengthened solve ") + solve_status_name(out_s.status) +
                     (out_s.stderr_tail.empty() ? "" : ": " + out_s.stderr_tail));
    }
    if (out_w.status == SolveStatus::unsat) {
      // impossibility claims are re-confirmed by a second run
      SolverOutcome again = solve(enc_w, solver_cfg);
      if (again.status != SolveStatus::unsat) {
        rec.refinement = "none (unstable unsat)";
        run.iterations.push_back(rec);
        return give_up("weakened unsat not reproducible: second run returned " +
                       std::string(solve_status_name(again.status)));
      }
      rec.refinement = "none (weakened unsat)";
      run.iterations.push_back(rec);
      verdict.kind = VerdictKind::unsat;
      verdict.partition = partition;
      verdict.w_text_hash = enc_w.text_hash;
      run.final_kind = verdict.kind;
      return {std::move(verdict), std::move(run)};
    }
    if (hard_failure(out_w)) {
      rec.refinement = "none (solver failure)";
      run.iterations.push_back(rec);
      return give_up(std::string("weakened solve ") + solve_status_name(out_w.status) +
                     (out_w.stderr_tail.empty() ? "" : ": " + out_w.stderr_tail));
    }

    // refine guided by the Must set of the weakened model; the widest cells
    // are always included so the resolution provably shrinks
    DecodedModel w_model = decode_model(enc_w, problem, out_w.model_text);
    CellRoles cell_roles = lift_roles(control_roles, table->cell_control);
    std::set<CellId> force = argmax_diameter_cells(partition);
    Partition next =
        refine(partition, w_model.members, strategy, cell_roles.unsafe_cells, force);
    rec.refinement = strategy_name(strategy.kind) + std::string(": ") +
                     std::to_string(next.size() - partition.size()) + " new cells";
    run.iterations.push_back(rec);

    SuccessorTable refreshed =
        refresh_table(problem.system, *table, partition, next, problem.control);
    partition = std::move(next);
    table = std::move(refreshed);
  }
  return give_up("iteration budget exhausted: " + std::to_string(budget.max_iters) +
                 " iterations");
}

} // namespace rsyn
