#include "rsyn/certify.hpp"

#include <random>

#include "rsyn/polyset.hpp"

namespace rsyn {

namespace {

// Geometric control-cell resolution; deliberately does not read any
// successor table so the checker stays independent of the encoder stack.
std::map<CellId, CellId> control_map(const Problem& problem, const Partition& partition) {
  std::map<CellId, CellId> out;
  for (CellId p : partition.ids()) {
    const Box& cell = partition.cell(p);
    bool found = false;
    for (CellId c : problem.control.cells_intersecting(cell)) {
      if (problem.control.cell(c).contains_box(cell)) {
        out[p] = c;
        found = true;
        break;
      }
    }
    if (!found)
      throw std::invalid_argument("certificate partition does not refine the control partition");
  }
  return out;
}

struct ExactEdges {
  // one-step successor cells by exact image intersection, per partition cell
  std::map<CellId, std::vector<CellId>> succ;
  std::set<CellId> escaping; // cells whose image leaves the state space
};

ExactEdges exact_edges(const PiecewiseAffineSystem& sys, const Partition& partition,
                       const std::map<CellId, CellId>& ctrl,
                       const Controller& controller) {
  ExactEdges out;
  for (CellId p : partition.ids()) {
    size_t input = controller.input_by_cell.at(ctrl.at(p));
    SplitPost sp = exact_post(sys, partition.cell(p), input);
    if (sp.escapes(sys.state_space)) out.escaping.insert(p);
    std::set<CellId> targets;
    for (const auto& [sub, image] : sp.pieces)
      for (CellId q : partition.cells_intersecting(image.bounding_box()))
        if (intersects(image, partition.cell(q))) targets.insert(q);
    out.succ[p] = std::vector<CellId>(targets.begin(), targets.end());
  }
  return out;
}

void check_rules_on(const Problem& problem, const Partition& partition,
                    const Certificate& cert, const PiecewiseAffineSystem& sys,
                    const std::set<CellId>& inv, CheckReport& report) {
  CellRoles roles = classify_control_cells(problem);
  auto ctrl = control_map(problem, partition);

  auto is_goal = [&](CellId p) { return roles.goal_cells.count(ctrl.at(p)) > 0; };
  auto is_unsafe = [&](CellId p) { return roles.unsafe_cells.count(ctrl.at(p)) > 0; };
  auto rank_of = [&](CellId p) { return cert.ranking.rank_by_cell.at(ctrl.at(p)); };

  // R1: init cells inside the invariant
  for (CellId p : partition.ids()) {
    if (!roles.init_cells.count(ctrl.at(p))) continue;
    if (!inv.count(p))
      report.violations.push_back({"R1", p, kOutCell, "init cell not in the invariant"});
  }

  // R3: invariant cells safe
  for (CellId p : inv)
    if (is_unsafe(p))
      report.violations.push_back({"R3", p, kOutCell, "invariant cell is unsafe"});

  // R4: rank zero exactly on goal cells
  for (CellId c : problem.control.ids()) {
    unsigned r = cert.ranking.rank_by_cell.at(c);
    bool goal = roles.goal_cells.count(c) > 0;
    if (goal && r != 0)
      report.violations.push_back({"R4", c, kOutCell, "goal cell with nonzero rank"});
    if (!goal && r == 0)
      report.violations.push_back({"R4", c, kOutCell, "non-goal cell with rank zero"});
    if (r > cert.ranking.max_rank)
      report.violations.push_back({"R4", c, kOutCell, "rank exceeds max_rank"});
  }

  ExactEdges edges = exact_edges(sys, partition, ctrl, cert.controller);

  // R2: the exact post of every invariant cell stays inside the invariant
  for (CellId p : inv) {
    if (edges.escaping.count(p))
      report.violations.push_back({"R2", p, kOutCell, "post image leaves the state space"});
    for (CellId q : edges.succ.at(p))
      if (!inv.count(q))
        report.violations.push_back({"R2", p, q, "post image meets a non-invariant cell"});
  }

  // R5: rank non-increasing along one-step successors (goal cells absorb)
  for (CellId p : inv) {
    if (is_goal(p)) continue;
    for (CellId q : edges.succ.at(p)) {
      if (is_goal(q)) continue;
      if (rank_of(p) < rank_of(q))
        report.violations.push_back({"R5", p, q, "rank increases along a step"});
    }
  }

  // R6: rank strictly decreases within k steps outside the goal
  for (CellId p : inv) {
    if (is_goal(p)) continue;
    std::set<CellId> frontier{p};
    for (unsigned t = 0; t < cert.k; ++t) {
      std::set<CellId> next;
      for (CellId f : frontier) {
        if (is_goal(f)) { next.insert(f); continue; }
        auto it = edges.succ.find(f);
        if (it != edges.succ.end()) next.insert(it->second.begin(), it->second.end());
      }
      frontier = std::move(next);
    }
    for (CellId q : frontier) {
      if (is_goal(q)) continue;
      if (rank_of(p) <= rank_of(q))
        report.violations.push_back(
            {"R6", p, q, "rank fails to decrease within k steps"});
    }
  }
}

} // namespace

CheckReport check_exact_rules(const Problem& problem, const Partition& partition,
                              const Certificate& cert) {
  CheckReport report;
  if (cert.partition_hash != partition.content_hash()) {
    report.violations.push_back(
        {"domain", kOutCell, kOutCell, "certificate bound to a different partition"});
    return report;
  }
  if (cert.controller.input_by_cell.size() != problem.control.size() ||
      cert.ranking.rank_by_cell.size() != problem.control.size()) {
    report.violations.push_back(
        {"domain", kOutCell, kOutCell, "controller or ranking not total on control cells"});
    return report;
  }
  for (size_t u : cert.controller.input_by_cell)
    if (u >= problem.system.num_inputs()) {
      report.violations.push_back({"domain", kOutCell, kOutCell, "input index out of range"});
      return report;
    }
  for (CellId p : cert.invariant_cells)
    if (!partition.live(p)) {
      report.violations.push_back(
          {"domain", p, kOutCell, "invariant references a non-live cell"});
      return report;
    }
  check_rules_on(problem, partition, cert, problem.system, cert.invariant_cells, report);
  return report;
}

SimOutcome simulate(const Problem& problem, const Controller& controller, const Vec& x0,
                    size_t horizon) {
  if (horizon == 0)
    horizon = size_t(problem.k) * problem.effective_max_rank() * problem.control.size();
  SimOutcome out;
  auto in_union = [](const std::vector<Box>& boxes, const Vec& x) {
    for (const auto& b : boxes)
      if (b.contains_point(x)) return true;
    return false;
  };
  Vec x = x0;
  for (size_t t = 0; t <= horizon; ++t) {
    out.trace.push_back(x);
    if (!problem.system.state_space.contains_point(x) || !in_union(problem.safe, x)) {
      out.safe_ok = false;
      out.violation_step = t;
      return out;
    }
    if (!out.goal_step && in_union(problem.goal, x)) {
      out.goal_step = t;
      out.progress_ok = true;
    }
    if (t == horizon) break;
    auto cell = problem.control.find_cell(x);
    if (!cell) {
      out.safe_ok = false;
      out.violation_step = t;
      return out;
    }
    x = step(problem.system, x, controller.input_by_cell.at(*cell));
  }
  return out;
}

ProbeReport probe_robustness(const Problem& problem, const Partition& partition,
                             const Certificate& cert, const PerturbationSpec& spec) {
  ProbeReport report;
  size_t n = problem.system.state_dim();
  size_t nloc = problem.system.locations.size();

  std::vector<std::vector<Vec>> samples; // per sample: one offset per location
  // axis extremes first, applied to every location at once
  for (size_t axis = 0; axis < n; ++axis) {
    for (int sign : {+1, -1}) {
      Vec d(n, Rat(0));
      d[axis] = spec.epsilon * sign;
      samples.push_back(std::vector<Vec>(nloc, d));
    }
  }
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<long> coord(-(1 << 12), 1 << 12);
  for (size_t s = 0; s < spec.samples; ++s) {
    std::vector<Vec> per_loc;
    for (size_t l = 0; l < nloc; ++l) {
      Vec d(n);
      for (size_t i = 0; i < n; ++i)
        d[i] = spec.epsilon * rat_frac(coord(rng), 1 << 12);
      per_loc.push_back(std::move(d));
    }
    samples.push_back(std::move(per_loc));
  }

  CellRoles roles = classify_control_cells(problem);
  auto ctrl = control_map(problem, partition);

  for (size_t s = 0; s < samples.size(); ++s) {
    PiecewiseAffineSystem perturbed = problem.system;
    for (size_t l = 0; l < nloc; ++l)
      perturbed.locations[l].dynamics.c =
          vec_add(perturbed.locations[l].dynamics.c, samples[s][l]);

    // fresh invariant: reach closure of the init cells under the perturbed
    // exact edges
    ExactEdges edges = exact_edges(perturbed, partition, ctrl, cert.controller);
    std::set<CellId> closure;
    std::vector<CellId> work;
    for (CellId p : partition.ids())
      if (roles.init_cells.count(ctrl.at(p))) {
        closure.insert(p);
        work.push_back(p);
      }
    bool escaped = false;
    while (!work.empty()) {
      CellId p = work.back();
      work.pop_back();
      if (edges.escaping.count(p)) { escaped = true; break; }
      for (CellId q : edges.succ.at(p))
        if (closure.insert(q).second) work.push_back(q);
    }

    CheckReport check;
    if (escaped) {
      check.violations.push_back({"R2", kOutCell, kOutCell, "reach closure leaves the state space"});
    } else {
      check_rules_on(problem, partition, cert, perturbed, closure, check);
    }
    ++report.total;
    if (check.ok()) {
      ++report.passed;
    } else if (!report.first_failure) {
      report.first_failure = s;
      report.first_failure_violations = check.violations;
    }
  }
  return report;
}

} // namespace rsyn
