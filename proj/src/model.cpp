#include "rsyn/model.hpp"

#include <map>
#include <stdexcept>

#include "rsyn/polyset.hpp"

namespace rsyn {

size_t locate(const PiecewiseAffineSystem& sys, const Vec& x) {
  if (!sys.state_space.contains_point(x))
    throw std::domain_error("locate: state outside the state space");
  for (size_t l = 0; l < sys.locations.size(); ++l)
    if (sys.locations[l].invariant.contains_point(x)) return l;
  throw std::logic_error("locate: invariants do not cover the state space");
}

Vec step(const PiecewiseAffineSystem& sys, const Vec& x, size_t input_index) {
  if (input_index >= sys.input_points.size())
    throw std::out_of_range("step: input index out of range");
  size_t l = locate(sys, x);
  const AffineDynamics& f = sys.locations[l].dynamics;
  Vec next = mat_vec(f.a, x);
  const Vec& u = sys.input_points[input_index];
  for (size_t i = 0; i < next.size(); ++i) {
    Rat acc(0);
    for (size_t j = 0; j < u.size(); ++j) acc += f.b[i][j] * u[j];
    next[i] += acc + f.c[i];
  }
  return next;
}

namespace {

void check_dynamics_shape(const PiecewiseAffineSystem& sys, size_t loc,
                          std::vector<std::string>& out) {
  const auto& f = sys.locations[loc].dynamics;
  size_t n = sys.state_dim(), m = sys.input_dim();
  auto bad = [&](const std::string& what) {
    out.push_back("location " + std::to_string(loc) + ": " + what);
  };
  if (f.a.size() != n) bad("A has wrong row count");
  for (const auto& row : f.a)
    if (row.size() != n) { bad("A has wrong column count"); break; }
  if (f.b.size() != n) bad("B has wrong row count");
  for (const auto& row : f.b)
    if (row.size() != m) { bad("B has wrong column count"); break; }
  if (f.c.size() != n) bad("c has wrong length");
}

} // namespace

std::vector<std::string> validate(const Problem& problem) {
  std::vector<std::string> out;
  const auto& sys = problem.system;
  size_t n = sys.state_dim();

  if (problem.k < 1) out.push_back("k must be at least 1");

  if (sys.locations.empty()) out.push_back("system has no locations");
  for (size_t l = 0; l < sys.locations.size(); ++l) {
    if (sys.locations[l].invariant.dim() != n)
      out.push_back("location " + std::to_string(l) + ": invariant dimension mismatch");
    else
      check_dynamics_shape(sys, l, out);
  }

  // location invariants partition the state space
  {
    Rat vol(0);
    bool dims_ok = true;
    for (const auto& loc : sys.locations) {
      if (loc.invariant.dim() != n) { dims_ok = false; break; }
      if (!sys.state_space.contains_box(loc.invariant))
        out.push_back("location invariant leaves the state space");
      vol += loc.invariant.volume();
    }
    if (dims_ok) {
      for (size_t i = 0; i < sys.locations.size() && dims_ok; ++i)
        for (size_t j = i + 1; j < sys.locations.size(); ++j)
          if (sys.locations[i].invariant.interior_intersects_box(sys.locations[j].invariant)) {
            out.push_back("location invariants " + std::to_string(i) + " and " +
                          std::to_string(j) + " overlap");
            dims_ok = false;
            break;
          }
      if (dims_ok && vol != sys.state_space.volume())
        out.push_back("location invariants do not cover the state space");
    }
  }

  if (sys.input_points.empty()) out.push_back("no input points");
  for (size_t i = 0; i < sys.input_points.size(); ++i) {
    if (sys.input_points[i].size() != sys.input_dim())
      out.push_back("input " + std::to_string(i) + ": dimension mismatch");
    else if (!sys.input_space.contains_point(sys.input_points[i]))
      out.push_back("input " + std::to_string(i) + ": outside the declared input box");
  }

  if (!(problem.control.domain() == sys.state_space))
    out.push_back("control partition domain differs from the state space");

  auto check_set = [&](const std::vector<Box>& s, const std::string& name) {
    for (const auto& b : s)
      if (b.dim() != n) {
        out.push_back(name + ": box dimension mismatch");
        return false;
      }
    return true;
  };
  bool sets_ok = check_set(problem.init, "init") && check_set(problem.safe, "safe") &&
                 check_set(problem.goal, "goal");
  if (!sets_ok || !out.empty()) return out;

  auto check_aligned = [&](const std::vector<Box>& s, const std::string& name) {
    if (!preserves(problem.control, s)) {
      for (CellId id : problem.control.ids()) {
        const Box& cell = problem.control.cell(id);
        bool touches = false;
        for (const auto& m : s)
          if (cell.interior_intersects_box(m)) { touches = true; break; }
        if (touches && !box_covered_by_union(cell, s))
          out.push_back(name + " is not a union of control cells: cell " +
                        std::to_string(id) + " straddles it");
      }
      if (out.empty())
        out.push_back(name + " is not preserved by the control partition");
    }
  };
  check_aligned(problem.init, "init");
  check_aligned(problem.safe, "safe");
  check_aligned(problem.goal, "goal");

  std::vector<Box> invariants;
  for (const auto& loc : sys.locations) invariants.push_back(loc.invariant);
  for (CellId id : problem.control.ids()) {
    const Box& cell = problem.control.cell(id);
    bool inside_one = false;
    for (const auto& inv : invariants)
      if (inv.contains_box(cell)) { inside_one = true; break; }
    if (!inside_one)
      out.push_back("control cell " + std::to_string(id) +
                    " straddles a location boundary");
  }

  if (!problem.init.empty() && !union_subset(problem.init, problem.safe))
    out.push_back("init is not contained in safe");
  if (!problem.goal.empty() && !union_subset(problem.goal, problem.safe))
    out.push_back("goal is not contained in safe");
  for (const auto& b : problem.init)
    if (!sys.state_space.contains_box(b))
      out.push_back("init leaves the state space");
  for (const auto& b : problem.safe)
    if (!sys.state_space.contains_box(b))
      out.push_back("safe leaves the state space");
  if (problem.init.empty()) out.push_back("init is empty");
  if (problem.goal.empty()) out.push_back("goal is empty");

  return out;
}

CellRoles classify_control_cells(const Problem& problem) {
  CellRoles roles;
  for (CellId id : problem.control.ids()) {
    const Box& cell = problem.control.cell(id);
    if (box_covered_by_union(cell, problem.init)) roles.init_cells.insert(id);
    if (box_covered_by_union(cell, problem.goal)) roles.goal_cells.insert(id);
    if (!box_covered_by_union(cell, problem.safe)) roles.unsafe_cells.insert(id);
  }
  return roles;
}

CellRoles lift_roles(const CellRoles& control_roles,
                     const std::map<CellId, CellId>& cell_control) {
  CellRoles out;
  for (const auto& [cell, ctrl] : cell_control) {
    if (control_roles.init_cells.count(ctrl)) out.init_cells.insert(cell);
    if (control_roles.goal_cells.count(ctrl)) out.goal_cells.insert(cell);
    if (control_roles.unsafe_cells.count(ctrl)) out.unsafe_cells.insert(cell);
  }
  return out;
}

} // namespace rsyn
