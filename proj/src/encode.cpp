#include "rsyn/encode.hpp"

#include <algorithm>
#include <sstream>

#include "rsyn/polyset.hpp"
#include "rsyn/problem_io.hpp"

namespace rsyn {

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::exact: return "exact";
    case Variant::weakened: return "weakened";
    case Variant::strengthened: return "strengthened";
  }
  return "?";
}

Variant variant_from_name(const std::string& name) {
  if (name == "exact") return Variant::exact;
  if (name == "weakened" || name == "weak") return Variant::weakened;
  if (name == "strengthened" || name == "strong") return Variant::strengthened;
  throw std::invalid_argument("unknown variant: " + name);
}

namespace {

std::uint64_t fnv1a_str(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

struct Ctx {
  const Problem& problem;
  const Partition& partition;
  const SuccessorTable& table;
  Variant variant;
  CellRoles control_roles;
  CellRoles cell_roles; // lifted to partition cells

  CellId control_of(CellId p) const { return table.cell_control.at(p); }
  bool goal_cell(CellId p) const { return cell_roles.goal_cells.count(p) > 0; }
  bool unsafe_cell(CellId p) const { return cell_roles.unsafe_cells.count(p) > 0; }
  const std::vector<CellId>& side_row(CellId p, size_t u) const {
    const auto& row = table.row(p, u);
    return variant == Variant::strengthened ? row.over : row.under;
  }
  // edge relation for the rank rules: over rows for strengthened and exact
  // (closed-set "pst ∩ C' != empty"), under rows for weakened
  const std::vector<CellId>& rank_row(CellId p, size_t u) const {
    const auto& row = table.row(p, u);
    return variant == Variant::weakened ? row.under : row.over;
  }
};

std::string sel(CellId c) { return "u_" + std::to_string(c); }
std::string rnk(CellId c) { return "v_" + std::to_string(c); }
std::string mem(CellId p) { return "m_" + std::to_string(p); }

std::string guard_of(CellId p, const std::vector<std::pair<CellId, size_t>>& selectors) {
  std::ostringstream g;
  g << "(and " << mem(p);
  for (auto& [c, i] : selectors) g << " (= " << sel(c) << " " << i << ")";
  g << ")";
  return g.str();
}

// guarded k-step paths through the rank relation; absorbed paths (goal or
// OUT before or at the horizon) are dropped as trivially satisfied
struct RankPath {
  std::vector<std::pair<CellId, size_t>> selectors; // (control cell, input)
  CellId target;
};

void extend_paths(const Ctx& ctx, CellId current, unsigned depth, unsigned k,
                  std::vector<std::pair<CellId, size_t>>& selectors,
                  std::vector<RankPath>& out) {
  if (depth == k) {
    if (!ctx.goal_cell(current) && current != kOutCell)
      out.push_back({selectors, current});
    return;
  }
  if (ctx.goal_cell(current) || current == kOutCell) return; // absorbed
  CellId c = ctx.control_of(current);
  for (size_t u = 0; u < ctx.table.num_inputs; ++u) {
    // drop paths whose selector guards contradict
    bool clash = false;
    for (auto& [pc, pu] : selectors)
      if (pc == c && pu != u) { clash = true; break; }
    if (clash) continue;
    bool fresh = std::none_of(selectors.begin(), selectors.end(),
                              [&](const auto& s) { return s.first == c; });
    if (fresh) selectors.push_back({c, u});
    for (CellId q : ctx.rank_row(current, u))
      extend_paths(ctx, q, depth + 1, k, selectors, out);
    if (fresh) selectors.pop_back();
  }
  (void)depth;
}

class Emitter {
public:
  void assert_line(const std::string& body) {
    lines_.push_back("(assert " + body + ")");
  }
  size_t count() const { return lines_.size(); }
  const std::vector<std::string>& lines() const { return lines_; }

private:
  std::vector<std::string> lines_;
};

// Closed-form assertion count from the table shape: domains and rank signs
// per control cell, one assert per init and per unsafe cell, one per
// nonempty closure group, one per nontrivial rank-5 group, one per rank-6
// guard group.
size_t predict_assertion_count(const Ctx& ctx, const Problem& problem) {
  size_t count = 3 * problem.control.size();
  size_t num_inputs = ctx.table.num_inputs;
  for (const auto& [p, per_input] : ctx.table.rows) {
    if (ctx.cell_roles.init_cells.count(p)) count += 1;
    if (ctx.unsafe_cell(p)) count += 1;
    for (size_t u = 0; u < num_inputs; ++u) {
      const auto& over_row = per_input[u].over;
      bool escapes = ctx.variant != Variant::weakened && !over_row.empty() &&
                     over_row.back() == kOutCell;
      if (escapes || !ctx.side_row(p, u).empty()) count += 1;
    }
    if (ctx.goal_cell(p)) continue;
    CellId cp = ctx.control_of(p);
    for (size_t u = 0; u < num_inputs; ++u) {
      bool nontrivial = false;
      for (CellId q : ctx.rank_row(p, u)) {
        if (q == kOutCell || ctx.goal_cell(q)) continue;
        if (ctx.control_of(q) != cp) { nontrivial = true; break; }
      }
      if (nontrivial) count += 1;
    }
    std::vector<RankPath> paths;
    std::vector<std::pair<CellId, size_t>> selectors;
    extend_paths(ctx, p, 0, problem.k, selectors, paths);
    std::set<std::vector<std::pair<CellId, size_t>>> guards;
    for (const auto& path : paths) guards.insert(path.selectors);
    count += guards.size();
  }
  return count;
}

EncodedProblem encode(const Problem& problem, const Partition& partition,
                      const SuccessorTable& table, Variant variant) {
  if (problem.k > 3)
    throw EncodingError(
        "k > 3 is refused: the k-step rules are expanded by path enumeration and "
        "grow combinatorially; pick k in 1..3");
  if (table.partition_hash != partition.content_hash())
    throw EncodingError("successor table was built for a different partition");

  Ctx ctx{problem, partition, table, variant, classify_control_cells(problem), {}};
  ctx.cell_roles = lift_roles(ctx.control_roles, table.cell_control);

  const auto& control_ids = problem.control.ids();
  size_t num_inputs = table.num_inputs;
  unsigned max_rank = problem.effective_max_rank();
  unsigned k = problem.k;

  // exact variant: verify cell-union alignment of every non-escaping image
  if (variant == Variant::exact) {
    for (const auto& [p, per_input] : table.rows) {
      for (size_t u = 0; u < num_inputs; ++u) {
        const auto& row = per_input[u];
        if (!row.over.empty() && row.over.back() == kOutCell) continue;
        SplitPost sp = exact_post(problem.system, partition.cell(p), u);
        std::vector<Box> image_boxes;
        for (auto& [sub, image] : sp.pieces) {
          auto ib = image.as_box();
          if (!ib)
            throw EncodingError("exact encoding rejected: post image of cell " +
                                std::to_string(p) + " under input " + std::to_string(u) +
                                " is not axis-aligned; use the weakened/strengthened pair");
          image_boxes.push_back(std::move(*ib));
        }
        std::vector<Box> under_boxes;
        for (CellId q : row.under) under_boxes.push_back(partition.cell(q));
        if (!union_subset(image_boxes, under_boxes))
          throw EncodingError("exact encoding rejected: post image of cell " +
                              std::to_string(p) + " under input " + std::to_string(u) +
                              " is not a union of cells; use the weakened/strengthened pair");
      }
    }
  }

  Emitter em;

  // selector and rank domains, rank-zero-iff-goal
  for (CellId c : control_ids)
    em.assert_line("(and (<= 0 " + sel(c) + ") (< " + sel(c) + " " +
                   std::to_string(num_inputs) + "))");
  for (CellId c : control_ids)
    em.assert_line("(and (<= 0 " + rnk(c) + ") (<= " + rnk(c) + " " +
                   std::to_string(max_rank) + "))");
  for (CellId c : control_ids)
    em.assert_line(ctx.control_roles.goal_cells.count(c) ? "(= " + rnk(c) + " 0)"
                                                         : "(> " + rnk(c) + " 0)");

  // rule 1: init cells are members
  for (const auto& [p, _] : table.rows)
    if (ctx.cell_roles.init_cells.count(p)) em.assert_line(mem(p));

  // rule 3: members are safe (the OUT pseudo-cell is permanently unsafe and
  // is encoded by forbidding edges into it below)
  for (const auto& [p, _] : table.rows)
    if (ctx.unsafe_cell(p)) em.assert_line("(not " + mem(p) + ")");

  // rule 2: membership closed under the side successor relation. Escaping
  // images forbid the (member, input) combination outright: OUT is
  // permanently outside the invariant. The weakened rules use under sets,
  // which never see the escape.
  for (const auto& [p, per_input] : table.rows) {
    for (size_t u = 0; u < num_inputs; ++u) {
      const auto& over_row = per_input[u].over;
      bool escapes = variant != Variant::weakened && !over_row.empty() &&
                     over_row.back() == kOutCell;
      std::string guard = guard_of(p, {{ctx.control_of(p), u}});
      if (escapes) {
        em.assert_line("(not " + guard + ")");
        continue;
      }
      const auto& succ = ctx.side_row(p, u);
      if (succ.empty()) continue;
      std::ostringstream body;
      if (succ.size() == 1) {
        body << mem(succ[0]);
      } else {
        body << "(and";
        for (CellId q : succ) body << " " << mem(q);
        body << ")";
      }
      em.assert_line("(=> " + guard + " " + body.str() + ")");
    }
  }

  // rule 5: ranks non-increasing along one-step successors of member cells;
  // goal cells are absorbing, so they source no rank edges
  for (const auto& [p, per_input] : table.rows) {
    if (ctx.goal_cell(p)) continue;
    CellId cp = ctx.control_of(p);
    for (size_t u = 0; u < num_inputs; ++u) {
      std::vector<std::string> comps;
      for (CellId q : ctx.rank_row(p, u)) {
        if (q == kOutCell || ctx.goal_cell(q)) continue; // edge into goal is trivial
        CellId cq = ctx.control_of(q);
        if (cq == cp) continue;
        comps.push_back("(>= " + rnk(cp) + " " + rnk(cq) + ")");
      }
      if (comps.empty()) continue;
      std::sort(comps.begin(), comps.end());
      comps.erase(std::unique(comps.begin(), comps.end()), comps.end());
      std::string guard = guard_of(p, {{cp, u}});
      std::string body =
          comps.size() == 1 ? comps[0] : [&] {
            std::string s = "(and";
            for (auto& c : comps) s += " " + c;
            return s + ")";
          }();
      em.assert_line("(=> " + guard + " " + body + ")");
    }
  }

  // rule 6: ranks strictly decrease along k-step successors of non-goal
  // member cells; paths sharing a selector guard are emitted as one assert
  for (const auto& [p, per_input] : table.rows) {
    if (ctx.goal_cell(p)) continue;
    CellId cp = ctx.control_of(p);
    std::vector<RankPath> paths;
    std::vector<std::pair<CellId, size_t>> selectors;
    extend_paths(ctx, p, 0, k, selectors, paths);
    std::map<std::vector<std::pair<CellId, size_t>>, std::set<CellId>> groups;
    for (const auto& path : paths) groups[path.selectors].insert(ctx.control_of(path.target));
    for (const auto& [guard_sels, targets] : groups) {
      std::vector<std::string> comps;
      for (CellId cq : targets) comps.push_back("(> " + rnk(cp) + " " + rnk(cq) + ")");
      std::string body =
          comps.size() == 1 ? comps[0] : [&] {
            std::string s = "(and";
            for (auto& c : comps) s += " " + c;
            return s + ")";
          }();
      em.assert_line("(=> " + guard_of(p, guard_sels) + " " + body + ")");
    }
  }

  size_t predicted = predict_assertion_count(ctx, problem);

  EncodedProblem out;
  out.variant = variant;
  out.k = k;
  out.assertion_count = em.count();
  out.predicted_assertions = predicted;
  out.problem_hash = problem_hash(problem);

  for (CellId c : control_ids) {
    out.decode_map[sel(c)] = {DecodeInfo::input_selector, c};
    out.decode_map[rnk(c)] = {DecodeInfo::rank, c};
  }
  for (const auto& [p, _] : table.rows) out.decode_map[mem(p)] = {DecodeInfo::member, p};

  std::ostringstream text;
  text << "; reach-synth encoding\n"
       << "; problem: " << hash_hex(out.problem_hash) << "\n"
       << "; variant: " << variant_name(variant) << "\n"
       << "; control-cells: " << control_ids.size()
       << " partition-cells: " << table.rows.size() << " inputs: " << num_inputs
       << " k: " << k << "\n"
       << "; assertions: " << out.assertion_count
       << " predicted: " << out.predicted_assertions << "\n"
       << "(set-logic QF_LIA)\n"
       << "(set-option :produce-models true)\n";
  for (CellId c : control_ids) text << "(declare-const " << sel(c) << " Int)\n";
  for (CellId c : control_ids) text << "(declare-const " << rnk(c) << " Int)\n";
  for (const auto& [p, _] : table.rows)
    text << "(declare-const " << mem(p) << " Bool)\n";
  for (const auto& line : em.lines()) text << line << "\n";
  text << "(check-sat)\n(get-model)\n";
  out.smtlib = text.str();
  out.text_hash = fnv1a_str(out.smtlib);
  return out;
}

} // namespace

EncodedProblem encode_weakened(const Problem& problem, const Partition& partition,
                               const SuccessorTable& table) {
  return encode(problem, partition, table, Variant::weakened);
}

EncodedProblem encode_strengthened(const Problem& problem, const Partition& partition,
                                   const SuccessorTable& table) {
  return encode(problem, partition, table, Variant::strengthened);
}

EncodedProblem encode_exact(const Problem& problem, const Partition& partition,
                            const SuccessorTable& table) {
  return encode(problem, partition, table, Variant::exact);
}

namespace {

// minimal s-expression reader for solver models
struct SExpr {
  std::string atom;
  std::vector<SExpr> list;
  bool is_atom() const { return list.empty() && !atom.empty(); }
};

size_t parse_sexpr(const std::string& s, size_t pos, SExpr& out) {
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  if (pos >= s.size()) return pos;
  if (s[pos] == '(') {
    ++pos;
    while (true) {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
      if (pos >= s.size()) return pos;
      if (s[pos] == ')') return pos + 1;
      SExpr child;
      pos = parse_sexpr(s, pos, child);
      out.list.push_back(std::move(child));
    }
  }
  size_t start = pos;
  while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) &&
         s[pos] != '(' && s[pos] != ')')
    ++pos;
  out.atom = s.substr(start, pos - start);
  return pos;
}

void collect_define_funs(const SExpr& e, std::map<std::string, long>& ints,
                         std::map<std::string, bool>& bools) {
  if (e.list.size() >= 5 && e.list[0].is_atom() && e.list[0].atom == "define-fun") {
    const std::string& name = e.list[1].atom;
    const SExpr& value = e.list.back();
    if (value.is_atom()) {
      if (value.atom == "true")
        bools[name] = true;
      else if (value.atom == "false")
        bools[name] = false;
      else
        ints[name] = std::stol(value.atom);
    } else if (value.list.size() == 2 && value.list[0].atom == "-") {
      ints[name] = -std::stol(value.list[1].atom);
    }
    return;
  }
  for (const auto& child : e.list) collect_define_funs(child, ints, bools);
}

} // namespace

DecodedModel decode_model(const EncodedProblem& encoded, const Problem& problem,
                          const std::string& model_text) {
  SExpr root;
  size_t pos = 0;
  // the model may be a bare paren list, possibly preceded by a "sat" line
  std::string text = model_text;
  auto first_paren = text.find('(');
  if (first_paren == std::string::npos)
    throw EncodingError("decode: no model in solver output");
  pos = first_paren;
  std::map<std::string, long> ints;
  std::map<std::string, bool> bools;
  while (pos < text.size()) {
    SExpr e;
    size_t next = parse_sexpr(text, pos, e);
    if (next == pos) break;
    pos = next;
    collect_define_funs(e, ints, bools);
    while (pos < text.size() && text[pos] != '(') ++pos;
  }

  DecodedModel out;
  out.controller.input_by_cell.assign(problem.control.size(), 0);
  out.ranking.rank_by_cell.assign(problem.control.size(), 0);
  out.ranking.max_rank = problem.effective_max_rank();

  // control cell ids are dense (the control partition is never refined)
  for (const auto& [name, info] : encoded.decode_map) {
    switch (info.kind) {
      case DecodeInfo::input_selector: {
        auto it = ints.find(name);
        if (it == ints.end())
          throw EncodingError("decode: missing assignment for " + name);
        if (it->second < 0 ||
            static_cast<size_t>(it->second) >= problem.system.num_inputs())
          throw EncodingError("decode: selector out of range for " + name);
        out.controller.input_by_cell.at(info.cell) = static_cast<size_t>(it->second);
        break;
      }
      case DecodeInfo::rank: {
        auto it = ints.find(name);
        if (it == ints.end())
          throw EncodingError("decode: missing assignment for " + name);
        if (it->second < 0)
          throw EncodingError("decode: negative rank for " + name);
        out.ranking.rank_by_cell.at(info.cell) = static_cast<unsigned>(it->second);
        break;
      }
      case DecodeInfo::member: {
        auto it = bools.find(name);
        if (it == bools.end())
          throw EncodingError("decode: missing assignment for " + name);
        if (it->second) out.members.insert(info.cell);
        break;
      }
    }
  }
  return out;
}

Certificate make_certificate(const DecodedModel& model, Variant variant, unsigned k,
                             const Partition& partition) {
  Certificate cert;
  cert.controller = model.controller;
  cert.ranking = model.ranking;
  cert.invariant_cells = model.members;
  cert.variant = variant;
  cert.k = k;
  cert.partition_hash = partition.content_hash();
  return cert;
}

} // namespace rsyn
