#include "rsyn/problem_io.hpp"

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

namespace rsyn {

using nlohmann::json;

namespace {

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (const auto& q : v) a.push_back(rat_str(q));
  return a;
}

Vec vec_from_json(const json& j) {
  Vec v;
  for (const auto& e : j) v.push_back(rat_parse(e.get<std::string>()));
  return v;
}

json mat_to_json(const Mat& m) {
  json a = json::array();
  for (const auto& row : m) a.push_back(vec_to_json(row));
  return a;
}

Mat mat_from_json(const json& j) {
  Mat m;
  for (const auto& row : j) m.push_back(vec_from_json(row));
  return m;
}

json boxes_to_json(const std::vector<Box>& bs) {
  json a = json::array();
  for (const auto& b : bs) a.push_back(box_to_json(b));
  return a;
}

std::vector<Box> boxes_from_json(const json& j) {
  std::vector<Box> bs;
  for (const auto& e : j) bs.push_back(box_from_json(e));
  return bs;
}

std::uint64_t fnv1a_str(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

} // namespace

json box_to_json(const Box& b) {
  return json{{"lo", vec_to_json(b.lo)}, {"hi", vec_to_json(b.hi)}};
}

Box box_from_json(const json& j) {
  return Box(vec_from_json(j.at("lo")), vec_from_json(j.at("hi")));
}

json problem_to_json(const Problem& problem) {
  const auto& sys = problem.system;
  json locations = json::array();
  for (const auto& loc : sys.locations)
    locations.push_back(json{{"invariant", box_to_json(loc.invariant)},
                             {"A", mat_to_json(loc.dynamics.a)},
                             {"B", mat_to_json(loc.dynamics.b)},
                             {"c", vec_to_json(loc.dynamics.c)}});
  json inputs = json::array();
  for (const auto& u : sys.input_points) inputs.push_back(vec_to_json(u));
  json control = json::array();
  for (CellId id : problem.control.ids())
    control.push_back(box_to_json(problem.control.cell(id)));
  return json{{"format", kProblemFormat},
              {"system", json{{"state_space", box_to_json(sys.state_space)},
                              {"input_space", box_to_json(sys.input_space)},
                              {"inputs", inputs},
                              {"locations", locations}}},
              {"control_cells", control},
              {"init", boxes_to_json(problem.init)},
              {"safe", boxes_to_json(problem.safe)},
              {"goal", boxes_to_json(problem.goal)},
              {"k", problem.k},
              {"max_rank", problem.max_rank}};
}

Problem problem_from_json(const json& j) {
  if (j.at("format").get<std::string>() != kProblemFormat)
    throw std::invalid_argument("problem: unsupported format field");
  const json& sysj = j.at("system");
  PiecewiseAffineSystem sys;
  sys.state_space = box_from_json(sysj.at("state_space"));
  sys.input_space = box_from_json(sysj.at("input_space"));
  for (const auto& u : sysj.at("inputs")) sys.input_points.push_back(vec_from_json(u));
  for (const auto& locj : sysj.at("locations")) {
    Location loc;
    loc.invariant = box_from_json(locj.at("invariant"));
    loc.dynamics.a = mat_from_json(locj.at("A"));
    loc.dynamics.b = mat_from_json(locj.at("B"));
    loc.dynamics.c = vec_from_json(locj.at("c"));
    sys.locations.push_back(std::move(loc));
  }
  std::vector<Box> cells = boxes_from_json(j.at("control_cells"));
  Problem problem{std::move(sys),
                  Partition(box_from_json(sysj.at("state_space")), std::move(cells)),
                  boxes_from_json(j.at("init")),
                  boxes_from_json(j.at("safe")),
                  boxes_from_json(j.at("goal")),
                  j.at("k").get<unsigned>(),
                  j.value("max_rank", 0u)};
  return problem;
}

Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open problem file: " + path);
  json j;
  in >> j;
  return problem_from_json(j);
}

void save_problem(const Problem& problem, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write problem file: " + path);
  out << problem_to_json(problem).dump(2) << "\n";
}

std::uint64_t problem_hash(const Problem& problem) {
  return fnv1a_str(problem_to_json(problem).dump());
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json partition_to_json(const Partition& p) {
  // full slot table including retired cells, so ids and lineage survive a
  // round trip
  json slots = json::array();
  for (CellId id = 0; id < p.id_bound(); ++id) {
    const Box& b = p.cell_any(id);
    json s = box_to_json(b);
    s["live"] = p.live(id);
    if (auto par = p.parent(id)) s["parent"] = *par;
    slots.push_back(std::move(s));
  }
  return json{{"domain", box_to_json(p.domain())},
              {"slots", slots},
              {"hash", hash_hex(p.content_hash())}};
}

Partition partition_from_json(const json& j) {
  std::vector<Box> boxes;
  std::vector<bool> live;
  std::vector<CellId> parent;
  for (const auto& s : j.at("slots")) {
    boxes.push_back(box_from_json(s));
    live.push_back(s.at("live").get<bool>());
    parent.push_back(s.contains("parent") ? s.at("parent").get<CellId>() : kOutCell);
  }
  return Partition::from_lineage(box_from_json(j.at("domain")), std::move(boxes),
                                 std::move(live), std::move(parent));
}

json certificate_to_json(const Certificate& cert, const Partition& partition,
                         const Problem& problem) {
  json controller = json::array();
  for (size_t u : cert.controller.input_by_cell) controller.push_back(u);
  json ranks = json::array();
  for (unsigned r : cert.ranking.rank_by_cell) ranks.push_back(r);
  json inv = json::array();
  for (CellId id : cert.invariant_cells) inv.push_back(id);
  return json{{"format", kCertificateFormat},
              {"variant", variant_name(cert.variant)},
              {"k", cert.k},
              {"controller", controller},
              {"ranks", ranks},
              {"max_rank", cert.ranking.max_rank},
              {"invariant_cells", inv},
              {"partition", partition_to_json(partition)},
              {"partition_hash", hash_hex(cert.partition_hash)},
              {"problem_hash", hash_hex(problem_hash(problem))}};
}

std::pair<Certificate, Partition> certificate_from_json(const json& j) {
  if (j.at("format").get<std::string>() != kCertificateFormat)
    throw std::invalid_argument("certificate: unsupported format field");
  Certificate cert;
  cert.variant = variant_from_name(j.at("variant").get<std::string>());
  cert.k = j.at("k").get<unsigned>();
  for (const auto& u : j.at("controller"))
    cert.controller.input_by_cell.push_back(u.get<size_t>());
  for (const auto& r : j.at("ranks"))
    cert.ranking.rank_by_cell.push_back(r.get<unsigned>());
  cert.ranking.max_rank = j.at("max_rank").get<unsigned>();
  for (const auto& id : j.at("invariant_cells"))
    cert.invariant_cells.insert(id.get<CellId>());
  Partition partition = partition_from_json(j.at("partition"));
  cert.partition_hash = std::stoull(j.at("partition_hash").get<std::string>(), nullptr, 16);
  if (cert.partition_hash != partition.content_hash())
    throw std::invalid_argument("certificate: partition hash mismatch");
  return {std::move(cert), std::move(partition)};
}

std::uint64_t table_cache_key(const Problem& problem, const Partition& partition) {
  json j{{"problem", problem_to_json(problem)},
         {"partition", hash_hex(partition.content_hash())}};
  return fnv1a_str(j.dump());
}

json table_to_json(const SuccessorTable& table, std::uint64_t key) {
  json rows = json::array();
  for (const auto& [cell, per_input] : table.rows) {
    for (size_t u = 0; u < per_input.size(); ++u) {
      json over = json::array(), under = json::array();
      for (CellId q : per_input[u].over) over.push_back(q);
      for (CellId q : per_input[u].under) under.push_back(q);
      rows.push_back(json{{"cell", cell}, {"input", u}, {"over", over}, {"under", under}});
    }
  }
  json loc = json::object(), ctl = json::object();
  for (const auto& [cell, l] : table.cell_location) loc[std::to_string(cell)] = l;
  for (const auto& [cell, c] : table.cell_control) ctl[std::to_string(cell)] = c;
  return json{{"format", kTableFormat},
              {"key", hash_hex(key)},
              {"partition_hash", hash_hex(table.partition_hash)},
              {"num_inputs", table.num_inputs},
              {"rows", rows},
              {"cell_location", loc},
              {"cell_control", ctl}};
}

SuccessorTable table_from_json(const json& j) {
  if (j.at("format").get<std::string>() != kTableFormat)
    throw std::invalid_argument("table: unsupported format field");
  SuccessorTable table;
  table.partition_hash = std::stoull(j.at("partition_hash").get<std::string>(), nullptr, 16);
  table.num_inputs = j.at("num_inputs").get<size_t>();
  for (const auto& r : j.at("rows")) {
    CellId cell = r.at("cell").get<CellId>();
    size_t input = r.at("input").get<size_t>();
    auto& per_input = table.rows[cell];
    if (per_input.size() < table.num_inputs) per_input.resize(table.num_inputs);
    for (const auto& q : r.at("over")) per_input[input].over.push_back(q.get<CellId>());
    for (const auto& q : r.at("under")) per_input[input].under.push_back(q.get<CellId>());
  }
  for (const auto& [key, val] : j.at("cell_location").items())
    table.cell_location[static_cast<CellId>(std::stoul(key))] = val.get<size_t>();
  for (const auto& [key, val] : j.at("cell_control").items())
    table.cell_control[static_cast<CellId>(std::stoul(key))] = val.get<CellId>();
  return table;
}

std::optional<SuccessorTable> load_cached_table(const std::string& dir,
                                                const Problem& problem,
                                                const Partition& partition) {
  std::uint64_t key = table_cache_key(problem, partition);
  auto path = std::filesystem::path(dir) / (hash_hex(key) + ".table.json");
  std::ifstream in(path);
  if (!in) return std::nullopt;
  json j;
  try {
    in >> j;
    if (j.at("key").get<std::string>() != hash_hex(key)) return std::nullopt;
    SuccessorTable table = table_from_json(j);
    if (table.partition_hash != partition.content_hash()) return std::nullopt;
    return table;
  } catch (...) {
    return std::nullopt;
  }
}

void store_cached_table(const std::string& dir, const Problem& problem,
                        const Partition& partition, const SuccessorTable& table) {
  std::uint64_t key = table_cache_key(problem, partition);
  std::filesystem::create_directories(dir);
  auto path = std::filesystem::path(dir) / (hash_hex(key) + ".table.json");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write table cache: " + path.string());
  out << table_to_json(table, key).dump() << "\n";
}

} // namespace rsyn
