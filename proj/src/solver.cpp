#include "rsyn/solver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <sstream>

namespace rsyn {

const char* solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::sat: return "sat";
    case SolveStatus::unsat: return "unsat";
    case SolveStatus::unknown: return "unknown";
    case SolveStatus::timeout: return "timeout";
    case SolveStatus::crash: return "crash";
    case SolveStatus::config_error: return "config_error";
  }
  return "?";
}

SolverConfig SolverConfig::from_environment() {
  SolverConfig cfg;
  if (const char* env = std::getenv("REACH_SYNTH_SOLVER")) {
    std::istringstream in(env);
    std::string tok;
    std::vector<std::string> parts;
    while (in >> tok) parts.push_back(tok);
    if (!parts.empty()) {
      cfg.executable = parts[0];
      cfg.args.assign(parts.begin() + 1, parts.end());
      if (cfg.args.empty()) cfg.args = {"-in"};
    }
  }
  return cfg;
}

namespace {

void ignore_sigpipe() {
  static bool done = [] {
    struct sigaction sa{};
    sa.sa_handler = SIG_IGN;
    sigaction(SIGPIPE, &sa, nullptr);
    return true;
  }();
  (void)done;
}

struct Pipe {
  int fd[2] = {-1, -1};
  Pipe() {
    if (pipe(fd) != 0) throw std::runtime_error("pipe() failed");
  }
  ~Pipe() {
    close_read();
    close_write();
  }
  void close_read() {
    if (fd[0] >= 0) { close(fd[0]); fd[0] = -1; }
  }
  void close_write() {
    if (fd[1] >= 0) { close(fd[1]); fd[1] = -1; }
  }
};

} // namespace

SolverOutcome solve_text(const std::string& smtlib, const SolverConfig& cfg) {
  ignore_sigpipe();
  SolverOutcome out;
  auto started = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
        .count();
  };

  Pipe to_child, from_child, err_child;
  pid_t pid = fork();
  if (pid < 0) {
    out.status = SolveStatus::crash;
    out.stderr_tail = "fork() failed";
    return out;
  }
  if (pid == 0) {
    setpgid(0, 0); // own process group so a timeout kill reaps helpers too
    dup2(to_child.fd[0], STDIN_FILENO);
    dup2(from_child.fd[1], STDOUT_FILENO);
    dup2(err_child.fd[1], STDERR_FILENO);
    to_child.close_read();
    to_child.close_write();
    from_child.close_read();
    from_child.close_write();
    err_child.close_read();
    err_child.close_write();
    if (cfg.memory_mb > 0) {
      rlimit lim{cfg.memory_mb * 1024 * 1024, cfg.memory_mb * 1024 * 1024};
      setrlimit(RLIMIT_AS, &lim);
    }
    std::vector<char*> argv;
    argv.push_back(const_cast<char*>(cfg.executable.c_str()));
    for (const auto& a : cfg.args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    execvp(cfg.executable.c_str(), argv.data());
    _exit(127);
  }

  setpgid(pid, pid); // also from the parent side, closing the race
  to_child.close_read();
  from_child.close_write();
  err_child.close_write();

  // feed the problem; a child that exits early just truncates the write
  size_t written = 0;
  while (written < smtlib.size()) {
    ssize_t n = write(to_child.fd[1], smtlib.data() + written, smtlib.size() - written);
    if (n <= 0) break;
    written += static_cast<size_t>(n);
  }
  to_child.close_write();

  std::string stdout_text, stderr_text;
  bool timed_out = false;
  {
    bool out_open = true, err_open = true;
    char buf[65536];
    while (out_open || err_open) {
      double remain = cfg.timeout_seconds - elapsed();
      if (remain <= 0) { timed_out = true; break; }
      pollfd fds[2];
      nfds_t n = 0;
      if (out_open) fds[n++] = {from_child.fd[0], POLLIN, 0};
      if (err_open) fds[n++] = {err_child.fd[0], POLLIN, 0};
      int rc = poll(fds, n, static_cast<int>(std::min(remain * 1000.0, 1000.0)) + 1);
      if (rc < 0) {
        if (errno == EINTR) continue;
        break;
      }
      if (rc == 0) continue;
      for (nfds_t i = 0; i < n; ++i) {
        if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
        ssize_t got = read(fds[i].fd, buf, sizeof buf);
        bool is_out = fds[i].fd == from_child.fd[0];
        if (got > 0) {
          (is_out ? stdout_text : stderr_text).append(buf, static_cast<size_t>(got));
        } else {
          if (is_out) out_open = false;
          else err_open = false;
        }
      }
    }
  }

  int wstatus = 0;
  if (timed_out) {
    kill(-pid, SIGKILL);
    waitpid(pid, &wstatus, 0);
    out.status = SolveStatus::timeout;
  } else {
    // streams are closed; give the child bounded time to exit
    while (true) {
      pid_t r = waitpid(pid, &wstatus, WNOHANG);
      if (r == pid) break;
      if (elapsed() > cfg.timeout_seconds + 2.0) {
        kill(-pid, SIGKILL);
        waitpid(pid, &wstatus, 0);
        timed_out = true;
        break;
      }
      usleep(2000);
    }
    out.status = timed_out ? SolveStatus::timeout : SolveStatus::crash;
  }
  out.wall_seconds = elapsed();
  if (stderr_text.size() > 2048)
    out.stderr_tail = stderr_text.substr(stderr_text.size() - 2048);
  else
    out.stderr_tail = stderr_text;

  if (out.status == SolveStatus::timeout) return out;

  if (WIFEXITED(wstatus) && WEXITSTATUS(wstatus) == 127 && stdout_text.empty()) {
    out.status = SolveStatus::config_error;
    out.stderr_tail = "solver executable not found or not runnable: " + cfg.executable;
    return out;
  }

  // first token line decides the verdict; the rest is the model
  std::istringstream lines(stdout_text);
  std::string line;
  std::string verdict;
  std::string after;
  while (std::getline(lines, line)) {
    std::string trimmed;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) trimmed += c;
    if (trimmed.empty()) continue;
    if (verdict.empty()) {
      verdict = trimmed;
      continue;
    }
    after += line + "\n";
  }
  if (verdict == "sat") {
    out.status = SolveStatus::sat;
    out.model_text = after;
  } else if (verdict == "unsat") {
    out.status = SolveStatus::unsat;
  } else if (verdict == "unknown") {
    out.status = SolveStatus::unknown;
  } else {
    out.status = SolveStatus::crash;
    out.stderr_tail += "\nunparseable solver output: " +
                       stdout_text.substr(0, std::min<size_t>(stdout_text.size(), 512));
  }
  return out;
}

SolverOutcome solve(const EncodedProblem& encoded, const SolverConfig& cfg) {
  return solve_text(encoded.smtlib, cfg);
}

namespace {

struct RankEdges {
  // per control cell: weak (>=) and strict (>) targets
  std::vector<std::set<CellId>> weak, strict;
};

} // namespace

bool rank_assignment_exists(const Problem& problem, const Partition& partition,
                            const SuccessorTable& table, Variant variant, unsigned k,
                            const Controller& controller, const std::set<CellId>& members,
                            RankingFunction* out) {
  (void)partition;
  CellRoles control_roles = classify_control_cells(problem);
  CellRoles cell_roles = lift_roles(control_roles, table.cell_control);
  unsigned max_rank = problem.effective_max_rank();
  size_t ncells = problem.control.size();

  std::map<CellId, size_t> choice;
  for (const auto& [p, c] : table.cell_control)
    choice[p] = controller.input_by_cell.at(c);

  auto rank_side_row = [&](CellId p, size_t u) -> const std::vector<CellId>& {
    const auto& row = table.row(p, u);
    return variant == Variant::weakened ? row.under : row.over;
  };

  RankEdges edges;
  edges.weak.assign(ncells, {});
  edges.strict.assign(ncells, {});
  for (CellId p : members) {
    if (cell_roles.goal_cells.count(p)) continue; // absorbing
    CellId cp = table.cell_control.at(p);
    for (CellId q : rank_side_row(p, choice.at(p))) {
      if (q == kOutCell || cell_roles.goal_cells.count(q)) continue;
      CellId cq = table.cell_control.at(q);
      if (cq != cp) edges.weak[cp].insert(cq);
    }
    std::set<CellId> targets;
    {
      std::set<CellId> frontier{p};
      for (unsigned t = 0; t < k; ++t) {
        std::set<CellId> next;
        for (CellId f : frontier) {
          if (f == kOutCell || cell_roles.goal_cells.count(f)) {
            next.insert(f);
            continue;
          }
          const auto& row = rank_side_row(f, choice.at(f));
          next.insert(row.begin(), row.end());
        }
        frontier = std::move(next);
      }
      targets = std::move(frontier);
    }
    for (CellId q : targets) {
      if (q == kOutCell || cell_roles.goal_cells.count(q)) continue;
      edges.strict[cp].insert(table.cell_control.at(q));
    }
  }

  // longest-path layering; divergence past max_rank means an unsatisfiable
  // cycle of obligations
  std::vector<long> value(ncells, 0);
  const auto& ids = problem.control.ids();
  for (size_t i = 0; i < ids.size(); ++i)
    value[ids[i]] = control_roles.goal_cells.count(ids[i]) ? 0 : 1;
  for (CellId c : ids)
    if (!control_roles.goal_cells.count(c) && value[c] > long(max_rank)) return false;

  bool changed = true;
  size_t rounds = 0;
  while (changed) {
    changed = false;
    if (++rounds > ncells + 2) { /* keep iterating; bound enforced below */ }
    for (CellId c : ids) {
      if (control_roles.goal_cells.count(c)) continue;
      long best = 1;
      for (CellId q : edges.weak[c]) best = std::max(best, value[q]);
      for (CellId q : edges.strict[c]) best = std::max(best, value[q] + 1);
      if (best > value[c]) {
        value[c] = best;
        if (value[c] > long(max_rank)) return false;
        changed = true;
      }
    }
  }
  // strict self-loops never stabilize below the bound, so reaching here
  // means the assignment is valid; goal cells were never raised above 0
  for (CellId c : ids) {
    if (!control_roles.goal_cells.count(c)) continue;
    if (!edges.weak[c].empty() || !edges.strict[c].empty()) return false;
  }
  if (out) {
    out->rank_by_cell.assign(ncells, 0);
    for (CellId c : ids) out->rank_by_cell[c] = static_cast<unsigned>(value[c]);
    out->max_rank = max_rank;
  }
  return true;
}

OracleResult brute_force(const Problem& problem, const Partition& partition,
                         const SuccessorTable& table, Variant variant, unsigned k) {
  size_t ncells = problem.control.size();
  size_t ninputs = problem.system.num_inputs();
  if (ncells > 12 || ninputs > 4)
    throw BudgetExceeded("brute_force: budget is |C| <= 12 and |U| <= 4");
  double combos = std::pow(double(ninputs), double(ncells));
  if (combos > double(1 << 24))
    throw BudgetExceeded("brute_force: too many controller tables");

  CellRoles control_roles = classify_control_cells(problem);
  CellRoles cell_roles = lift_roles(control_roles, table.cell_control);

  const auto& control_ids = problem.control.ids();
  std::vector<size_t> assignment(ncells, 0);
  OracleResult result;

  auto side_row = [&](CellId p, size_t u) -> const std::vector<CellId>& {
    const auto& row = table.row(p, u);
    return variant == Variant::strengthened ? row.over : row.under;
  };

  while (true) {
    ++result.controllers_tried;
    Controller controller;
    controller.input_by_cell.assign(ncells, 0);
    for (size_t i = 0; i < control_ids.size(); ++i)
      controller.input_by_cell[control_ids[i]] = assignment[i];

    // membership least fixed point from the init cells
    bool viable = true;
    std::set<CellId> members;
    std::vector<CellId> work(cell_roles.init_cells.begin(), cell_roles.init_cells.end());
    members.insert(work.begin(), work.end());
    while (!work.empty() && viable) {
      CellId p = work.back();
      work.pop_back();
      if (cell_roles.unsafe_cells.count(p)) { viable = false; break; }
      size_t u = controller.input_by_cell[table.cell_control.at(p)];
      if (variant != Variant::weakened) {
        const auto& over_row = table.row(p, u).over;
        if (!over_row.empty() && over_row.back() == kOutCell) { viable = false; break; }
      }
      for (CellId q : side_row(p, u)) {
        if (q == kOutCell) { viable = false; break; }
        if (members.insert(q).second) work.push_back(q);
      }
    }
    if (viable) {
      for (CellId p : members)
        if (cell_roles.unsafe_cells.count(p)) { viable = false; break; }
    }
    if (viable) {
      RankingFunction ranking;
      if (rank_assignment_exists(problem, partition, table, variant, k, controller,
                                 members, &ranking)) {
        result.sat = true;
        result.witness = OracleWitness{controller, ranking, members};
        return result;
      }
    }

    // next assignment in lexicographic order
    size_t pos = 0;
    while (pos < ncells && ++assignment[pos] == ninputs) {
      assignment[pos] = 0;
      ++pos;
    }
    if (pos == ncells) break;
  }
  return result;
}

} // namespace rsyn
