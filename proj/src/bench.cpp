#include "rsyn/bench.hpp"

#include <cmath>
#include <random>

namespace rsyn {

PiecewiseAffineSystem dubins_pwl(const VehicleConfig& cfg) {
  if (cfg.theta_bins < 1 || cfg.v_bins < 1)
    throw std::invalid_argument("dubins_pwl: bins must be at least 1");
  if (cfg.v_edges.size() != cfg.v_bins + 1)
    throw std::invalid_argument("dubins_pwl: v_edges must have v_bins + 1 entries");

  PiecewiseAffineSystem sys;
  Rat v_lo = cfg.v_edges.front(), v_hi = cfg.v_edges.back();
  sys.state_space = Box({cfg.xy.lo[0], cfg.xy.lo[1], v_lo, cfg.theta_lo},
                        {cfg.xy.hi[0], cfg.xy.hi[1], v_hi, cfg.theta_hi});

  Rat alpha_lo = cfg.alphas.front(), alpha_hi = cfg.alphas.front();
  for (const Rat& a : cfg.alphas) {
    alpha_lo = std::min(alpha_lo, a);
    alpha_hi = std::max(alpha_hi, a);
  }
  Rat beta_lo = cfg.betas.front(), beta_hi = cfg.betas.front();
  for (const Rat& b : cfg.betas) {
    beta_lo = std::min(beta_lo, b);
    beta_hi = std::max(beta_hi, b);
  }
  sys.input_space = Box({alpha_lo, beta_lo}, {alpha_hi, beta_hi});
  for (const Rat& a : cfg.alphas)
    for (const Rat& b : cfg.betas) sys.input_points.push_back({a, b});

  Rat theta_step = (cfg.theta_hi - cfg.theta_lo) / long(cfg.theta_bins);
  for (unsigned vi = 0; vi < cfg.v_bins; ++vi) {
    Rat vblo = cfg.v_edges[vi], vbhi = cfg.v_edges[vi + 1];
    Rat v_mid = (vblo + vbhi) / 2;
    for (unsigned ti = 0; ti < cfg.theta_bins; ++ti) {
      Rat tlo = cfg.theta_lo + theta_step * long(ti);
      Rat thi = cfg.theta_lo + theta_step * long(ti + 1);
      Rat t_mid = (tlo + thi) / 2;
      double tm = rat_to_double(t_mid);
      Rat cos_mid = rat_round_to_denom(std::cos(tm), cfg.coeff_denom_pow2);
      Rat sin_mid = rat_round_to_denom(std::sin(tm), cfg.coeff_denom_pow2);

      Location loc;
      loc.invariant = Box({cfg.xy.lo[0], cfg.xy.lo[1], vblo, tlo},
                          {cfg.xy.hi[0], cfg.xy.hi[1], vbhi, thi});
      Mat a = identity_matrix(4);
      a[0][2] = cos_mid;
      a[1][2] = sin_mid;
      Vec c(4, Rat(0));
      if (cfg.tangent_offsets) {
        // tangent plane of v*cos(theta) and v*sin(theta) at the bin midpoint
        a[0][3] = -v_mid * sin_mid;
        a[1][3] = v_mid * cos_mid;
        c[0] = v_mid * sin_mid * t_mid;
        c[1] = -v_mid * cos_mid * t_mid;
      }
      Mat b = zero_matrix(4, 2);
      b[2][0] = 1;        // v' = v + alpha
      b[3][1] = v_mid;    // theta' = theta + v_mid * beta
      loc.dynamics = {std::move(a), std::move(b), std::move(c)};
      sys.locations.push_back(std::move(loc));
    }
  }
  return sys;
}

namespace {

std::vector<Box> grid_boxes_4d(const PiecewiseAffineSystem& sys, unsigned x_bins,
                               unsigned y_bins, const std::vector<Rat>& v_edges,
                               unsigned theta_bins) {
  const Box& X = sys.state_space;
  Rat xs = (X.hi[0] - X.lo[0]) / long(x_bins);
  Rat ys = (X.hi[1] - X.lo[1]) / long(y_bins);
  Rat ts = (X.hi[3] - X.lo[3]) / long(theta_bins);
  std::vector<Box> cells;
  for (unsigned xi = 0; xi < x_bins; ++xi)
    for (unsigned yi = 0; yi < y_bins; ++yi)
      for (size_t vi = 0; vi + 1 < v_edges.size(); ++vi)
        for (unsigned ti = 0; ti < theta_bins; ++ti)
          cells.push_back(Box({X.lo[0] + xs * long(xi), X.lo[1] + ys * long(yi),
                               v_edges[vi], X.lo[3] + ts * long(ti)},
                              {X.lo[0] + xs * long(xi + 1), X.lo[1] + ys * long(yi + 1),
                               v_edges[vi + 1], X.lo[3] + ts * long(ti + 1)}));
  return cells;
}

} // namespace

Problem paper_scale_instance() {
  VehicleConfig cfg;
  PiecewiseAffineSystem sys = dubins_pwl(cfg);
  const Box& X = sys.state_space;

  std::vector<Box> cells = grid_boxes_4d(sys, 8, 4, cfg.v_edges, cfg.theta_bins);
  Partition control(X, cells);

  auto column = [&](long x0, long y0, long x1, long y1) {
    return Box({Rat(x0), Rat(y0), X.lo[2], X.lo[3]}, {Rat(x1), Rat(y1), X.hi[2], X.hi[3]});
  };
  std::vector<Box> init{column(0, 0, 1, 1)};
  std::vector<Box> goal{column(7, 3, 8, 4)};
  std::vector<Box> unsafe{column(3, 1, 4, 2), column(5, 2, 6, 3)};
  std::vector<Box> safe;
  for (long xi = 0; xi < 8; ++xi)
    for (long yi = 0; yi < 4; ++yi) {
      Box cell = column(xi, yi, xi + 1, yi + 1);
      bool blocked = false;
      for (const auto& u : unsafe)
        if (cell.interior_intersects_box(u)) { blocked = true; break; }
      if (!blocked) safe.push_back(cell);
    }
  return Problem{std::move(sys), std::move(control), std::move(init), std::move(safe),
                 std::move(goal), 1, 0};
}

Problem gridworld(unsigned nx, unsigned ny, const GridLayout& layout) {
  if (nx < 2 && ny < 2)
    throw std::invalid_argument("gridworld: need at least 2 cells on one axis");
  PiecewiseAffineSystem sys;
  sys.state_space = Box({Rat(0), Rat(0)}, {Rat(long(nx)), Rat(long(ny))});
  sys.input_space = Box({Rat(-1), Rat(-1)}, {Rat(1), Rat(1)});
  sys.input_points = {{Rat(1), Rat(0)},
                      {Rat(-1), Rat(0)},
                      {Rat(0), Rat(1)},
                      {Rat(0), Rat(-1)},
                      {Rat(0), Rat(0)}};
  Location loc;
  loc.invariant = sys.state_space;
  loc.dynamics = {identity_matrix(2), identity_matrix(2), Vec(2, Rat(0))};
  sys.locations.push_back(std::move(loc));

  auto cell_box = [](unsigned x, unsigned y) {
    return Box({Rat(long(x)), Rat(long(y))}, {Rat(long(x + 1)), Rat(long(y + 1))});
  };
  std::vector<Box> cells;
  for (unsigned x = 0; x < nx; ++x)
    for (unsigned y = 0; y < ny; ++y) cells.push_back(cell_box(x, y));
  Partition control(sys.state_space, cells);

  auto to_boxes = [&](const std::vector<std::pair<unsigned, unsigned>>& coords) {
    std::vector<Box> out;
    for (auto [x, y] : coords) {
      if (x >= nx || y >= ny) throw std::invalid_argument("gridworld: cell out of range");
      out.push_back(cell_box(x, y));
    }
    return out;
  };
  std::vector<Box> init = to_boxes(layout.init_cells);
  std::vector<Box> goal = to_boxes(layout.goal_cells);
  std::set<std::pair<unsigned, unsigned>> walls(layout.wall_cells.begin(),
                                                layout.wall_cells.end());
  std::vector<Box> safe;
  for (unsigned x = 0; x < nx; ++x)
    for (unsigned y = 0; y < ny; ++y)
      if (!walls.count({x, y})) safe.push_back(cell_box(x, y));
  return Problem{std::move(sys), std::move(control), std::move(init), std::move(safe),
                 std::move(goal), 1, 0};
}

Problem conveyor_1d(unsigned cells, std::vector<Rat> input_offsets) {
  if (cells < 2) throw std::invalid_argument("conveyor_1d: need at least 2 cells");
  PiecewiseAffineSystem sys;
  sys.state_space = Box({Rat(0)}, {Rat(1)});
  Rat off_lo = input_offsets.front(), off_hi = input_offsets.front();
  for (const Rat& o : input_offsets) {
    off_lo = std::min(off_lo, o);
    off_hi = std::max(off_hi, o);
  }
  sys.input_space = Box({off_lo}, {off_hi});
  for (const Rat& o : input_offsets) sys.input_points.push_back({o});
  Location loc;
  loc.invariant = sys.state_space;
  loc.dynamics = {identity_matrix(1), identity_matrix(1), Vec(1, Rat(0))};
  sys.locations.push_back(std::move(loc));

  std::vector<Box> cell_boxes;
  Rat w = Rat(1) / long(cells);
  for (unsigned i = 0; i < cells; ++i)
    cell_boxes.push_back(Box({w * long(i)}, {w * long(i + 1)}));
  Partition control(sys.state_space, cell_boxes);

  std::vector<Box> init{cell_boxes.front()};
  std::vector<Box> goal{cell_boxes.back()};
  std::vector<Box> safe{sys.state_space};
  return Problem{std::move(sys), std::move(control), std::move(init), std::move(safe),
                 std::move(goal), 1, 0};
}

RandomInstance random_oracle_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](size_t n) { return size_t(rng() % n); };

  bool two_d = pick(2) == 1;
  bool aligned = pick(2) == 0;

  unsigned nx, ny = 1;
  if (two_d) {
    nx = 2 + unsigned(pick(3)); // 2..4
    ny = 2 + unsigned(pick(2)); // 2..3
    while (nx * ny > 12) nx -= 1;
  } else {
    nx = 4 + unsigned(pick(9)); // 4..12
  }
  size_t n = two_d ? 2 : 1;
  size_t ncells = nx * ny;

  PiecewiseAffineSystem sys;
  Vec lo(n, Rat(0)), hi(n);
  hi[0] = Rat(long(nx));
  if (two_d) hi[1] = Rat(long(ny));
  sys.state_space = Box(lo, hi);

  // inputs: shift vectors; aligned instances use whole-cell steps
  size_t ninputs = 2 + pick(3); // 2..4
  std::set<std::vector<long>> raw;
  raw.insert(std::vector<long>(n, 0));
  while (raw.size() < ninputs) {
    std::vector<long> v(n);
    for (size_t i = 0; i < n; ++i) v[i] = long(pick(5)) - 2; // -2..2
    raw.insert(v);
  }
  Rat quantum = aligned ? Rat(1) : Rat(1, 2);
  Vec ulo(n, Rat(0)), uhi(n, Rat(0));
  for (const auto& v : raw) {
    Vec u(n);
    for (size_t i = 0; i < n; ++i) {
      u[i] = quantum * v[i];
      ulo[i] = std::min(ulo[i], u[i]);
      uhi[i] = std::max(uhi[i], u[i]);
    }
    sys.input_points.push_back(std::move(u));
  }
  sys.input_space = Box(ulo, uhi);

  // one or two locations split on axis 0 at a grid line
  unsigned nloc = aligned ? 1 : 1 + unsigned(pick(2));
  auto random_dynamics = [&]() {
    Mat a = identity_matrix(n);
    if (!aligned) {
      const Rat choices[] = {Rat(1, 2), Rat(3, 4), Rat(1), Rat(5, 4)};
      for (size_t i = 0; i < n; ++i) a[i][i] = choices[pick(4)];
    }
    Vec c(n, Rat(0));
    if (!aligned)
      for (size_t i = 0; i < n; ++i) c[i] = Rat(long(pick(3)) - 1) / 4;
    return AffineDynamics{std::move(a), identity_matrix(n), std::move(c)};
  };
  if (nloc == 1 || nx < 2) {
    sys.locations.push_back({sys.state_space, random_dynamics()});
  } else {
    long cut = 1 + long(pick(nx - 1));
    Box left = sys.state_space, right = sys.state_space;
    left.hi[0] = Rat(cut);
    right.lo[0] = Rat(cut);
    sys.locations.push_back({left, random_dynamics()});
    sys.locations.push_back({right, random_dynamics()});
  }

  auto cell_box = [&](unsigned x, unsigned y) {
    Vec clo(n), chi(n);
    clo[0] = Rat(long(x));
    chi[0] = Rat(long(x + 1));
    if (two_d) {
      clo[1] = Rat(long(y));
      chi[1] = Rat(long(y + 1));
    }
    return Box(clo, chi);
  };
  std::vector<Box> cells;
  for (unsigned x = 0; x < nx; ++x)
    for (unsigned y = 0; y < ny; ++y) cells.push_back(cell_box(x, y));
  Partition control(sys.state_space, cells);

  size_t init_at = pick(ncells);
  size_t goal_at = pick(ncells);
  while (goal_at == init_at) goal_at = pick(ncells);
  std::set<size_t> unsafe_at;
  size_t num_unsafe = pick(3);
  while (unsafe_at.size() < num_unsafe) {
    size_t u = pick(ncells);
    if (u != init_at && u != goal_at) unsafe_at.insert(u);
  }

  std::vector<Box> init{cells[init_at]}, goal{cells[goal_at]}, safe;
  for (size_t i = 0; i < cells.size(); ++i)
    if (!unsafe_at.count(i)) safe.push_back(cells[i]);

  Problem problem{std::move(sys), std::move(control), std::move(init), std::move(safe),
                  std::move(goal), 1, 0};
  return RandomInstance{std::move(problem), aligned};
}

} // namespace rsyn
