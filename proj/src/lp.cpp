#include "rsyn/lp.hpp"

#include <stdexcept>

namespace rsyn {

void IneqSystem::push_row(Vec coeffs, Rat rhs) {
  if (!a.empty() && coeffs.size() != a[0].size())
    throw std::invalid_argument("IneqSystem: row width mismatch");
  a.push_back(std::move(coeffs));
  b.push_back(std::move(rhs));
}

void IneqSystem::push_eq(const Vec& coeffs, const Rat& rhs) {
  push_row(coeffs, rhs);
  Vec neg(coeffs.size());
  for (size_t i = 0; i < coeffs.size(); ++i) neg[i] = -coeffs[i];
  push_row(std::move(neg), Rat(-rhs));
}

bool IneqSystem::satisfied_by(const Vec& x) const {
  for (size_t i = 0; i < rows(); ++i) {
    Rat acc(0);
    for (size_t j = 0; j < x.size(); ++j) acc += a[i][j] * x[j];
    if (acc > b[i]) return false;
  }
  return true;
}

namespace {

// Dense rational simplex on the system  A(xp - xm) + slack = b  with all
// variables nonnegative; artificial columns patch rows whose rhs is negative
// after sign normalization. Bland's rule guarantees termination.
class Simplex {
public:
  explicit Simplex(const IneqSystem& sys) : n_(sys.vars()), m_(sys.rows()) {
    size_t n_art = 0;
    for (size_t i = 0; i < m_; ++i)
      if (sys.b[i] < 0) ++n_art;
    cols_ = 2 * n_ + m_ + n_art;
    tab_.assign(m_, Vec(cols_ + 1, Rat(0)));
    basis_.assign(m_, 0);
    art_first_ = 2 * n_ + m_;

    size_t art = art_first_;
    for (size_t i = 0; i < m_; ++i) {
      bool flip = sys.b[i] < 0;
      Rat sign(flip ? -1 : 1);
      for (size_t j = 0; j < n_; ++j) {
        tab_[i][j] = sign * sys.a[i][j];
        tab_[i][n_ + j] = -sign * sys.a[i][j];
      }
      tab_[i][2 * n_ + i] = sign; // slack
      tab_[i][cols_] = sign * sys.b[i];
      if (flip) {
        tab_[i][art] = 1;
        basis_[i] = art;
        ++art;
      } else {
        basis_[i] = 2 * n_ + i;
      }
    }
  }

  // Minimizes the sum of artificials. Returns true iff it reaches zero.
  bool phase1() {
    if (art_first_ == cols_) return true; // no artificials needed
    Vec cost(cols_, Rat(0));
    for (size_t j = art_first_; j < cols_; ++j) cost[j] = 1;
    Rat value = run(cost);
    return value == 0;
  }

  // Maximizes cost·v over the feasible region (call after phase1 succeeded).
  // Artificial columns are frozen out. Stops early once the objective value
  // exceeds `early_above` if provided. Returns the best value reached.
  Rat phase2_max(const Vec& cost_orig_cols, const std::optional<Rat>& early_above) {
    purge_artificials();
    frozen_from_ = art_first_;
    Vec cost(cols_, Rat(0));
    for (size_t j = 0; j < cost_orig_cols.size() && j < n_; ++j) {
      cost[j] = -cost_orig_cols[j];      // minimize the negation
      cost[n_ + j] = cost_orig_cols[j];
    }
    std::optional<Rat> stop;
    if (early_above) stop = -(*early_above);
    Rat value = run(cost, stop);
    return -value;
  }

  Vec solution() const {
    Vec x(n_, Rat(0));
    for (size_t i = 0; i < m_; ++i) {
      size_t c = basis_[i];
      if (c < n_)
        x[c] += tab_[i][cols_];
      else if (c < 2 * n_)
        x[c - n_] -= tab_[i][cols_];
    }
    return x;
  }

private:
  // Bland-rule minimization of cost·v. Returns the final objective value.
  // If `stop_below` is set, returns as soon as the objective drops below it.
  Rat run(const Vec& cost, const std::optional<Rat>& stop_below = std::nullopt) {
    // reduced costs: z[j] = cost[j] - sum_i cost[basis_[i]] * tab_[i][j]
    Vec z(cols_ + 1, Rat(0));
    auto recompute = [&] {
      for (size_t j = 0; j <= cols_; ++j) {
        Rat acc = j < cols_ ? cost[j] : Rat(0);
        for (size_t i = 0; i < m_; ++i)
          if (cost[basis_[i]] != 0) acc -= cost[basis_[i]] * tab_[i][j];
        z[j] = acc;
      }
    };
    recompute();
    while (true) {
      if (stop_below && -z[cols_] < *stop_below) return -z[cols_];
      size_t enter = cols_;
      for (size_t j = 0; j < cols_; ++j) {
        if (j >= frozen_from_) break;
        if (z[j] < 0) { enter = j; break; }
      }
      if (enter == cols_) return -z[cols_];
      // ratio test, Bland tie-break on basis column
      size_t leave = m_;
      Rat best;
      for (size_t i = 0; i < m_; ++i) {
        if (tab_[i][enter] <= 0) continue;
        Rat ratio = tab_[i][cols_] / tab_[i][enter];
        if (leave == m_ || ratio < best ||
            (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == m_) {
        // objective unbounded below; callers bound their objectives, treat
        // as "past any stop threshold"
        return stop_below ? *stop_below - 1 : Rat(0);
      }
      pivot(leave, enter, cost, z);
    }
  }

  // Pivots basic artificials out after phase 1 so later pivots cannot lift
  // them off zero. Rows with no non-artificial support are redundant: their
  // coefficients are all zero, so no later pivot can touch them.
  void purge_artificials() {
    for (size_t i = 0; i < m_; ++i) {
      if (basis_[i] < art_first_) continue;
      size_t col = cols_;
      for (size_t j = 0; j < art_first_; ++j)
        if (tab_[i][j] != 0) { col = j; break; }
      if (col == cols_) continue;
      Rat p = tab_[i][col];
      for (size_t j = 0; j <= cols_; ++j) tab_[i][j] /= p;
      for (size_t r = 0; r < m_; ++r) {
        if (r == i || tab_[r][col] == 0) continue;
        Rat f = tab_[r][col];
        for (size_t j = 0; j <= cols_; ++j) tab_[r][j] -= f * tab_[i][j];
      }
      basis_[i] = col;
    }
  }

  void pivot(size_t row, size_t col, const Vec& cost, Vec& z) {
    Rat p = tab_[row][col];
    for (size_t j = 0; j <= cols_; ++j) tab_[row][j] /= p;
    for (size_t i = 0; i < m_; ++i) {
      if (i == row || tab_[i][col] == 0) continue;
      Rat f = tab_[i][col];
      for (size_t j = 0; j <= cols_; ++j) tab_[i][j] -= f * tab_[row][j];
    }
    if (z[col] != 0) {
      Rat f = z[col];
      for (size_t j = 0; j <= cols_; ++j) z[j] -= f * tab_[row][j];
    }
    (void)cost;
    basis_[row] = col;
  }

  size_t n_, m_, cols_;
  size_t art_first_;
  size_t frozen_from_ = SIZE_MAX;
  Mat tab_;
  std::vector<size_t> basis_;
};

} // namespace

bool lp_feasible(const IneqSystem& sys) {
  if (sys.rows() == 0) return true;
  Simplex s(sys);
  return s.phase1();
}

std::optional<Vec> lp_witness(const IneqSystem& sys) {
  if (sys.rows() == 0) return Vec(sys.vars(), Rat(0));
  Simplex s(sys);
  if (!s.phase1()) return std::nullopt;
  Vec x = s.solution();
  if (!sys.satisfied_by(x))
    throw std::logic_error("lp_witness: simplex produced an invalid point");
  return x;
}

bool lp_strictly_feasible(const IneqSystem& sys) {
  if (sys.rows() == 0) return true;
  size_t n = sys.vars();
  // max t  s.t.  a·x + t <= b, t <= 1; strict feasibility iff optimum > 0
  IneqSystem ext;
  for (size_t i = 0; i < sys.rows(); ++i) {
    Vec row = sys.a[i];
    row.push_back(Rat(1));
    ext.push_row(std::move(row), sys.b[i]);
  }
  Vec cap(n + 1, Rat(0));
  cap[n] = 1;
  ext.push_row(std::move(cap), Rat(1));

  Simplex s(ext);
  if (!s.phase1()) return false; // cannot happen: t may be arbitrarily negative
  Vec cost(n + 1, Rat(0));
  cost[n] = 1;
  Rat best = s.phase2_max(cost, Rat(0));
  return best > 0;
}

} // namespace rsyn
