#pragma once

#include <optional>

#include "rsyn/rational.hpp"

namespace rsyn {

/// Inequality system { x : a·x <= b }, x free, exact rational coefficients.
struct IneqSystem {
  Mat a;
  Vec b;

  size_t rows() const { return a.size(); }
  size_t vars() const { return a.empty() ? 0 : a[0].size(); }

  void push_row(Vec coeffs, Rat rhs);
  /// lhs == rhs as a pair of inequalities.
  void push_eq(const Vec& coeffs, const Rat& rhs);
  bool satisfied_by(const Vec& x) const;
};

/// Exact feasibility by phase-1 simplex with Bland's rule.
bool lp_feasible(const IneqSystem& sys);

/// A satisfying point when one exists.
std::optional<Vec> lp_witness(const IneqSystem& sys);

/// True iff some x satisfies every row strictly (a·x < b). Decides whether
/// the polyhedron is full-dimensional.
bool lp_strictly_feasible(const IneqSystem& sys);

} // namespace rsyn
