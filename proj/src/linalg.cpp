#include "rsyn/linalg.hpp"

#include <stdexcept>

namespace rsyn {

Vec mat_vec(const Mat& a, const Vec& x) {
  Vec out(a.size(), Rat(0));
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != x.size())
      throw std::invalid_argument("mat_vec: dimension mismatch");
    Rat acc(0);
    for (size_t j = 0; j < x.size(); ++j) acc += a[i][j] * x[j];
    out[i] = acc;
  }
  return out;
}

Vec vec_add(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vec_add: dimension mismatch");
  Vec out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vec vec_sub(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vec_sub: dimension mismatch");
  Vec out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

std::optional<Mat> mat_inverse(const Mat& a) {
  size_t n = a.size();
  if (n == 0 || !is_square(a)) return std::nullopt;
  Mat work = a;
  Mat inv = identity_matrix(n);
  for (size_t col = 0; col < n; ++col) {
    size_t pivot = col;
    while (pivot < n && work[pivot][col] == 0) ++pivot;
    if (pivot == n) return std::nullopt;
    std::swap(work[pivot], work[col]);
    std::swap(inv[pivot], inv[col]);
    Rat p = work[col][col];
    for (size_t j = 0; j < n; ++j) {
      work[col][j] /= p;
      inv[col][j] /= p;
    }
    for (size_t row = 0; row < n; ++row) {
      if (row == col || work[row][col] == 0) continue;
      Rat f = work[row][col];
      for (size_t j = 0; j < n; ++j) {
        work[row][j] -= f * work[col][j];
        inv[row][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

Mat identity_matrix(size_t n) {
  Mat m(n, Vec(n, Rat(0)));
  for (size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

Mat zero_matrix(size_t rows, size_t cols) {
  return Mat(rows, Vec(cols, Rat(0)));
}

bool is_square(const Mat& a) {
  for (const auto& row : a)
    if (row.size() != a.size()) return false;
  return true;
}

size_t mat_rows(const Mat& a) { return a.size(); }

size_t mat_cols(const Mat& a) { return a.empty() ? 0 : a[0].size(); }

} // namespace rsyn
