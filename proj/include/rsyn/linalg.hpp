#pragma once

#include <optional>

#include "rsyn/rational.hpp"

namespace rsyn {

Vec mat_vec(const Mat& a, const Vec& x);

Vec vec_add(const Vec& a, const Vec& b);
Vec vec_sub(const Vec& a, const Vec& b);

/// Exact inverse by Gauss-Jordan elimination; nullopt when singular.
std::optional<Mat> mat_inverse(const Mat& a);

Mat identity_matrix(size_t n);
Mat zero_matrix(size_t rows, size_t cols);

bool is_square(const Mat& a);
size_t mat_rows(const Mat& a);
size_t mat_cols(const Mat& a);

} // namespace rsyn
