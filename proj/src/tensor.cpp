#include "hgrec/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace hgrec {

Tensor Tensor::full(int r, int c, double x) {
  Tensor t(r, c);
  std::fill(t.v.begin(), t.v.end(), x);
  return t;
}

Tensor Tensor::identity(int n) {
  Tensor t(n, n);
  for (int i = 0; i < n; ++i) t.at(i, i) = 1.0;
  return t;
}

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r == 0 ? 0 : static_cast<int>(rows.begin()->size());
  Tensor t(r, c);
  int i = 0;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != c)
      throw NumericsError("from_rows: ragged initializer");
    std::copy(row.begin(), row.end(), t.v.begin() + static_cast<size_t>(i) * c);
    ++i;
  }
  return t;
}

Tensor Tensor::row_vector(std::span<const double> xs) {
  Tensor t(1, static_cast<int>(xs.size()));
  std::copy(xs.begin(), xs.end(), t.v.begin());
  return t;
}

Tensor Tensor::col_vector(std::span<const double> xs) {
  Tensor t(static_cast<int>(xs.size()), 1);
  std::copy(xs.begin(), xs.end(), t.v.begin());
  return t;
}

bool Tensor::all_finite() const {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

std::string Tensor::shape_str() const {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

double row_dot(const Tensor& a, int i, const Tensor& b, int j) {
  if (a.cols != b.cols) throw NumericsError("row_dot: dimension mismatch");
  double s = 0.0;
  for (int k = 0; k < a.cols; ++k) s += a.at(i, k) * b.at(j, k);
  return s;
}

double row_norm(const Tensor& a, int i) {
  return std::sqrt(row_dot(a, i, a, i));
}

double row_cosine(const Tensor& a, int i, const Tensor& b, int j) {
  const double na = row_norm(a, i), nb = row_norm(b, j);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return row_dot(a, i, b, j) / (na * nb);
}

SparseMask SparseMask::from_rows(int cols, const std::vector<std::vector<int>>& rows) {
  SparseMask m;
  m.rows = static_cast<int>(rows.size());
  m.cols = cols;
  m.row_ptr.reserve(rows.size() + 1);
  m.row_ptr.push_back(0);
  for (const auto& r : rows) {
    for (size_t k = 0; k < r.size(); ++k) {
      if (r[k] < 0 || r[k] >= cols) throw NumericsError("SparseMask: column index out of range");
      if (k > 0 && r[k] <= r[k - 1]) throw NumericsError("SparseMask: row not strictly sorted");
      m.col_idx.push_back(r[k]);
    }
    m.row_ptr.push_back(static_cast<int>(m.col_idx.size()));
  }
  return m;
}

bool SparseMask::has(int i, int j) const {
  auto r = row(i);
  return std::binary_search(r.begin(), r.end(), j);
}

bool SparseMask::diagonal_all_ones() const {
  if (rows != cols) return false;
  for (int i = 0; i < rows; ++i)
    if (!has(i, i)) return false;
  return true;
}

bool SparseMask::is_symmetric() const {
  if (rows != cols) return false;
  for (int i = 0; i < rows; ++i)
    for (int j : row(i))
      if (!has(j, i)) return false;
  return true;
}

Tensor SparseMask::to_dense() const {
  Tensor t(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j : row(i)) t.at(i, j) = 1.0;
  return t;
}

}  // namespace hgrec
