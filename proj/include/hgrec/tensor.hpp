#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "hgrec/errors.hpp"

namespace hgrec {

// Dense row-major matrix of doubles. Rank two is enough everywhere; vectors
// are carried as 1xN or Nx1.
struct Tensor {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  Tensor() = default;
  Tensor(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c, 0.0) {}

  static Tensor zeros(int r, int c) { return Tensor(r, c); }
  static Tensor full(int r, int c, double x);
  static Tensor identity(int n);
  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor row_vector(std::span<const double> xs);
  static Tensor col_vector(std::span<const double> xs);

  int size() const { return rows * cols; }
  double& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }
  std::span<const double> row(int r) const { return {v.data() + static_cast<size_t>(r) * cols, static_cast<size_t>(cols)}; }
  std::span<double> row(int r) { return {v.data() + static_cast<size_t>(r) * cols, static_cast<size_t>(cols)}; }

  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
  bool all_finite() const;
  std::string shape_str() const;

  bool operator==(const Tensor& o) const { return rows == o.rows && cols == o.cols && v == o.v; }
};

double row_dot(const Tensor& a, int i, const Tensor& b, int j);
double row_norm(const Tensor& a, int i);
double row_cosine(const Tensor& a, int i, const Tensor& b, int j);

// Binary sparse matrix, CSR layout, column indices sorted within each row.
// Used for meta-path adjacency and as the support set of masked attention.
struct SparseMask {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr;  // size rows + 1
  std::vector<int> col_idx;  // size nnz

  static SparseMask from_rows(int cols, const std::vector<std::vector<int>>& rows);

  int nnz() const { return static_cast<int>(col_idx.size()); }
  std::span<const int> row(int i) const {
    return {col_idx.data() + row_ptr[i], static_cast<size_t>(row_ptr[i + 1] - row_ptr[i])};
  }
  bool has(int i, int j) const;
  bool diagonal_all_ones() const;
  bool is_symmetric() const;
  Tensor to_dense() const;

  bool operator==(const SparseMask& o) const = default;
};

}  // namespace hgrec
