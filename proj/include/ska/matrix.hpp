#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "ska/error.hpp"

namespace ska {

/// Dense row-major matrix of doubles. Rows are batch samples wherever a
/// matrix carries per-sample data (Z, D, inputs).
///
/// Every public constructor and operation leaves all entries finite; a
/// NaN or infinity raises NonFiniteError instead of propagating.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  Shape shape() const noexcept { return {rows_, cols_}; }

  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  std::span<const double> flat() const noexcept { return data_; }
  std::span<double> flat() noexcept { return data_; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// c[i][j] = Σ_k a[i][k]·b[k][j], summed in ascending k.
Matrix matmul(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& m);

// Batch mean of per-row outer products: for a (n×p) and b (n×q) returns the
// p×q matrix (1/n)·Σ_s a[s]ᵀ b[s].
Matrix outer_mean(const Matrix& a, const Matrix& b);

double frobenius_norm(const Matrix& m);

// ⟨vec(a), vec(b)⟩ summed left to right.
double dot_flat(const Matrix& a, const Matrix& b);

// Cosine between the flattened tensors, clamped to [-1, 1].
// Throws UndefinedCosine when either norm is zero.
double cosine_flat(const Matrix& a, const Matrix& b);

Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& m, double s);
// a − s·b
Matrix sub_scaled(const Matrix& a, const Matrix& b, double s);

// Throws NonFiniteError naming `what` if any entry is NaN/Inf.
void require_finite(std::span<const double> values, const char* what);

template <class F>
Matrix elementwise(const Matrix& m, F&& f) {
  std::vector<double> out(m.size());
  auto in = m.flat();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(in[i]);
  return Matrix(m.rows(), m.cols(), std::move(out));
}

void require_same_shape(const char* op, const Matrix& a, const Matrix& b);

}  // namespace ska
