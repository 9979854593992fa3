#include "ska/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ska/simd.hpp"

namespace ska {

std::string to_string(Shape s) {
  return std::to_string(s.rows) + "x" + std::to_string(s.cols);
}

ShapeError::ShapeError(std::string op, Shape lhs, Shape rhs)
    : std::invalid_argument(op + ": shape mismatch between " + to_string(lhs) + " and " +
                            to_string(rhs)),
      op_(std::move(op)),
      lhs_(lhs),
      rhs_(rhs) {}

void require_finite(std::span<const double> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]))
      throw NonFiniteError(std::string(what) + ": non-finite entry at flat index " +
                           std::to_string(i));
  }
}

void require_same_shape(const char* op, const Matrix& a, const Matrix& b) {
  if (a.shape() != b.shape()) throw ShapeError(op, a.shape(), b.shape());
}

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("Matrix: dimensions must be positive");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("Matrix: dimensions must be positive");
  if (data_.size() != rows * cols)
    throw std::invalid_argument("Matrix: " + std::to_string(data_.size()) +
                                " values do not fill " + to_string(shape()));
  require_finite(data_, "Matrix");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  if (rows_ == 0 || cols_ == 0) throw std::invalid_argument("Matrix: dimensions must be positive");
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  require_finite(data_, "Matrix");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ShapeError("matmul", a.shape(), b.shape());
  std::vector<double> out(a.rows() * b.cols());
  simd::kernels().gemm(a.flat().data(), a.cols(), 1, b.flat().data(), out.data(), a.rows(),
                       a.cols(), b.cols());
  require_finite(out, "matmul");
  return Matrix(a.rows(), b.cols(), std::move(out));
}

Matrix transpose(const Matrix& m) {
  std::vector<double> out(m.size());
  const std::size_t r = m.rows(), c = m.cols();
  auto in = m.flat();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = in[i * c + j];
  return Matrix(c, r, std::move(out));
}

Matrix outer_mean(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw ShapeError("outer_mean", a.shape(), b.shape());
  const std::size_t n = a.rows(), p = a.cols(), q = b.cols();
  std::vector<double> out(p * q);
  // aᵀ·b with a read column-wise: A(i, s) = a[s*p + i].
  const auto& k = simd::kernels();
  k.gemm(a.flat().data(), 1, p, b.flat().data(), out.data(), p, n, q);
  k.scale(out.data(), 1.0 / static_cast<double>(n), out.data(), out.size());
  require_finite(out, "outer_mean");
  return Matrix(p, q, std::move(out));
}

double frobenius_norm(const Matrix& m) {
  double sum = 0.0;
  for (double v : m.flat()) sum += v * v;
  return std::sqrt(sum);
}

double dot_flat(const Matrix& a, const Matrix& b) {
  require_same_shape("dot_flat", a, b);
  auto x = a.flat(), y = b.flat();
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
  return sum;
}

double cosine_flat(const Matrix& a, const Matrix& b) {
  require_same_shape("cosine_flat", a, b);
  const double na = frobenius_norm(a);
  const double nb = frobenius_norm(b);
  if (na == 0.0 || nb == 0.0) throw UndefinedCosine("cosine_flat: zero-norm operand");
  return std::clamp(dot_flat(a, b) / (na * nb), -1.0, 1.0);
}

namespace {

template <class Kernel>
Matrix binary_op(const char* op, const Matrix& a, const Matrix& b, Kernel kernel) {
  require_same_shape(op, a, b);
  std::vector<double> out(a.size());
  kernel(a.flat().data(), b.flat().data(), out.data(), out.size());
  require_finite(out, op);
  return Matrix(a.rows(), a.cols(), std::move(out));
}

}  // namespace

Matrix add(const Matrix& a, const Matrix& b) { return binary_op("add", a, b, simd::kernels().add); }
Matrix sub(const Matrix& a, const Matrix& b) { return binary_op("sub", a, b, simd::kernels().sub); }
Matrix hadamard(const Matrix& a, const Matrix& b) {
  return binary_op("hadamard", a, b, simd::kernels().mul);
}

Matrix scale(const Matrix& m, double s) {
  std::vector<double> out(m.size());
  simd::kernels().scale(m.flat().data(), s, out.data(), out.size());
  require_finite(out, "scale");
  return Matrix(m.rows(), m.cols(), std::move(out));
}

Matrix sub_scaled(const Matrix& a, const Matrix& b, double s) {
  require_same_shape("sub_scaled", a, b);
  std::vector<double> out(a.size());
  simd::kernels().sub_scaled(a.flat().data(), b.flat().data(), s, out.data(), out.size());
  require_finite(out, "sub_scaled");
  return Matrix(a.rows(), a.cols(), std::move(out));
}

}  // namespace ska
