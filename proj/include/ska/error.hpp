#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ska {

struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 0;

  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(Shape s);

// Two operands whose shapes do not compose.
class ShapeError : public std::invalid_argument {
 public:
  ShapeError(std::string op, Shape lhs, Shape rhs);

  const std::string& op() const noexcept { return op_; }
  Shape lhs() const noexcept { return lhs_; }
  Shape rhs() const noexcept { return rhs_; }

 private:
  std::string op_;
  Shape lhs_;
  Shape rhs_;
};

// A public operation produced (or was handed) a NaN or infinity.
class NonFiniteError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Cosine of a zero-norm tensor.
class UndefinedCosine : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace ska
