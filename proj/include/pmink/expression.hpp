#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "pmink/errors.hpp"

namespace pmink {

/// Scalar expression in the angle `theta`.
///
/// Grammar: sums, differences, products, quotients, powers (^), unary minus,
/// parentheses, numeric literals, the names `theta` and `pi`, and the
/// functions cos, sin, exp, sqrt, abs. Example: "1 + 0.2*cos(2*theta)".
class Expression {
 public:
  static Expression parse(std::string_view text);

  double operator()(double theta) const;
  const std::string& text() const noexcept { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

class ExpressionError : public InvalidInput {
 public:
  ExpressionError(const std::string& what, std::size_t column)
      : InvalidInput(what + " at column " + std::to_string(column + 1)),
        column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

}  // namespace pmink
