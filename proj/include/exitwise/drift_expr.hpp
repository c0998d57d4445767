#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace exitwise {

/// Arithmetic expression in one variable x.
///
/// Grammar: numbers, x, pi, e, unary minus, + - * / ^, parentheses and the
/// functions sin, cos, exp. The exponent of ^ must be a constant.
/// Parsed once; evaluation walks an immutable shared tree and is thread safe.
class Expr {
 public:
  struct Node;

  /// Throws ParseError with the offending column on malformed input.
  static Expr parse(std::string_view text);
  static Expr constant(double value);
  static Expr variable();

  double operator()(double x) const;
  /// Symbolic derivative with respect to x.
  Expr derivative() const;
  std::string str() const;

 private:
  explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

}  // namespace exitwise
