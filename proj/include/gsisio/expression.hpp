#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "gsisio/matrix.hpp"

namespace gsisio {

/// Names an expression may refer to.
struct ExpressionSymbols {
  std::size_t state_dim = 0;         // x1 .. x<state_dim>
  bool allow_time = false;           // k
  std::map<std::string, double> constants;  // pi is always available
};

/// Parsed arithmetic expression over x1..xn (and optionally k).
///
/// Grammar:
///   expr   := term (('+' | '-') term)*
///   term   := unary (('*' | '/') unary)*
///   unary  := '-' unary | '+' unary | atom
///   atom   := number | name | func '(' expr ')' | '(' expr ')'
///   func   := sin | cos | tanh | exp
class Expression {
 public:
  struct Node;

  Expression() = default;

  /// Throws ConfigError with a 1-based column on bad input.
  static Expression parse(std::string_view src, const ExpressionSymbols& symbols);

  double evaluate(const Vector& x, double k = 0.0) const;
  /// Fully parenthesised form that parses back to the same tree.
  std::string to_string() const;
  bool valid() const { return root_ != nullptr; }

 private:
  explicit Expression(std::shared_ptr<const Node> root);
  std::shared_ptr<const Node> root_;
  std::size_t arity_ = 0;  // highest variable index used
};

inline Expression parse_expression(std::string_view src, std::size_t n) {
  return Expression::parse(src, ExpressionSymbols{n, false, {}});
}

}  // namespace gsisio
