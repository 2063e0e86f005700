#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "charpent/errors.hpp"

// Closed-form scalar expressions in x1 (alias x) and x2 with exact symbolic
// differentiation. Grammar:
//
//   expression := term (('+'|'-') term)*
//   term       := factor (('*'|'/') factor)*
//   factor     := base ('^' factor)?
//   base       := number | identifier | function '(' expression ')'
//               | '(' expression ')' | '-' factor
//
// '^' is right-associative and binds tighter than unary minus, so "-x^2"
// means -(x^2). Recognized identifiers: x, x1, x2, pi, e and the function
// names sin cos exp log sqrt abs tanh cosh sinh. Whitespace is ignored.
namespace charpent::expr {

enum class Var { X1, X2 };
enum class UnaryOp { Neg, Sin, Cos, Exp, Log, Sqrt, Abs, Tanh, Cosh, Sinh };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

class Node;
using Expression = std::shared_ptr<const Node>;

enum class NodeKind { Constant, Variable, Unary, Binary };

class Node {
 public:
  NodeKind kind;
  double value = 0.0;  // Constant
  Var var = Var::X1;   // Variable
  UnaryOp uop = UnaryOp::Neg;
  BinaryOp bop = BinaryOp::Add;
  Expression lhs;  // Unary operand lives here
  Expression rhs;
};

Expression parse(std::string_view text);

/// Evaluates with IEEE doubles. Throws EvalError{DomainError} on division by
/// zero, log of a non-positive value, sqrt of a negative, fractional powers
/// of negatives, and any non-finite intermediate; EvalError{UnboundVariable}
/// if the tree uses x2 and no x2 binding is given.
double eval_at(const Expression& e, double x1, std::optional<double> x2 = std::nullopt);

/// Exact symbolic derivative. Throws EvalError{NonDifferentiable} for abs.
Expression derivative(const Expression& e, Var v);

Expression derivative(const Expression& e, Var v, int order);

/// Replaces every occurrence of `v` by `replacement`.
Expression substitute(const Expression& e, Var v, const Expression& replacement);

std::string to_string(const Expression& e);

bool uses_variable(const Expression& e, Var v);

// Builders. Binary/unary builders fold constants where that cannot change
// the domain-error behaviour of the tree.
Expression constant(double v);
Expression variable(Var v);
Expression add(Expression a, Expression b);
Expression sub(Expression a, Expression b);
Expression mul(Expression a, Expression b);
Expression div(Expression a, Expression b);
Expression pow(Expression base, Expression exponent);
Expression neg(Expression a);
Expression apply(UnaryOp op, Expression a);

}  // namespace charpent::expr
