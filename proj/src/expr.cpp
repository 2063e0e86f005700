#include "charpent/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <utility>

namespace charpent::expr {

namespace {

Expression make(Node n) { return std::make_shared<const Node>(std::move(n)); }

bool is_const(const Expression& e, double v) {
  return e->kind == NodeKind::Constant && e->value == v;
}

[[noreturn]] void domain_error(const std::string& msg) {
  throw EvalError(EvalFailure::DomainError, "domain error: " + msg);
}

double checked(double v, const char* what) {
  if (!std::isfinite(v)) domain_error(std::string(what) + " produced a non-finite value");
  return v;
}

double eval_unary(UnaryOp op, double x) {
  switch (op) {
    case UnaryOp::Neg:
      return -x;
    case UnaryOp::Sin:
      return checked(std::sin(x), "sin");
    case UnaryOp::Cos:
      return checked(std::cos(x), "cos");
    case UnaryOp::Exp:
      return checked(std::exp(x), "exp");
    case UnaryOp::Log:
      if (x <= 0.0) domain_error("log of non-positive value");
      return checked(std::log(x), "log");
    case UnaryOp::Sqrt:
      if (x < 0.0) domain_error("sqrt of negative value");
      return checked(std::sqrt(x), "sqrt");
    case UnaryOp::Abs:
      return std::fabs(x);
    case UnaryOp::Tanh:
      return checked(std::tanh(x), "tanh");
    case UnaryOp::Cosh:
      return checked(std::cosh(x), "cosh");
    case UnaryOp::Sinh:
      return checked(std::sinh(x), "sinh");
  }
  domain_error("unknown unary op");
}

double eval_pow(double b, double e) {
  if (b == 0.0) {
    if (e > 0.0) return 0.0;
    if (e == 0.0) return 1.0;
    domain_error("zero raised to negative power");
  }
  if (b < 0.0 && e != std::rint(e)) domain_error("fractional power of negative value");
  return checked(std::pow(b, e), "pow");
}

double eval_binary(BinaryOp op, double a, double b) {
  switch (op) {
    case BinaryOp::Add:
      return checked(a + b, "+");
    case BinaryOp::Sub:
      return checked(a - b, "-");
    case BinaryOp::Mul:
      return checked(a * b, "*");
    case BinaryOp::Div:
      if (b == 0.0) domain_error("division by zero");
      return checked(a / b, "/");
    case BinaryOp::Pow:
      return eval_pow(a, b);
  }
  domain_error("unknown binary op");
}

}  // namespace

Expression constant(double v) {
  Node n;
  n.kind = NodeKind::Constant;
  n.value = v;
  return make(std::move(n));
}

Expression variable(Var v) {
  Node n;
  n.kind = NodeKind::Variable;
  n.var = v;
  return make(std::move(n));
}

static Expression binary(BinaryOp op, Expression a, Expression b) {
  Node n;
  n.kind = NodeKind::Binary;
  n.bop = op;
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return make(std::move(n));
}

static Expression unary(UnaryOp op, Expression a) {
  Node n;
  n.kind = NodeKind::Unary;
  n.uop = op;
  n.lhs = std::move(a);
  return make(std::move(n));
}

Expression add(Expression a, Expression b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (a->kind == NodeKind::Constant && b->kind == NodeKind::Constant) {
    double v = a->value + b->value;
    if (std::isfinite(v)) return constant(v);
  }
  return binary(BinaryOp::Add, std::move(a), std::move(b));
}

Expression sub(Expression a, Expression b) {
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return neg(std::move(b));
  if (a->kind == NodeKind::Constant && b->kind == NodeKind::Constant) {
    double v = a->value - b->value;
    if (std::isfinite(v)) return constant(v);
  }
  return binary(BinaryOp::Sub, std::move(a), std::move(b));
}

Expression mul(Expression a, Expression b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (a->kind == NodeKind::Constant && b->kind == NodeKind::Constant) {
    double v = a->value * b->value;
    if (std::isfinite(v)) return constant(v);
  }
  return binary(BinaryOp::Mul, std::move(a), std::move(b));
}

Expression div(Expression a, Expression b) {
  if (is_const(b, 1.0)) return a;
  if (a->kind == NodeKind::Constant && b->kind == NodeKind::Constant && b->value != 0.0) {
    double v = a->value / b->value;
    if (std::isfinite(v)) return constant(v);
  }
  return binary(BinaryOp::Div, std::move(a), std::move(b));
}

Expression pow(Expression base, Expression exponent) {
  if (is_const(exponent, 1.0)) return base;
  if (is_const(exponent, 0.0)) return constant(1.0);
  if (base->kind == NodeKind::Constant && exponent->kind == NodeKind::Constant) {
    double b = base->value, e = exponent->value;
    if (b > 0.0 || (b != 0.0 && e == std::rint(e))) {
      double v = std::pow(b, e);
      if (std::isfinite(v)) return constant(v);
    }
  }
  return binary(BinaryOp::Pow, std::move(base), std::move(exponent));
}

Expression neg(Expression a) {
  if (a->kind == NodeKind::Constant) return constant(-a->value);
  if (a->kind == NodeKind::Unary && a->uop == UnaryOp::Neg) return a->lhs;
  return unary(UnaryOp::Neg, std::move(a));
}

Expression apply(UnaryOp op, Expression a) {
  if (op == UnaryOp::Neg) return neg(std::move(a));
  if (a->kind == NodeKind::Constant) {
    double v = 0.0;
    bool ok = true;
    try {
      v = eval_unary(op, a->value);
    } catch (const EvalError&) {
      ok = false;
    }
    if (ok && std::isfinite(v)) return constant(v);
  }
  return unary(op, std::move(a));
}

double eval_at(const Expression& e, double x1, std::optional<double> x2) {
  switch (e->kind) {
    case NodeKind::Constant:
      return e->value;
    case NodeKind::Variable:
      if (e->var == Var::X1) return x1;
      if (!x2) throw EvalError(EvalFailure::UnboundVariable, "variable x2 is not bound");
      return *x2;
    case NodeKind::Unary:
      return eval_unary(e->uop, eval_at(e->lhs, x1, x2));
    case NodeKind::Binary:
      return eval_binary(e->bop, eval_at(e->lhs, x1, x2), eval_at(e->rhs, x1, x2));
  }
  domain_error("corrupt expression node");
}

bool uses_variable(const Expression& e, Var v) {
  switch (e->kind) {
    case NodeKind::Constant:
      return false;
    case NodeKind::Variable:
      return e->var == v;
    case NodeKind::Unary:
      return uses_variable(e->lhs, v);
    case NodeKind::Binary:
      return uses_variable(e->lhs, v) || uses_variable(e->rhs, v);
  }
  return false;
}

Expression derivative(const Expression& e, Var v) {
  switch (e->kind) {
    case NodeKind::Constant:
      return constant(0.0);
    case NodeKind::Variable:
      return constant(e->var == v ? 1.0 : 0.0);
    case NodeKind::Unary: {
      const Expression& u = e->lhs;
      Expression du = derivative(u, v);
      switch (e->uop) {
        case UnaryOp::Neg:
          return neg(du);
        case UnaryOp::Sin:
          return mul(apply(UnaryOp::Cos, u), du);
        case UnaryOp::Cos:
          return neg(mul(apply(UnaryOp::Sin, u), du));
        case UnaryOp::Exp:
          return mul(apply(UnaryOp::Exp, u), du);
        case UnaryOp::Log:
          return div(du, u);
        case UnaryOp::Sqrt:
          return div(du, mul(constant(2.0), apply(UnaryOp::Sqrt, u)));
        case UnaryOp::Abs:
          throw EvalError(EvalFailure::NonDifferentiable, "abs is not differentiable");
        case UnaryOp::Tanh:
          return div(du, pow(apply(UnaryOp::Cosh, u), constant(2.0)));
        case UnaryOp::Cosh:
          return mul(apply(UnaryOp::Sinh, u), du);
        case UnaryOp::Sinh:
          return mul(apply(UnaryOp::Cosh, u), du);
      }
      break;
    }
    case NodeKind::Binary: {
      const Expression& a = e->lhs;
      const Expression& b = e->rhs;
      switch (e->bop) {
        case BinaryOp::Add:
          return add(derivative(a, v), derivative(b, v));
        case BinaryOp::Sub:
          return sub(derivative(a, v), derivative(b, v));
        case BinaryOp::Mul:
          return add(mul(derivative(a, v), b), mul(a, derivative(b, v)));
        case BinaryOp::Div:
          return div(sub(mul(derivative(a, v), b), mul(a, derivative(b, v))),
                     pow(b, constant(2.0)));
        case BinaryOp::Pow:
          if (b->kind == NodeKind::Constant) {
            // power rule for any constant exponent
            return mul(mul(b, pow(a, constant(b->value - 1.0))), derivative(a, v));
          }
          // general exponent via a^b = exp(b*log a)
          return mul(pow(a, b), add(mul(derivative(b, v), apply(UnaryOp::Log, a)),
                                    mul(b, div(derivative(a, v), a))));
      }
      break;
    }
  }
  domain_error("corrupt expression node");
}

Expression derivative(const Expression& e, Var v, int order) {
  Expression d = e;
  for (int i = 0; i < order; ++i) d = derivative(d, v);
  return d;
}

Expression substitute(const Expression& e, Var v, const Expression& replacement) {
  switch (e->kind) {
    case NodeKind::Constant:
      return e;
    case NodeKind::Variable:
      return e->var == v ? replacement : e;
    case NodeKind::Unary:
      return apply(e->uop, substitute(e->lhs, v, replacement));
    case NodeKind::Binary: {
      Expression a = substitute(e->lhs, v, replacement);
      Expression b = substitute(e->rhs, v, replacement);
      switch (e->bop) {
        case BinaryOp::Add:
          return add(a, b);
        case BinaryOp::Sub:
          return sub(a, b);
        case BinaryOp::Mul:
          return mul(a, b);
        case BinaryOp::Div:
          return div(a, b);
        case BinaryOp::Pow:
          return pow(a, b);
      }
    }
  }
  domain_error("corrupt expression node");
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Parser {
  std::string_view text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool at_end() {
    skip_ws();
    return pos >= text.size();
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  bool consume(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  Expression parse_expression() {
    Expression e = parse_term();
    for (;;) {
      if (consume('+')) {
        e = add(e, parse_term());
      } else if (consume('-')) {
        e = sub(e, parse_term());
      } else {
        return e;
      }
    }
  }

  Expression parse_term() {
    Expression e = parse_factor();
    for (;;) {
      if (consume('*')) {
        e = mul(e, parse_factor());
      } else if (consume('/')) {
        e = div(e, parse_factor());
      } else {
        return e;
      }
    }
  }

  Expression parse_factor() {
    Expression base = parse_base();
    if (consume('^')) return pow(base, parse_factor());
    return base;
  }

  Expression parse_base() {
    skip_ws();
    if (pos >= text.size())
      throw ParseError(pos, "number, identifier, '(' or unary '-'");
    char c = text[pos];
    if (c == '-') {
      ++pos;
      return neg(parse_factor());
    }
    if (c == '(') {
      ++pos;
      Expression e = parse_expression();
      if (!consume(')')) throw ParseError(pos, "')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw ParseError(pos, "number, identifier, '(' or unary '-'");
  }

  Expression parse_number() {
    double v = 0.0;
    const char* first = text.data() + pos;
    const char* last = text.data() + text.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{}) throw ParseError(pos, "number");
    pos += static_cast<std::size_t>(res.ptr - first);
    return constant(v);
  }

  Expression parse_identifier() {
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    std::string name(text.substr(start, pos - start));
    if (name == "x" || name == "x1") return variable(Var::X1);
    if (name == "x2") return variable(Var::X2);
    if (name == "pi") return constant(M_PI);
    if (name == "e") return constant(M_E);
    static const std::map<std::string, UnaryOp> kFunctions = {
        {"sin", UnaryOp::Sin},   {"cos", UnaryOp::Cos},   {"exp", UnaryOp::Exp},
        {"log", UnaryOp::Log},   {"sqrt", UnaryOp::Sqrt}, {"abs", UnaryOp::Abs},
        {"tanh", UnaryOp::Tanh}, {"cosh", UnaryOp::Cosh}, {"sinh", UnaryOp::Sinh}};
    auto it = kFunctions.find(name);
    if (it == kFunctions.end())
      throw ParseError(start, "known identifier (got '" + name + "')");
    if (!consume('(')) throw ParseError(pos, "'(' after function name '" + name + "'");
    Expression arg = parse_expression();
    if (!consume(')')) throw ParseError(pos, "')'");
    return apply(it->second, arg);
  }
};

}  // namespace

Expression parse(std::string_view text) {
  Parser p{text};
  Expression e = p.parse_expression();
  if (!p.at_end()) throw ParseError(p.pos, "end of input");
  return e;
}

// ---------------------------------------------------------------------------
// Printer (precedence-aware; reparsing the output reproduces the semantics)

namespace {

// precedence * 10: add/sub 10, mul/div 20, unary minus 25, pow 30, atoms 40
int precedence(const Expression& e) {
  switch (e->kind) {
    case NodeKind::Constant:
      return e->value < 0.0 ? 25 : 40;
    case NodeKind::Variable:
      return 40;
    case NodeKind::Unary:
      return e->uop == UnaryOp::Neg ? 25 : 40;
    case NodeKind::Binary:
      switch (e->bop) {
        case BinaryOp::Add:
        case BinaryOp::Sub:
          return 10;
        case BinaryOp::Mul:
        case BinaryOp::Div:
          return 20;
        case BinaryOp::Pow:
          return 30;
      }
  }
  return 40;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

const char* function_name(UnaryOp op) {
  switch (op) {
    case UnaryOp::Neg:
      return "-";
    case UnaryOp::Sin:
      return "sin";
    case UnaryOp::Cos:
      return "cos";
    case UnaryOp::Exp:
      return "exp";
    case UnaryOp::Log:
      return "log";
    case UnaryOp::Sqrt:
      return "sqrt";
    case UnaryOp::Abs:
      return "abs";
    case UnaryOp::Tanh:
      return "tanh";
    case UnaryOp::Cosh:
      return "cosh";
    case UnaryOp::Sinh:
      return "sinh";
  }
  return "?";
}

void print_node(const Expression& e, int context, std::string& out) {
  bool parens = precedence(e) < context;
  if (parens) out += '(';
  switch (e->kind) {
    case NodeKind::Constant:
      out += format_double(e->value);
      break;
    case NodeKind::Variable:
      out += (e->var == Var::X1 ? "x1" : "x2");
      break;
    case NodeKind::Unary:
      if (e->uop == UnaryOp::Neg) {
        out += '-';
        print_node(e->lhs, 26, out);
      } else {
        out += function_name(e->uop);
        out += '(';
        print_node(e->lhs, 0, out);
        out += ')';
      }
      break;
    case NodeKind::Binary: {
      int lctx = 0, rctx = 0;
      const char* op = "";
      switch (e->bop) {
        case BinaryOp::Add:
          op = "+", lctx = 10, rctx = 11;
          break;
        case BinaryOp::Sub:
          op = "-", lctx = 10, rctx = 20;
          break;
        case BinaryOp::Mul:
          op = "*", lctx = 20, rctx = 21;
          break;
        case BinaryOp::Div:
          op = "/", lctx = 20, rctx = 30;
          break;
        case BinaryOp::Pow:
          op = "^", lctx = 40, rctx = 30;
          break;
      }
      print_node(e->lhs, lctx, out);
      out += op;
      print_node(e->rhs, rctx, out);
      break;
    }
  }
  if (parens) out += ')';
}

}  // namespace

std::string to_string(const Expression& e) {
  std::string out;
  print_node(e, 0, out);
  return out;
}

}  // namespace charpent::expr
