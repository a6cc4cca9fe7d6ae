#include "specsolve/expression.hpp"

#include <array>
#include <cstdio>

namespace specsolve {

namespace {

constexpr std::array<std::string_view, 9> kFuncNames = {"sin", "cos", "exp", "cosh", "sinh", "tan", "atan", "sqrt", "abs"};

using Node = Expression::Node;
using Kind = Expression::Kind;

std::shared_ptr<const Node> make(Kind k, std::shared_ptr<const Node> a = nullptr, std::shared_ptr<const Node> b = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

// binding strength: + - 1, * / 2, unary - 3, ^ 4, atoms 5
int strength(const Node& n) {
  switch (n.kind) {
    case Kind::Add:
    case Kind::Sub:
      return 1;
    case Kind::Mul:
    case Kind::Div:
      return 2;
    case Kind::Neg:
      return 3;
    case Kind::Pow:
      return 4;
    default:
      return 5;
  }
}

void print(const Node& n, int need, std::string& out) {
  const bool paren = strength(n) < need;
  if (paren) out += '(';
  switch (n.kind) {
    case Kind::Number: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.21Lg", n.value);
      out += buf;
      break;
    }
    case Kind::Var:
      out += 'x';
      break;
    case Kind::Neg:
      out += '-';
      print(*n.lhs, 3, out);
      break;
    case Kind::Add:
    case Kind::Sub:
      print(*n.lhs, 1, out);
      out += n.kind == Kind::Add ? " + " : " - ";
      print(*n.rhs, 2, out);
      break;
    case Kind::Mul:
    case Kind::Div:
      print(*n.lhs, 2, out);
      out += n.kind == Kind::Mul ? "*" : "/";
      print(*n.rhs, 3, out);
      break;
    case Kind::Pow:
      // the base is an atom; the exponent may carry a sign or another power
      print(*n.lhs, 5, out);
      out += '^';
      print(*n.rhs, 3, out);
      break;
    case Kind::Call:
      out += func_name(n.func);
      out += '(';
      print(*n.lhs, 0, out);
      out += ')';
      break;
  }
  if (paren) out += ')';
}

bool constant(const Node& n) {
  if (n.kind == Kind::Var) return false;
  if (n.lhs && !constant(*n.lhs)) return false;
  if (n.rhs && !constant(*n.rhs)) return false;
  return true;
}

}  // namespace

std::string_view func_name(Func f) { return kFuncNames[static_cast<std::size_t>(f)]; }

bool func_from_name(std::string_view name, Func& out) {
  for (std::size_t i = 0; i < kFuncNames.size(); ++i)
    if (kFuncNames[i] == name) {
      out = static_cast<Func>(i);
      return true;
    }
  return false;
}

Expression::Expression() : root_(make(Kind::Number)) {}

Expression Expression::number(long double v) {
  if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "Expression::number: non-finite literal");
  // literals are unsigned in the grammar
  if (std::signbit(v)) return negate(number(-v));
  auto n = std::make_shared<Node>();
  n->value = v;
  return Expression(std::move(n));
}

Expression Expression::variable() { return Expression(make(Kind::Var)); }

Expression Expression::negate(Expression a) { return Expression(make(Kind::Neg, a.root_)); }

Expression Expression::binary(Kind k, Expression a, Expression b) {
  if (k != Kind::Add && k != Kind::Sub && k != Kind::Mul && k != Kind::Div && k != Kind::Pow)
    throw Error(ErrorKind::InvalidArgument, "Expression::binary: not a binary operator");
  return Expression(make(k, a.root_, b.root_));
}

Expression Expression::call(Func f, Expression a) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Call;
  n->func = f;
  n->lhs = a.root_;
  return Expression(std::move(n));
}

bool Expression::is_constant() const { return constant(*root_); }

std::string Expression::to_string() const {
  std::string out;
  print(*root_, 0, out);
  return out;
}

bool Expression::same(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == Kind::Number) return a.value == b.value;
  if (a.kind == Kind::Call && a.func != b.func) return false;
  if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs) || static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs))
    return false;
  return (!a.lhs || same(*a.lhs, *b.lhs)) && (!a.rhs || same(*a.rhs, *b.rhs));
}

}  // namespace specsolve
