#pragma once

// Scalar expressions in one variable x, as used for coefficients, right-hand
// sides and exact solutions in problem files.

#include <cmath>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "specsolve/error.hpp"

namespace specsolve {

enum class Func { Sin, Cos, Exp, Cosh, Sinh, Tan, Atan, Sqrt, Abs };

std::string_view func_name(Func f);
/// false when `name` is not a known function.
bool func_from_name(std::string_view name, Func& out);

class Expression {
 public:
  enum class Kind { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Call };

  struct Node {
    Kind kind = Kind::Number;
    long double value = 0;  // Number
    Func func = Func::Sin;  // Call
    std::shared_ptr<const Node> lhs, rhs;
  };

  Expression();  // the literal 0
  explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

  static Expression number(long double v);
  static Expression variable();
  static Expression negate(Expression a);
  static Expression binary(Kind k, Expression a, Expression b);
  static Expression call(Func f, Expression a);

  const Node& root() const { return *root_; }
  bool is_constant() const;

  /// Minimal parentheses; numbers with 21 significant digits so that
  /// parsing the output gives back the same tree.
  std::string to_string() const;

  /// Tree walk in the scalar S.  Non-finite intermediate results throw
  /// domain-error naming the offending x.
  template <class S>
  S eval(const S& x) const {
    return eval_node<S>(*root_, x);
  }
  long double operator()(long double x) const { return eval<long double>(x); }

  friend bool operator==(const Expression& a, const Expression& b) { return same(*a.root_, *b.root_); }

 private:
  static bool same(const Node& a, const Node& b);

  template <class S>
  static S eval_node(const Node& n, const S& x);
  template <class S>
  [[noreturn]] static void domain_fail(std::string_view what, const S& x);

  std::shared_ptr<const Node> root_;
};

/// Throws parse-error "line:col: expected one of ...; found ..." on bad input.
Expression parse_expression(std::string_view text);

template <class S>
void Expression::domain_fail(std::string_view what, const S& x) {
  std::ostringstream os;
  os.precision(17);
  os << what << " at x = " << static_cast<long double>(x);
  throw Error(ErrorKind::DomainError, os.str());
}

template <class S>
S Expression::eval_node(const Node& n, const S& x) {
  using std::abs, std::atan, std::cos, std::cosh, std::exp, std::floor, std::isfinite, std::pow, std::sin, std::sinh,
      std::sqrt, std::tan;
  S r = S(0);
  switch (n.kind) {
    case Kind::Number:
      return S(n.value);
    case Kind::Var:
      return x;
    case Kind::Neg:
      return -eval_node<S>(*n.lhs, x);
    case Kind::Add:
      r = eval_node<S>(*n.lhs, x) + eval_node<S>(*n.rhs, x);
      break;
    case Kind::Sub:
      r = eval_node<S>(*n.lhs, x) - eval_node<S>(*n.rhs, x);
      break;
    case Kind::Mul:
      r = eval_node<S>(*n.lhs, x) * eval_node<S>(*n.rhs, x);
      break;
    case Kind::Div: {
      const S d = eval_node<S>(*n.rhs, x);
      if (d == S(0)) domain_fail("division by zero", x);
      r = eval_node<S>(*n.lhs, x) / d;
      break;
    }
    case Kind::Pow: {
      const S b = eval_node<S>(*n.lhs, x);
      const S e = eval_node<S>(*n.rhs, x);
      if (b == S(0) && e < S(0)) domain_fail("zero to a negative power", x);
      if (b < S(0) && e != floor(e)) domain_fail("negative base to a fractional power", x);
      r = pow(b, e);
      break;
    }
    case Kind::Call: {
      const S a = eval_node<S>(*n.lhs, x);
      switch (n.func) {
        case Func::Sin: r = sin(a); break;
        case Func::Cos: r = cos(a); break;
        case Func::Exp: r = exp(a); break;
        case Func::Cosh: r = cosh(a); break;
        case Func::Sinh: r = sinh(a); break;
        case Func::Tan: r = tan(a); break;
        case Func::Atan: r = atan(a); break;
        case Func::Abs: r = abs(a); break;
        case Func::Sqrt:
          if (a < S(0)) domain_fail("sqrt of a negative number", x);
          r = sqrt(a);
          break;
      }
      break;
    }
  }
  if (!isfinite(r)) domain_fail("non-finite value", x);
  return r;
}

}  // namespace specsolve
