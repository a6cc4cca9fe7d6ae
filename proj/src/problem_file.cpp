#include "specsolve/problem_file.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace specsolve {

namespace {

struct Token {
  enum Type { Number, Ident, Punct, End };
  Type type = End;
  std::string text;
  long double value = 0;
  int line = 1, col = 1;
};

[[noreturn]] void parse_fail(int line, int col, const std::string& msg) {
  throw Error(ErrorKind::ParseError, std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
}

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

std::vector<Token> lex(std::string_view text, int line, bool comments) {
  std::vector<Token> out;
  int col = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      ++col;
      continue;
    }
    if (comments && c == '#') break;
    Token t;
    t.line = line;
    t.col = col;
    std::size_t j = i + 1;
    if (is_digit(c) || (c == '.' && i + 1 < text.size() && is_digit(text[i + 1]))) {
      j = i;
      while (j < text.size() && is_digit(text[j])) ++j;
      if (j < text.size() && text[j] == '.') {
        ++j;
        while (j < text.size() && is_digit(text[j])) ++j;
      }
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < text.size() && is_digit(text[k])) {
          while (k < text.size() && is_digit(text[k])) ++k;
          j = k;
        }
      }
      t.type = Token::Number;
      t.text = std::string(text.substr(i, j - i));
      t.value = std::strtold(t.text.c_str(), nullptr);
      if (!std::isfinite(t.value)) parse_fail(line, col, "number out of range: " + t.text);
    } else if (is_ident_start(c)) {
      while (j < text.size() && is_ident_char(text[j])) ++j;
      t.type = Token::Ident;
      t.text = std::string(text.substr(i, j - i));
    } else {
      // one character; a multi-byte UTF-8 sequence counts as one column
      if (static_cast<unsigned char>(c) >= 0xC0)
        while (j < text.size() && (static_cast<unsigned char>(text[j]) & 0xC0) == 0x80) ++j;
      t.type = Token::Punct;
      t.text = std::string(text.substr(i, j - i));
      col += 1 - static_cast<int>(j - i);
    }
    col += static_cast<int>(j - i);
    i = j;
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

const std::vector<std::string> kOperand = {"number", "'x'", "function name", "'('", "'-'"};

class Parser {
 public:
  Parser(std::vector<Token> toks, std::string end_label) : toks_(std::move(toks)), end_label_(std::move(end_label)) {}

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (t.type != Token::End) ++pos_;
    return t;
  }
  bool at(std::string_view p) const { return peek().type == Token::Punct && peek().text == p; }
  bool accept(std::string_view p) {
    if (!at(p)) return false;
    next();
    return true;
  }

  [[noreturn]] void fail(const Token& t, const std::vector<std::string>& expected) const {
    std::string msg = expected.size() == 1 ? "expected " : "expected one of ";
    for (std::size_t i = 0; i < expected.size(); ++i) msg += (i ? ", " : "") + expected[i];
    msg += "; found " + describe(t);
    parse_fail(t.line, t.col, msg);
  }

  std::string describe(const Token& t) const { return t.type == Token::End ? end_label_ : "'" + t.text + "'"; }

  void expect(std::string_view p) {
    if (!accept(p)) fail(peek(), {"'" + std::string(p) + "'"});
  }

  // an operand is complete; the only ways on are an operator or the closer
  void close(std::string_view closer) {
    if (closer.empty() ? peek().type == Token::End : accept(closer)) return;
    fail(peek(), {"'+'", "'-'", "'*'", "'/'", "'^'", closer.empty() ? end_label_ : "'" + std::string(closer) + "'"});
  }

  void end() {
    if (peek().type != Token::End) fail(peek(), {end_label_});
  }

  Expression expr() {
    Expression e = term();
    for (;;) {
      if (accept("+"))
        e = Expression::binary(Expression::Kind::Add, e, term());
      else if (accept("-"))
        e = Expression::binary(Expression::Kind::Sub, e, term());
      else
        return e;
    }
  }

  long double integer(int lo) {
    const Token& t = peek();
    if (t.type != Token::Number || t.value != std::floor(t.value) || t.value > 1e9L) fail(t, {"integer"});
    if (t.value < lo) parse_fail(t.line, t.col, "value must be at least " + std::to_string(lo));
    next();
    return t.value;
  }

  long double constant(const std::string& what) {
    const Token start = peek();
    const Expression e = expr();
    if (!e.is_constant()) parse_fail(start.line, start.col, what + " must not depend on x");
    try {
      return e(0.0L);
    } catch (const Error& err) {
      parse_fail(start.line, start.col, what + ": " + err.what());
    }
  }

 private:
  Expression term() {
    Expression e = unary();
    for (;;) {
      if (accept("*"))
        e = Expression::binary(Expression::Kind::Mul, e, unary());
      else if (accept("/"))
        e = Expression::binary(Expression::Kind::Div, e, unary());
      else
        return e;
    }
  }

  Expression unary() {
    if (accept("-")) return Expression::negate(unary());
    Expression base = primary();
    if (accept("^")) return Expression::binary(Expression::Kind::Pow, base, unary());
    return base;
  }

  Expression primary() {
    const Token& t = peek();
    if (t.type == Token::Number) {
      next();
      return Expression::number(t.value);
    }
    if (t.type == Token::Ident) {
      if (t.text == "x") {
        next();
        return Expression::variable();
      }
      Func f;
      if (func_from_name(t.text, f)) {
        next();
        expect("(");
        Expression arg = expr();
        close(")");
        return Expression::call(f, arg);
      }
      fail(t, kOperand);
    }
    if (accept("(")) {
      Expression e = expr();
      close(")");
      return e;
    }
    fail(t, kOperand);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::string end_label_;
};

const std::vector<std::string> kLineStarts = {"'name'", "'order'", "'a<k>'", "'rhs'", "'exact'", "'tol'", "'n'",
                                              "'method'", "'dirichlet'", "'neumann'", "'deriv'", "'integral'"};
const std::vector<std::string> kFunctionals = {"'dirichlet'", "'neumann'", "'deriv'", "'integral'"};
const std::vector<std::string> kMethods = {"'cs'", "'us'", "'pus'", "'colloc'", "'gcs'"};

bool is_functional(const Token& t) {
  return t.type == Token::Ident &&
         (t.text == "dirichlet" || t.text == "neumann" || t.text == "deriv" || t.text == "integral");
}

double point_arg(Parser& p) {
  const Token start = p.peek();
  const long double x = p.constant("constraint point");
  if (!(x >= -1.0L && x <= 1.0L)) parse_fail(start.line, start.col, "constraint point must lie in [-1, 1]");
  return static_cast<double>(x);
}

ConstraintFunctional functional(Parser& p) {
  const Token t = p.peek();
  if (!is_functional(t)) p.fail(t, kFunctionals);
  p.next();
  if (t.text == "integral") return ConstraintFunctional::integral();
  p.expect("(");
  int q = t.text == "neumann" ? 1 : 0;
  if (t.text == "deriv") {
    q = static_cast<int>(p.integer(0));
    p.expect(",");
  }
  const double x0 = point_arg(p);
  p.close(")");
  return ConstraintFunctional::derivative(q, x0);
}

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string functional_text(const ConstraintFunctional& c) {
  if (c.kind == ConstraintFunctional::Kind::Integral) return "integral";
  if (c.order == 0) return "dirichlet(" + num17(c.x0) + ")";
  if (c.order == 1) return "neumann(" + num17(c.x0) + ")";
  return "deriv(" + std::to_string(c.order) + ", " + num17(c.x0) + ")";
}

}  // namespace

Expression parse_expression(std::string_view text) {
  Parser p(lex(text, 1, false), "end of input");
  Expression e = p.expr();
  p.close("");
  return e;
}

ProblemFile parse_problem(std::string_view text) {
  ProblemFile pf;
  std::map<std::string, int> seen;
  std::vector<std::pair<int, int>> coeff_lines;  // (k, line)
  int last_constraint_line = 0, line_no = 0;
  bool have_order = false;

  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t stop = text.find('\n', start);
    if (stop == std::string_view::npos) stop = text.size();
    std::string_view line = text.substr(start, stop - start);
    start = stop + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    Parser p(lex(line, line_no, true), "end of line");
    const Token first = p.peek();
    if (first.type == Token::End) continue;

    if (is_functional(first) || first.type == Token::Number || (first.type == Token::Punct && first.text == "-")) {
      std::vector<double> w;
      std::vector<ConstraintFunctional> parts;
      double sign = p.accept("-") ? -1.0 : 1.0;
      for (;;) {
        double weight = sign;
        if (p.peek().type == Token::Number) {
          weight *= static_cast<double>(p.next().value);
          p.expect("*");
        }
        parts.push_back(functional(p));
        w.push_back(weight);
        if (p.accept("+"))
          sign = 1.0;
        else if (p.accept("-"))
          sign = -1.0;
        else
          break;
      }
      if (!p.accept("=")) p.fail(p.peek(), {"'+'", "'-'", "'='"});
      const long double v = p.constant("constraint value");
      p.end();
      pf.constraints.push_back(parts.size() == 1 && w[0] == 1.0 ? parts[0]
                                                                 : ConstraintFunctional::combination(w, parts));
      pf.targets.push_back(static_cast<double>(v));
      last_constraint_line = line_no;
      continue;
    }

    if (first.type != Token::Ident) p.fail(first, kLineStarts);
    const std::string key = first.text;
    const bool coeff_key =
        key.size() > 1 && key[0] == 'a' && key.find_first_not_of("0123456789", 1) == std::string::npos;
    if (!coeff_key && key != "name" && key != "order" && key != "rhs" && key != "exact" && key != "tol" &&
        key != "n" && key != "method")
      p.fail(first, kLineStarts);
    if (seen.count(key))
      parse_fail(first.line, first.col, "duplicate '" + key + "' (first set on line " + std::to_string(seen[key]) + ")");
    seen[key] = line_no;
    p.next();
    const Token eq = p.peek();
    p.expect("=");

    if (key == "name") {
      std::string_view rest = line.substr(static_cast<std::size_t>(eq.col));
      rest = rest.substr(0, rest.find('#'));
      pf.name = trim(rest);
      if (pf.name.empty()) parse_fail(line_no, eq.col + 1, "expected a name; found end of line");
    } else if (key == "order") {
      pf.order = static_cast<int>(p.integer(1));
      have_order = true;
      p.end();
    } else if (coeff_key) {
      if (key.size() > 10) parse_fail(first.line, first.col, "coefficient index too large");
      const int k = std::stoi(key.substr(1));
      if (static_cast<int>(pf.coeffs.size()) <= k) pf.coeffs.resize(static_cast<std::size_t>(k) + 1);
      pf.coeffs[static_cast<std::size_t>(k)] = p.expr();
      p.close("");
      coeff_lines.emplace_back(k, line_no);
    } else if (key == "rhs") {
      pf.rhs = p.expr();
      p.close("");
    } else if (key == "exact") {
      pf.exact = p.expr();
      p.close("");
    } else if (key == "tol") {
      const Token t = p.peek();
      const long double tol = p.constant("tol");
      if (!(tol > 0)) parse_fail(t.line, t.col, "tol must be positive");
      pf.tol = static_cast<double>(tol);
      p.end();
    } else if (key == "n") {
      pf.n = static_cast<Index>(p.integer(2));
      p.end();
    } else if (key == "method") {
      const Token t = p.peek();
      if (t.type != Token::Ident ||
          (t.text != "cs" && t.text != "us" && t.text != "pus" && t.text != "colloc" && t.text != "gcs"))
        p.fail(t, kMethods);
      pf.method = t.text;
      p.next();
      p.end();
    }
  }

  const int last_line = std::max(1, line_no);
  if (!have_order) parse_fail(last_line, 1, "missing 'order = m'");
  for (const auto& [k, ln] : coeff_lines)
    if (k >= pf.order)
      parse_fail(ln, 1, "coefficient a" + std::to_string(k) + " needs index below order " + std::to_string(pf.order));
  pf.coeffs.resize(static_cast<std::size_t>(pf.order));
  if (static_cast<int>(pf.constraints.size()) != pf.order)
    parse_fail(last_constraint_line ? last_constraint_line : last_line, 1,
               "order " + std::to_string(pf.order) + " needs " + std::to_string(pf.order) + " constraints; found " +
                   std::to_string(pf.constraints.size()));
  return pf;
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open problem file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_problem(ss.str());
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ParseError) throw;
    // "parse-error: L:C: ..." becomes "parse-error: path:L:C: ..."
    std::string msg = e.what();
    const std::size_t colon = msg.find(": ");
    throw Error(ErrorKind::ParseError, path + ":" + msg.substr(colon + 2));
  }
}

std::string format_problem(const ProblemFile& p) {
  std::ostringstream os;
  if (!p.name.empty()) os << "name = " << p.name << "\n";
  os << "order = " << p.order << "\n";
  for (std::size_t k = 0; k < p.coeffs.size(); ++k)
    if (p.coeffs[k]) os << "a" << k << " = " << p.coeffs[k]->to_string() << "\n";
  os << "rhs = " << p.rhs.to_string() << "\n";
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    const ConstraintFunctional& c = p.constraints[i];
    if (c.kind == ConstraintFunctional::Kind::Combination) {
      for (std::size_t j = 0; j < c.parts.size(); ++j) {
        const double w = c.weights[j];
        if (j == 0)
          os << (std::signbit(w) ? "-" : "");
        else
          os << (std::signbit(w) ? " - " : " + ");
        os << num17(std::abs(w)) << "*" << functional_text(c.parts[j]);
      }
    } else {
      os << functional_text(c);
    }
    os << " = " << num17(p.targets[i]) << "\n";
  }
  if (p.exact) os << "exact = " << p.exact->to_string() << "\n";
  os << "tol = " << num17(p.tol) << "\n";
  if (p.n) os << "n = " << *p.n << "\n";
  if (p.method) os << "method = " << *p.method << "\n";
  return os.str();
}

OdeProblem ProblemFile::to_problem() const {
  auto series = [this](const Expression& e) {
    if (e.is_constant()) return ChebSeries<double>(Vec<double>::Constant(1, static_cast<double>(e(0.0L))));
    AdaptiveOptions o;
    o.tol = tol;
    o.long_double_points = true;
    return adaptive_approx([&e](long double x) { return e(x); }, o);
  };
  OdeProblem prob;
  prob.order = order;
  prob.coeffs.resize(static_cast<std::size_t>(order));
  for (int k = 0; k < order; ++k)
    if (k < static_cast<int>(coeffs.size()) && coeffs[static_cast<std::size_t>(k)])
      prob.coeffs[static_cast<std::size_t>(k)] = series(*coeffs[static_cast<std::size_t>(k)]);
  prob.rhs = series(rhs);
  prob.constraints = constraints;
  prob.targets = Eigen::Map<const VectorXd>(targets.data(), static_cast<Index>(targets.size()));
  prob.validate();
  return prob;
}

}  // namespace specsolve
