#include "bshq/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "bshq/error.hpp"

namespace bshq {

namespace {

std::shared_ptr<const Node> make_node(Node n) {
  return std::make_shared<const Node>(std::move(n));
}

} // namespace

std::string_view function_name(Function f) {
  switch (f) {
  case Function::Sqrt:
    return "sqrt";
  case Function::Sin:
    return "sin";
  case Function::Cos:
    return "cos";
  case Function::Exp:
    return "exp";
  case Function::Conj:
    return "conj";
  }
  return "?";
}

Expression::Expression(std::shared_ptr<const Node> node)
    : node_(std::move(node)) {}

Expression::Expression() : node_(nullptr) {}

Expression Expression::number(double value) {
  Node n;
  n.kind = NodeKind::Number;
  n.value = value;
  return Expression(make_node(std::move(n)));
}

Expression Expression::symbol(std::string name) {
  Node n;
  n.kind = NodeKind::Symbol;
  n.name = std::move(name);
  return Expression(make_node(std::move(n)));
}

Expression Expression::add(Expression lhs, Expression rhs) {
  Node n;
  n.kind = NodeKind::Add;
  n.lhs = std::move(lhs);
  n.rhs = std::move(rhs);
  return Expression(make_node(std::move(n)));
}

Expression Expression::sub(Expression lhs, Expression rhs) {
  Node n;
  n.kind = NodeKind::Sub;
  n.lhs = std::move(lhs);
  n.rhs = std::move(rhs);
  return Expression(make_node(std::move(n)));
}

Expression Expression::mul(Expression lhs, Expression rhs) {
  Node n;
  n.kind = NodeKind::Mul;
  n.lhs = std::move(lhs);
  n.rhs = std::move(rhs);
  return Expression(make_node(std::move(n)));
}

Expression Expression::div(Expression lhs, Expression rhs) {
  Node n;
  n.kind = NodeKind::Div;
  n.lhs = std::move(lhs);
  n.rhs = std::move(rhs);
  return Expression(make_node(std::move(n)));
}

Expression Expression::pow(Expression base, int exponent) {
  Node n;
  n.kind = NodeKind::Pow;
  n.lhs = std::move(base);
  n.exponent = exponent;
  return Expression(make_node(std::move(n)));
}

Expression Expression::neg(Expression operand) {
  Node n;
  n.kind = NodeKind::Neg;
  n.lhs = std::move(operand);
  return Expression(make_node(std::move(n)));
}

Expression Expression::call(Function f, Expression argument) {
  Node n;
  n.kind = NodeKind::Call;
  n.function = f;
  n.lhs = std::move(argument);
  return Expression(make_node(std::move(n)));
}

NodeKind Expression::kind() const {
  return node_ ? node_->kind : NodeKind::Number;
}
double Expression::value() const { return node_ ? node_->value : 0.0; }
const std::string &Expression::name() const { return node_->name; }
int Expression::exponent() const { return node_->exponent; }
Function Expression::function() const { return node_->function; }
const Expression &Expression::lhs() const { return node_->lhs; }
const Expression &Expression::rhs() const { return node_->rhs; }

// ---------------------------------------------------------------------------
// Parser

namespace {

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::optional<Function> lookup_function(std::string_view name) {
  if (name == "sqrt")
    return Function::Sqrt;
  if (name == "sin")
    return Function::Sin;
  if (name == "cos")
    return Function::Cos;
  if (name == "exp")
    return Function::Exp;
  if (name == "conj")
    return Function::Conj;
  return std::nullopt;
}

class Parser {
public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expression parse() {
    skip_space();
    if (at_end())
      fail("expected expression");
    Expression e = expr();
    skip_space();
    if (!at_end())
      fail(std::string("unexpected '") + text_[pos_] +
           "', expected operator or end of input");
    return e;
  }

private:
  std::string_view text_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string &message) const {
    throw ParseError(pos_ + 1, message);
  }

  bool at_end() const { return pos_ >= text_.size(); }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (!at_end() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expression expr() {
    Expression e = term();
    for (;;) {
      if (accept('+'))
        e = Expression::add(e, term());
      else if (accept('-'))
        e = Expression::sub(e, term());
      else
        return e;
    }
  }

  Expression term() {
    Expression e = factor();
    for (;;) {
      if (accept('*'))
        e = Expression::mul(e, factor());
      else if (accept('/'))
        e = Expression::div(e, factor());
      else
        return e;
    }
  }

  Expression factor() {
    Expression b = base();
    if (accept('^')) {
      skip_space();
      bool negative = false;
      if (!at_end() && text_[pos_] == '-') {
        negative = true;
        ++pos_;
        skip_space();
      }
      std::size_t start = pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      if (start == pos_)
        fail("expected integer exponent");
      if (!at_end() && (text_[pos_] == '.' || text_[pos_] == 'e' ||
                        text_[pos_] == 'E')) {
        pos_ = start;
        fail("exponents must be integers");
      }
      std::string digits(text_.substr(start, pos_ - start));
      if (digits.size() > 6)
        fail("exponent too large");
      int n = std::stoi(digits);
      b = Expression::pow(b, negative ? -n : n);
    }
    return b;
  }

  Expression base() {
    skip_space();
    if (at_end())
      fail("expected number, symbol, function call or '('");
    char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return Expression::neg(base());
    }
    if (c == '(') {
      ++pos_;
      Expression e = expr();
      if (!accept(')'))
        fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return number();
    if (is_ident_start(c)) {
      std::size_t start = pos_;
      while (!at_end() && is_ident_char(text_[pos_]))
        ++pos_;
      std::string name(text_.substr(start, pos_ - start));
      if (auto f = lookup_function(name)) {
        if (!accept('('))
          fail("expected '(' after function " + name);
        Expression arg = expr();
        if (!accept(')'))
          fail("expected ')'");
        return Expression::call(*f, arg);
      }
      return Expression::symbol(std::move(name));
    }
    fail(std::string("unexpected '") + c +
         "', expected number, symbol, function call or '('");
  }

  Expression number() {
    std::size_t start = pos_;
    auto digits = [&] {
      std::size_t s = pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      return pos_ - s;
    };
    std::size_t n = digits();
    if (!at_end() && text_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0)
      fail("malformed number");
    if (!at_end() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (!at_end() && (text_[pos_] == '+' || text_[pos_] == '-'))
        ++pos_;
      if (digits() == 0) {
        pos_ = save;
        fail("malformed exponent in number");
      }
    }
    std::string literal(text_.substr(start, pos_ - start));
    return Expression::number(std::strtod(literal.c_str(), nullptr));
  }
};

} // namespace

Expression parse_expression(std::string_view text) {
  return Parser(text).parse();
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

int precedence(const Expression &e) {
  switch (e.kind()) {
  case NodeKind::Add:
  case NodeKind::Sub:
    return 1;
  case NodeKind::Mul:
  case NodeKind::Div:
    return 2;
  case NodeKind::Pow:
    return 3;
  default:
    return 4;
  }
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (v < 0 || s[0] == '-')
    return "(" + s + ")";
  return s;
}

void render_into(const Expression &e, std::string &out);

void render_operand(const Expression &e, int min_prec, std::string &out) {
  bool wrap = precedence(e) < min_prec || e.kind() == NodeKind::Neg;
  if (wrap)
    out += '(';
  render_into(e, out);
  if (wrap)
    out += ')';
}

void render_into(const Expression &e, std::string &out) {
  switch (e.kind()) {
  case NodeKind::Number:
    out += format_number(e.value());
    return;
  case NodeKind::Symbol:
    out += e.name();
    return;
  case NodeKind::Add:
  case NodeKind::Sub: {
    render_operand(e.lhs(), 1, out);
    out += e.kind() == NodeKind::Add ? " + " : " - ";
    render_operand(e.rhs(), 2, out);
    return;
  }
  case NodeKind::Mul:
  case NodeKind::Div: {
    render_operand(e.lhs(), 2, out);
    out += e.kind() == NodeKind::Mul ? "*" : "/";
    render_operand(e.rhs(), 3, out);
    return;
  }
  case NodeKind::Pow: {
    // The base of a power may itself be a negation: "-x^2" is (-x)^2.
    const Expression &b = e.lhs();
    if (b.kind() == NodeKind::Neg || precedence(b) >= 4) {
      render_into(b, out);
    } else {
      out += '(';
      render_into(b, out);
      out += ')';
    }
    out += '^';
    out += std::to_string(e.exponent());
    return;
  }
  case NodeKind::Neg: {
    out += '-';
    const Expression &x = e.lhs();
    if (x.kind() == NodeKind::Neg || precedence(x) >= 4) {
      render_into(x, out);
    } else {
      out += '(';
      render_into(x, out);
      out += ')';
    }
    return;
  }
  case NodeKind::Call:
    out += function_name(e.function());
    out += '(';
    render_into(e.lhs(), out);
    out += ')';
    return;
  }
}

} // namespace

std::string render(const Expression &e) {
  std::string out;
  render_into(e, out);
  return out;
}

bool structurally_equal(const Expression &a, const Expression &b) {
  if (a.kind() != b.kind())
    return false;
  switch (a.kind()) {
  case NodeKind::Number:
    return a.value() == b.value();
  case NodeKind::Symbol:
    return a.name() == b.name();
  case NodeKind::Add:
  case NodeKind::Sub:
  case NodeKind::Mul:
  case NodeKind::Div:
    return structurally_equal(a.lhs(), b.lhs()) &&
           structurally_equal(a.rhs(), b.rhs());
  case NodeKind::Pow:
    return a.exponent() == b.exponent() && structurally_equal(a.lhs(), b.lhs());
  case NodeKind::Neg:
    return structurally_equal(a.lhs(), b.lhs());
  case NodeKind::Call:
    return a.function() == b.function() && structurally_equal(a.lhs(), b.lhs());
  }
  return false;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

template <class T> T int_power(T base, int n) {
  bool invert = n < 0;
  unsigned long long k = invert ? -static_cast<long long>(n) : n;
  T result(1);
  while (k) {
    if (k & 1)
      result *= base;
    base *= base;
    k >>= 1;
  }
  return invert ? T(1) / result : result;
}

complex eval_c(const Expression &e, const Bindings &b) {
  switch (e.kind()) {
  case NodeKind::Number:
    return e.value();
  case NodeKind::Symbol: {
    auto it = b.find(e.name());
    if (it != b.end())
      return it->second;
    if (e.name() == "i")
      return complex(0.0, 1.0);
    throw EvaluationError("unbound symbol '" + e.name() + "'");
  }
  case NodeKind::Add:
    return eval_c(e.lhs(), b) + eval_c(e.rhs(), b);
  case NodeKind::Sub:
    return eval_c(e.lhs(), b) - eval_c(e.rhs(), b);
  case NodeKind::Mul:
    return eval_c(e.lhs(), b) * eval_c(e.rhs(), b);
  case NodeKind::Div: {
    complex d = eval_c(e.rhs(), b);
    if (d == complex(0.0))
      throw EvaluationError("division by zero in '" + render(e) + "'");
    return eval_c(e.lhs(), b) / d;
  }
  case NodeKind::Pow:
    return int_power(eval_c(e.lhs(), b), e.exponent());
  case NodeKind::Neg:
    return -eval_c(e.lhs(), b);
  case NodeKind::Call: {
    complex x = eval_c(e.lhs(), b);
    switch (e.function()) {
    case Function::Sqrt:
      return std::sqrt(x);
    case Function::Sin:
      return std::sin(x);
    case Function::Cos:
      return std::cos(x);
    case Function::Exp:
      return std::exp(x);
    case Function::Conj:
      return std::conj(x);
    }
  }
  }
  return 0.0;
}

double eval_r(const Expression &e, const RealBindings &b) {
  switch (e.kind()) {
  case NodeKind::Number:
    return e.value();
  case NodeKind::Symbol: {
    auto it = b.find(e.name());
    if (it != b.end())
      return it->second;
    if (e.name() == "i")
      throw EvaluationError("imaginary unit 'i' in real-valued context");
    throw EvaluationError("unbound symbol '" + e.name() + "'");
  }
  case NodeKind::Add:
    return eval_r(e.lhs(), b) + eval_r(e.rhs(), b);
  case NodeKind::Sub:
    return eval_r(e.lhs(), b) - eval_r(e.rhs(), b);
  case NodeKind::Mul:
    return eval_r(e.lhs(), b) * eval_r(e.rhs(), b);
  case NodeKind::Div: {
    double d = eval_r(e.rhs(), b);
    if (d == 0.0)
      throw EvaluationError("division by zero in '" + render(e) + "'");
    return eval_r(e.lhs(), b) / d;
  }
  case NodeKind::Pow: {
    double x = eval_r(e.lhs(), b);
    if (x == 0.0 && e.exponent() < 0)
      throw EvaluationError("division by zero in '" + render(e) + "'");
    return int_power(x, e.exponent());
  }
  case NodeKind::Neg:
    return -eval_r(e.lhs(), b);
  case NodeKind::Call: {
    double x = eval_r(e.lhs(), b);
    switch (e.function()) {
    case Function::Sqrt:
      if (x < 0.0) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        throw EvaluationError("sqrt of negative value " + std::string(buf) +
                              " in '" + render(e) + "'");
      }
      return std::sqrt(x);
    case Function::Sin:
      return std::sin(x);
    case Function::Cos:
      return std::cos(x);
    case Function::Exp:
      return std::exp(x);
    case Function::Conj:
      return x;
    }
  }
  }
  return 0.0;
}

} // namespace

complex eval_complex(const Expression &e, const Bindings &bindings) {
  return eval_c(e, bindings);
}

double eval_real(const Expression &e, const RealBindings &bindings) {
  double v = eval_r(e, bindings);
  if (!std::isfinite(v))
    throw EvaluationError("non-finite value from '" + render(e) + "'");
  return v;
}

// ---------------------------------------------------------------------------
// Simplifying constructors and differentiation

namespace {

using E = Expression;

E s_neg(const E &a) {
  if (a.is_number())
    return E::number(-a.value());
  if (a.kind() == NodeKind::Neg)
    return a.lhs();
  return E::neg(a);
}

E s_add(const E &a, const E &b) {
  if (a.is_number() && b.is_number())
    return E::number(a.value() + b.value());
  if (a.is_number(0.0))
    return b;
  if (b.is_number(0.0))
    return a;
  if (b.kind() == NodeKind::Neg)
    return E::sub(a, b.lhs());
  return E::add(a, b);
}

E s_sub(const E &a, const E &b) {
  if (a.is_number() && b.is_number())
    return E::number(a.value() - b.value());
  if (b.is_number(0.0))
    return a;
  if (a.is_number(0.0))
    return s_neg(b);
  if (b.kind() == NodeKind::Neg)
    return E::add(a, b.lhs());
  return E::sub(a, b);
}

E s_mul(const E &a, const E &b) {
  if (a.is_number() && b.is_number())
    return E::number(a.value() * b.value());
  if (a.is_number(0.0) || b.is_number(0.0))
    return E::number(0.0);
  if (a.is_number(1.0))
    return b;
  if (b.is_number(1.0))
    return a;
  if (a.is_number(-1.0))
    return s_neg(b);
  if (b.is_number(-1.0))
    return s_neg(a);
  if (a.kind() == NodeKind::Neg)
    return s_neg(s_mul(a.lhs(), b));
  if (b.kind() == NodeKind::Neg)
    return s_neg(s_mul(a, b.lhs()));
  // Keep numeric factors on the left.
  if (b.is_number() && !a.is_number())
    return s_mul(b, a);
  if (a.is_number() && b.kind() == NodeKind::Mul && b.lhs().is_number())
    return E::mul(E::number(a.value() * b.lhs().value()), b.rhs());
  return E::mul(a, b);
}

E s_div(const E &a, const E &b) {
  if (a.is_number(0.0) && !b.is_number(0.0))
    return E::number(0.0);
  if (b.is_number(1.0))
    return a;
  if (a.is_number() && b.is_number() && b.value() != 0.0)
    return E::number(a.value() / b.value());
  return E::div(a, b);
}

E s_pow(const E &a, int n) {
  if (n == 0)
    return E::number(1.0);
  if (n == 1)
    return a;
  if (a.is_number())
    return E::number(int_power(a.value(), n));
  return E::pow(a, n);
}

} // namespace

Expression differentiate(const Expression &e, std::string_view symbol) {
  switch (e.kind()) {
  case NodeKind::Number:
    return E::number(0.0);
  case NodeKind::Symbol:
    return E::number(e.name() == symbol ? 1.0 : 0.0);
  case NodeKind::Add:
    return s_add(differentiate(e.lhs(), symbol), differentiate(e.rhs(), symbol));
  case NodeKind::Sub:
    return s_sub(differentiate(e.lhs(), symbol), differentiate(e.rhs(), symbol));
  case NodeKind::Mul: {
    E da = differentiate(e.lhs(), symbol);
    E db = differentiate(e.rhs(), symbol);
    return s_add(s_mul(da, e.rhs()), s_mul(e.lhs(), db));
  }
  case NodeKind::Div: {
    E da = differentiate(e.lhs(), symbol);
    E db = differentiate(e.rhs(), symbol);
    if (db.is_number(0.0))
      return s_div(da, e.rhs());
    return s_div(s_sub(s_mul(da, e.rhs()), s_mul(e.lhs(), db)),
                 s_pow(e.rhs(), 2));
  }
  case NodeKind::Pow: {
    int n = e.exponent();
    E du = differentiate(e.lhs(), symbol);
    if (n == 0 || du.is_number(0.0))
      return E::number(0.0);
    return s_mul(s_mul(E::number(n), s_pow(e.lhs(), n - 1)), du);
  }
  case NodeKind::Neg:
    return s_neg(differentiate(e.lhs(), symbol));
  case NodeKind::Call: {
    const E &u = e.lhs();
    E du = differentiate(u, symbol);
    switch (e.function()) {
    case Function::Sqrt:
      if (du.is_number(0.0))
        return E::number(0.0);
      return s_div(du, s_mul(E::number(2.0), e));
    case Function::Sin:
      return s_mul(E::call(Function::Cos, u), du);
    case Function::Cos:
      return s_mul(s_neg(E::call(Function::Sin, u)), du);
    case Function::Exp:
      return s_mul(e, du);
    case Function::Conj:
      throw ModelError("cannot differentiate conj(" + render(u) +
                       "): not a differentiable node");
    }
  }
  }
  return E::number(0.0);
}

Expression
substitute(const Expression &e,
           const std::map<std::string, Expression, std::less<>> &with) {
  switch (e.kind()) {
  case NodeKind::Number:
    return e;
  case NodeKind::Symbol: {
    auto it = with.find(e.name());
    return it == with.end() ? e : it->second;
  }
  case NodeKind::Add:
    return E::add(substitute(e.lhs(), with), substitute(e.rhs(), with));
  case NodeKind::Sub:
    return E::sub(substitute(e.lhs(), with), substitute(e.rhs(), with));
  case NodeKind::Mul:
    return E::mul(substitute(e.lhs(), with), substitute(e.rhs(), with));
  case NodeKind::Div:
    return E::div(substitute(e.lhs(), with), substitute(e.rhs(), with));
  case NodeKind::Pow:
    return E::pow(substitute(e.lhs(), with), e.exponent());
  case NodeKind::Neg:
    return E::neg(substitute(e.lhs(), with));
  case NodeKind::Call:
    return E::call(e.function(), substitute(e.lhs(), with));
  }
  return e;
}

Expression bind_constants(const Expression &e, const RealBindings &constants) {
  std::map<std::string, Expression, std::less<>> with;
  for (const auto &[name, value] : constants)
    with.emplace(name, E::number(value));
  return substitute(e, with);
}

namespace {

void collect_symbols(const Expression &e, std::set<std::string> &out) {
  switch (e.kind()) {
  case NodeKind::Number:
    return;
  case NodeKind::Symbol:
    out.insert(e.name());
    return;
  case NodeKind::Add:
  case NodeKind::Sub:
  case NodeKind::Mul:
  case NodeKind::Div:
    collect_symbols(e.lhs(), out);
    collect_symbols(e.rhs(), out);
    return;
  case NodeKind::Pow:
  case NodeKind::Neg:
  case NodeKind::Call:
    collect_symbols(e.lhs(), out);
    return;
  }
}

std::optional<std::size_t> numbered(std::string_view symbol,
                                    std::string_view prefix) {
  if (symbol.size() <= prefix.size() || symbol.substr(0, prefix.size()) != prefix)
    return std::nullopt;
  std::string_view digits = symbol.substr(prefix.size());
  if (digits[0] == '0' || digits.size() > 6)
    return std::nullopt;
  std::size_t v = 0;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      return std::nullopt;
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  return v;
}

} // namespace

std::set<std::string> symbols_of(const Expression &e) {
  std::set<std::string> out;
  collect_symbols(e, out);
  return out;
}

std::optional<std::size_t> action_axis(std::string_view symbol) {
  return numbered(symbol, "A");
}

std::optional<std::size_t> chi_axis(std::string_view symbol) {
  return numbered(symbol, "chi");
}

std::string action_symbol(std::size_t axis_one_based) {
  return "A" + std::to_string(axis_one_based);
}

std::string chi_symbol(std::size_t axis_one_based) {
  return "chi" + std::to_string(axis_one_based);
}

// ---------------------------------------------------------------------------
// Affine analysis

namespace {

constexpr int kNonPolynomial = 1 << 20;

// Polynomial degree in the action symbols, kNonPolynomial if not polynomial.
int action_degree(const Expression &e) {
  switch (e.kind()) {
  case NodeKind::Number:
    return 0;
  case NodeKind::Symbol:
    return action_axis(e.name()) ? 1 : 0;
  case NodeKind::Add:
  case NodeKind::Sub:
    return std::max(action_degree(e.lhs()), action_degree(e.rhs()));
  case NodeKind::Mul:
    return std::min(kNonPolynomial,
                    action_degree(e.lhs()) + action_degree(e.rhs()));
  case NodeKind::Div:
    return action_degree(e.rhs()) == 0 ? action_degree(e.lhs())
                                       : kNonPolynomial;
  case NodeKind::Pow: {
    int d = action_degree(e.lhs());
    if (d == 0)
      return 0;
    if (e.exponent() < 0)
      return kNonPolynomial;
    return static_cast<int>(
        std::min<long long>(kNonPolynomial, 1LL * d * e.exponent()));
  }
  case NodeKind::Neg:
    return action_degree(e.lhs());
  case NodeKind::Call:
    return action_degree(e.lhs()) == 0 ? 0 : kNonPolynomial;
  }
  return kNonPolynomial;
}

} // namespace

AffineForm affine_form(const Expression &e, std::size_t dof,
                       const RealBindings &constants) {
  for (const auto &s : symbols_of(e)) {
    if (auto k = action_axis(s)) {
      if (*k > dof)
        throw ModelError("'" + render(e) + "' references " + s +
                         " but the model has " + std::to_string(dof) +
                         " degrees of freedom");
    } else if (chi_axis(s) || s == "alpha") {
      throw ModelError("'" + render(e) + "' may only reference actions and "
                                         "constants, found " + s);
    } else if (!constants.contains(s)) {
      throw ModelError("'" + render(e) + "' references unknown symbol '" + s +
                       "'");
    }
  }
  if (action_degree(e) > 1)
    throw ModelError("constraint '" + render(e) + "' is not affine in the actions");

  RealBindings b = constants;
  for (std::size_t k = 1; k <= dof; ++k)
    b[action_symbol(k)] = 0.0;
  AffineForm form;
  form.constant = eval_real(e, b);
  form.coefficients.resize(dof);
  for (std::size_t k = 1; k <= dof; ++k) {
    b[action_symbol(k)] = 1.0;
    form.coefficients[k - 1] = eval_real(e, b) - form.constant;
    b[action_symbol(k)] = 0.0;
  }
  return form;
}

// ---------------------------------------------------------------------------
// First-degree observable splitting

namespace {

struct ShiftKey {
  std::size_t axis;
  bool raising;
  auto operator<=>(const ShiftKey &) const = default;
};

struct Split {
  Expression constant;
  std::map<ShiftKey, Expression> shifts;
};

[[noreturn]] void degree_error(const Expression &whole) {
  throw ModelError("observable '" + render(whole) +
                   "' must be first-degree only in chi and conj(chi)");
}

Split split(const Expression &e, std::size_t dof, const Expression &whole) {
  switch (e.kind()) {
  case NodeKind::Number:
    return {e, {}};
  case NodeKind::Symbol: {
    if (auto k = chi_axis(e.name())) {
      if (*k > dof)
        throw ModelError("observable references " + e.name() +
                         " but the model has " + std::to_string(dof) +
                         " degrees of freedom");
      return {E::number(0.0), {{ShiftKey{*k - 1, false}, E::number(1.0)}}};
    }
    return {e, {}};
  }
  case NodeKind::Add:
  case NodeKind::Sub: {
    bool add = e.kind() == NodeKind::Add;
    Split a = split(e.lhs(), dof, whole);
    Split b = split(e.rhs(), dof, whole);
    Split out{add ? s_add(a.constant, b.constant) : s_sub(a.constant, b.constant),
              a.shifts};
    for (auto &[key, coef] : b.shifts) {
      auto it = out.shifts.find(key);
      if (it == out.shifts.end())
        out.shifts.emplace(key, add ? coef : s_neg(coef));
      else
        it->second = add ? s_add(it->second, coef) : s_sub(it->second, coef);
    }
    return out;
  }
  case NodeKind::Mul: {
    Split a = split(e.lhs(), dof, whole);
    Split b = split(e.rhs(), dof, whole);
    if (!a.shifts.empty() && !b.shifts.empty())
      degree_error(whole);
    Split out{s_mul(a.constant, b.constant), {}};
    for (auto &[key, coef] : a.shifts)
      out.shifts.emplace(key, s_mul(coef, b.constant));
    for (auto &[key, coef] : b.shifts)
      out.shifts.emplace(key, s_mul(a.constant, coef));
    return out;
  }
  case NodeKind::Div: {
    Split a = split(e.lhs(), dof, whole);
    Split b = split(e.rhs(), dof, whole);
    if (!b.shifts.empty())
      degree_error(whole);
    Split out{s_div(a.constant, b.constant), {}};
    for (auto &[key, coef] : a.shifts)
      out.shifts.emplace(key, s_div(coef, b.constant));
    return out;
  }
  case NodeKind::Pow: {
    Split a = split(e.lhs(), dof, whole);
    if (a.shifts.empty())
      return {e, {}};
    if (e.exponent() == 1)
      return a;
    if (e.exponent() == 0)
      return {E::number(1.0), {}};
    degree_error(whole);
  }
  case NodeKind::Neg: {
    Split a = split(e.lhs(), dof, whole);
    Split out{s_neg(a.constant), {}};
    for (auto &[key, coef] : a.shifts)
      out.shifts.emplace(key, s_neg(coef));
    return out;
  }
  case NodeKind::Call: {
    Split a = split(e.lhs(), dof, whole);
    if (e.function() == Function::Conj) {
      Split out{a.shifts.empty() ? e : E::call(Function::Conj, a.constant), {}};
      for (auto &[key, coef] : a.shifts)
        out.shifts.emplace(ShiftKey{key.axis, !key.raising},
                           E::call(Function::Conj, coef));
      return out;
    }
    if (!a.shifts.empty())
      degree_error(whole);
    return {e, {}};
  }
  }
  return {e, {}};
}

} // namespace

ObservableExpr split_observable(const Expression &e, std::size_t dof) {
  Split s = split(e, dof, e);
  ObservableExpr out;
  out.diagonal = s.constant;
  for (auto &[key, coef] : s.shifts) {
    if (coef.is_number(0.0))
      continue;
    (key.raising ? out.raising : out.lowering).emplace(key.axis, coef);
  }
  return out;
}

} // namespace bshq
