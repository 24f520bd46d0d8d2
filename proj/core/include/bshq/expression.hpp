#ifndef BSHQ_EXPRESSION_HPP
#define BSHQ_EXPRESSION_HPP

#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace bshq {

using complex = std::complex<double>;

enum class NodeKind { Number, Symbol, Add, Sub, Mul, Div, Pow, Neg, Call };

enum class Function { Sqrt, Sin, Cos, Exp, Conj };

std::string_view function_name(Function f);

struct Node;

/// Immutable expression tree. Copies share structure.
///
/// Grammar:
///   expr   = term { ("+" | "-") term }
///   term   = factor { ("*" | "/") factor }
///   factor = base [ "^" integer ]
///   base   = number | symbol | func "(" expr ")" | "(" expr ")" | "-" base
///
/// Symbols follow the conventions `A<k>` (action k), `chi<k>` (Heisenberg
/// function k), `alpha` (angle of a one-degree-of-freedom potential) and free
/// identifiers for named constants. `hbar` and `i` are reserved: the former is
/// bound to the lattice action unit, the latter to the imaginary unit.
class Expression {
public:
  Expression();

  static Expression number(double value);
  static Expression symbol(std::string name);
  static Expression add(Expression lhs, Expression rhs);
  static Expression sub(Expression lhs, Expression rhs);
  static Expression mul(Expression lhs, Expression rhs);
  static Expression div(Expression lhs, Expression rhs);
  static Expression pow(Expression base, int exponent);
  static Expression neg(Expression operand);
  static Expression call(Function f, Expression argument);

  NodeKind kind() const;
  double value() const;             // Number
  const std::string &name() const;  // Symbol
  int exponent() const;             // Pow
  Function function() const;        // Call
  const Expression &lhs() const;    // binary nodes, Pow base, Neg/Call operand
  const Expression &rhs() const;    // binary nodes

  bool is_number() const { return kind() == NodeKind::Number; }
  bool is_number(double v) const { return is_number() && value() == v; }

private:
  explicit Expression(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

struct Node {
  NodeKind kind = NodeKind::Number;
  double value = 0.0;
  std::string name;
  int exponent = 0;
  Function function = Function::Sqrt;
  Expression lhs;
  Expression rhs;
};

Expression parse_expression(std::string_view text);

/// Canonical text form. Reparsing yields a structurally identical tree for
/// any tree produced by parse_expression.
std::string render(const Expression &e);

bool structurally_equal(const Expression &a, const Expression &b);

/// Symbol bindings for evaluation. `i` is implicitly the imaginary unit unless
/// bound explicitly.
using Bindings = std::map<std::string, complex, std::less<>>;
using RealBindings = std::map<std::string, double, std::less<>>;

complex eval_complex(const Expression &e, const Bindings &bindings);

/// Real-context evaluation. Throws EvaluationError on unbound symbols, on sqrt
/// of a negative value, on division by zero, on non-finite results and on use
/// of the imaginary unit.
double eval_real(const Expression &e, const RealBindings &bindings);

/// Symbolic derivative with light simplification. Throws ModelError on conj.
Expression differentiate(const Expression &e, std::string_view symbol);

/// Replace symbols by expressions. Unmentioned symbols are kept.
Expression substitute(const Expression &e,
                      const std::map<std::string, Expression, std::less<>> &with);

/// Replace named constants by numeric literals.
Expression bind_constants(const Expression &e, const RealBindings &constants);

std::set<std::string> symbols_of(const Expression &e);

// Symbol classification helpers. Axis numbers are 1-based as written.
std::optional<std::size_t> action_axis(std::string_view symbol);
std::optional<std::size_t> chi_axis(std::string_view symbol);
std::string action_symbol(std::size_t axis_one_based);
std::string chi_symbol(std::size_t axis_one_based);

/// Affine form sum_k coefficients[k] * A_{k+1} + constant.
struct AffineForm {
  std::vector<double> coefficients;
  double constant = 0.0;
};

/// Extract the affine form of e over A_1..A_dof. All other symbols must be
/// bound in `constants`. Throws ModelError if e is not affine.
AffineForm affine_form(const Expression &e, std::size_t dof,
                       const RealBindings &constants);

/// A first-degree Heisenberg observable
///   F0(A) + sum_k [ F_k(A) chi_k + G_k(A) conj(chi_k) ].
/// Axis indices are 0-based.
struct ObservableExpr {
  Expression diagonal;
  std::map<std::size_t, Expression> lowering; // coefficient of chi_k
  std::map<std::size_t, Expression> raising;  // coefficient of conj(chi_k)
};

/// Split e into its first-degree form. Throws ModelError when a product of two
/// shift symbols appears or when chi_k refers to an axis beyond dof.
ObservableExpr split_observable(const Expression &e, std::size_t dof);

} // namespace bshq

#endif
