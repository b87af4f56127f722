#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "orbitforge/jet.hpp"

namespace orbitforge {

/// Named real parameters referenced from expressions ("params" in spec files).
using Params = std::map<std::string, double, std::less<>>;

enum class ExprOp {
  constant,
  pi,
  var,
  param,
  neg,
  sin,
  cos,
  exp,
  log,
  bump,
  step,
  add,
  sub,
  mul,
  div,
  pow,
};

/// Immutable expression tree over the variable z.
///
/// Grammar (EBNF; whitespace ignored):
///
///     expr    = term { ("+" | "-") term } ;
///     term    = unary { ("*" | "/") unary } ;
///     unary   = ("-" | "+") unary | power ;
///     power   = primary { "^" integer } ;
///     primary = number | "z" | "pi" | param
///             | func "(" expr ")"
///             | "pow" "(" expr "," integer ")"
///             | "(" expr ")" ;
///     func    = "sin" | "cos" | "exp" | "log" | "bump" | "step" ;
///     integer = [ "-" ] digit { digit } ;
///
/// so that pow binds tighter than unary minus, which binds tighter than
/// * and /, which bind tighter than + and -. Binary operators are
/// left-associative. `bump(u)` is exp(-1/(1-u^2)) on |u| < 1 and 0 elsewhere;
/// `step(u)` is the C-infinity step that is 0 for u <= 0 and 1 for u >= 1.
class Expr {
 public:
  struct Node;

  Expr();  // the constant 0

  static Expr constant(double value);
  static Expr pi();
  static Expr var();
  static Expr param(std::string name);
  static Expr unary(ExprOp op, Expr arg);
  static Expr binary(ExprOp op, Expr lhs, Expr rhs);
  static Expr power(Expr base, int exponent);

  ExprOp op() const noexcept;
  double value() const noexcept;            // constant nodes
  const std::string& name() const noexcept;  // param nodes
  int exponent() const noexcept;             // pow nodes
  std::size_t arity() const noexcept;
  const Expr& child(std::size_t i) const;

  /// Replaces every occurrence of z by `replacement`.
  Expr substitute(const Expr& replacement) const;

  /// Canonical text form; parse(to_string()) reproduces this tree.
  std::string to_string() const;

  /// Structural equality (constants compared bitwise).
  friend bool operator==(const Expr& a, const Expr& b);

  /// Names of all parameters referenced by the tree.
  std::vector<std::string> param_names() const;

 private:
  explicit Expr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

/// Parses `text`. Identifiers other than z, pi and the function names must
/// appear in `known_params`; otherwise UnknownIdentifier is thrown.
/// Syntax errors carry a 0-based byte position.
Expr parse(std::string_view text, const Params& known_params = {});

/// Flattened postfix form of an expression with parameters bound; the
/// evaluation engine behind ScalarFamily.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  CompiledExpr(const Expr& expr, const Params& params);

  double value(double z) const;
  Jet jet(const Jet& z) const;

 private:
  struct Instr {
    ExprOp op;
    double value = 0.0;
    int exponent = 0;
  };
  std::vector<Instr> code_;
  std::size_t max_depth_ = 0;
};

}  // namespace orbitforge
