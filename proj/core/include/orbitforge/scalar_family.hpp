#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <string_view>

#include "orbitforge/expr.hpp"
#include "orbitforge/jet.hpp"

namespace orbitforge {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const noexcept { return hi - lo; }
  double mid() const noexcept { return 0.5 * (lo + hi); }
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
};

/// A scalar function of z on the open interval (-eps, eps), defined by an
/// expression with bound parameters. Evaluable to values and to jets of any
/// order up to kMaxJetOrder. Immutable; copies share the compiled form.
class ScalarFamily {
 public:
  static constexpr double kUnbounded = std::numeric_limits<double>::infinity();

  ScalarFamily();  // the zero function on the whole line
  explicit ScalarFamily(Expr expr, Params params = {}, double eps = kUnbounded);

  static ScalarFamily parse(std::string_view text, Params params = {}, double eps = kUnbounded);
  static ScalarFamily constant(double value, double eps = kUnbounded);
  static ScalarFamily identity(double eps = kUnbounded);

  const Expr& expr() const noexcept { return expr_; }
  const Params& params() const noexcept { return params_; }
  double eps() const noexcept { return eps_; }
  bool in_domain(double z) const noexcept { return -eps_ < z && z < eps_; }

  /// Throws DomainError outside (-eps, eps).
  double operator()(double z) const;
  /// Evaluates without the domain test; for integrator stages that may
  /// probe slightly outside before a step is rejected.
  double value_unchecked(double z) const { return compiled_->value(z); }
  Jet jet(double z0, int order) const;
  /// Pushes an arbitrary jet through the expression (chain rule included).
  Jet jet(const Jet& z) const;

  /// This family evaluated at `inner(z)`, via expression substitution. The
  /// parameter sets are merged; clashing names must agree.
  ScalarFamily compose(const ScalarFamily& inner) const;

  /// Same expression and parameters on a different domain.
  ScalarFamily with_domain(double eps) const;

  std::string to_string() const { return expr_.to_string(); }

 private:
  void check_domain(double z) const;

  Expr expr_;
  Params params_;
  double eps_ = kUnbounded;
  std::shared_ptr<const CompiledExpr> compiled_;
};

/// Source of jets for the C^k norm estimator: (z0, order) -> Jet.
using JetFn = std::function<Jet(double, int)>;

JetFn jet_fn(const ScalarFamily& f);
/// Jets of f - g.
JetFn jet_difference(JetFn f, JetFn g);
/// Jets of f - id.
JetFn jet_minus_identity(JetFn f);

inline constexpr int kDefaultNormSamples = 2049;

struct CkNormOptions {
  int samples = kDefaultNormSamples;
  /// One Newton step on f^(i+1) at every interior local maximum of |f^(i)|.
  bool refine = true;
};

/// Grid estimate of max_{0<=i<=k} sup_{[a,b]} |f^(i)|. Every value is taken
/// at a point of [a,b], so the result is a lower bound on the true norm.
double ck_norm(const JetFn& f, Interval interval, int k, CkNormOptions options = {});
double ck_norm(const ScalarFamily& f, Interval interval, int k, CkNormOptions options = {});

}  // namespace orbitforge
