#include "orbitforge/scalar_family.hpp"

#include <cmath>
#include <sstream>

#include "orbitforge/errors.hpp"

namespace orbitforge {

ScalarFamily::ScalarFamily() : ScalarFamily(Expr::constant(0.0)) {}

ScalarFamily::ScalarFamily(Expr expr, Params params, double eps)
    : expr_(std::move(expr)), params_(std::move(params)), eps_(eps) {
  if (!(eps_ > 0.0)) throw Error(Errc::param, "domain half-width must be positive");
  compiled_ = std::make_shared<const CompiledExpr>(expr_, params_);
}

ScalarFamily ScalarFamily::parse(std::string_view text, Params params, double eps) {
  Expr e = orbitforge::parse(text, params);
  return ScalarFamily(std::move(e), std::move(params), eps);
}

ScalarFamily ScalarFamily::constant(double value, double eps) {
  return ScalarFamily(Expr::constant(value), {}, eps);
}

ScalarFamily ScalarFamily::identity(double eps) { return ScalarFamily(Expr::var(), {}, eps); }

void ScalarFamily::check_domain(double z) const {
  if (!in_domain(z)) {
    std::ostringstream os;
    os.precision(17);
    os << "z = " << z << " outside (-" << eps_ << ", " << eps_ << ")";
    throw Error(Errc::domain, os.str());
  }
}

double ScalarFamily::operator()(double z) const {
  check_domain(z);
  return compiled_->value(z);
}

Jet ScalarFamily::jet(double z0, int order) const {
  check_domain(z0);
  return compiled_->jet(Jet::variable(z0, order));
}

Jet ScalarFamily::jet(const Jet& z) const {
  check_domain(z[0]);
  return compiled_->jet(z);
}

ScalarFamily ScalarFamily::compose(const ScalarFamily& inner) const {
  Params merged = params_;
  for (const auto& [name, value] : inner.params_) {
    auto [it, inserted] = merged.emplace(name, value);
    if (!inserted && it->second != value) {
      throw Error(Errc::param, "parameter '" + name + "' bound to different values");
    }
  }
  return ScalarFamily(expr_.substitute(inner.expr_), std::move(merged), inner.eps_);
}

ScalarFamily ScalarFamily::with_domain(double eps) const {
  ScalarFamily copy = *this;
  if (!(eps > 0.0)) throw Error(Errc::param, "domain half-width must be positive");
  copy.eps_ = eps;
  return copy;
}

JetFn jet_fn(const ScalarFamily& f) {
  return [f](double z0, int order) { return f.jet(z0, order); };
}

JetFn jet_difference(JetFn f, JetFn g) {
  return [f = std::move(f), g = std::move(g)](double z0, int order) { return f(z0, order) - g(z0, order); };
}

JetFn jet_minus_identity(JetFn f) {
  return [f = std::move(f)](double z0, int order) { return f(z0, order) - Jet::variable(z0, order); };
}

}  // namespace orbitforge
