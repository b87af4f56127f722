#include "orbitforge/jet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "orbitforge/errors.hpp"

namespace orbitforge {

namespace {

void check_order(int order) {
  if (order < 0 || order > kMaxJetOrder) {
    std::ostringstream os;
    os << "jet order " << order << " outside [0, " << kMaxJetOrder << "]";
    throw Error(Errc::param, os.str());
  }
}

void check_compatible(const Jet& a, const Jet& b) {
  if (a.order() != b.order()) {
    std::ostringstream os;
    os << "jet orders " << a.order() << " and " << b.order() << " differ";
    throw Error(Errc::order_mismatch, os.str());
  }
  if (a.base_point() != b.base_point()) {
    const double scale = std::max(1.0, std::abs(a.base_point()));
    if (std::abs(a.base_point() - b.base_point()) > 1e-12 * scale) {
      throw Error(Errc::base_point_mismatch, "jets expanded at different base points");
    }
  }
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Horner evaluation of sum_m outer[m] * d^m where d has zero constant term.
Jet compose_series(const Jet& outer, const Jet& d) {
  const int order = d.order();
  Jet r = Jet::constant(d.base_point(), order, outer[order]);
  for (int m = order - 1; m >= 0; --m) {
    r = r * d;
    r[0] += outer[m];
  }
  return r;
}

}  // namespace

Jet::Jet(double base_point, int order) : base_(base_point), order_(order) { check_order(order); }

Jet Jet::constant(double base_point, int order, double value) {
  Jet j(base_point, order);
  j.c_[0] = value;
  return j;
}

Jet Jet::variable(double base_point, int order) {
  Jet j(base_point, order);
  j.c_[0] = base_point;
  if (order >= 1) j.c_[1] = 1.0;
  return j;
}

double Jet::derivative(int i) const {
  if (i < 0 || i > order_) throw Error(Errc::param, "derivative index outside jet order");
  return factorial(i) * c_[static_cast<std::size_t>(i)];
}

bool Jet::all_finite() const noexcept {
  for (int i = 0; i <= order_; ++i) {
    if (!std::isfinite(c_[static_cast<std::size_t>(i)])) return false;
  }
  return true;
}

Jet Jet::rebased(double base_point) const {
  Jet j = *this;
  j.base_ = base_point;
  return j;
}

Jet Jet::truncated(int order) const {
  if (order > order_) throw Error(Errc::order_mismatch, "cannot raise jet order by truncation");
  Jet j(base_, order);
  for (int i = 0; i <= order; ++i) j[i] = (*this)[i];
  return j;
}

Jet& Jet::operator+=(const Jet& other) {
  check_compatible(*this, other);
  for (int i = 0; i <= order_; ++i) (*this)[i] += other[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& other) {
  check_compatible(*this, other);
  for (int i = 0; i <= order_; ++i) (*this)[i] -= other[i];
  return *this;
}

Jet& Jet::operator*=(double s) noexcept {
  for (int i = 0; i <= order_; ++i) (*this)[i] *= s;
  return *this;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }
Jet operator-(Jet a) { return a *= -1.0; }
Jet operator+(Jet a, double s) {
  a[0] += s;
  return a;
}
Jet operator*(Jet a, double s) { return a *= s; }
Jet operator*(double s, Jet a) { return a *= s; }

Jet operator*(const Jet& a, const Jet& b) {
  check_compatible(a, b);
  Jet r(a.base_point(), a.order());
  for (int k = 0; k <= a.order(); ++k) {
    double s = 0.0;
    for (int j = 0; j <= k; ++j) s += a[j] * b[k - j];
    r[k] = s;
  }
  return r;
}

Jet operator/(const Jet& a, const Jet& b) {
  check_compatible(a, b);
  if (b[0] == 0.0) throw Error(Errc::singularity, "division by a jet with zero constant term");
  Jet q(a.base_point(), a.order());
  for (int k = 0; k <= a.order(); ++k) {
    double s = a[k];
    for (int j = 1; j <= k; ++j) s -= b[j] * q[k - j];
    q[k] = s / b[0];
  }
  return q;
}

Jet reciprocal(const Jet& u) { return Jet::constant(u.base_point(), u.order(), 1.0) / u; }

namespace {

void sin_cos(const Jet& u, Jet& s, Jet& c) {
  s = Jet(u.base_point(), u.order());
  c = Jet(u.base_point(), u.order());
  s[0] = std::sin(u[0]);
  c[0] = std::cos(u[0]);
  for (int k = 1; k <= u.order(); ++k) {
    double ss = 0.0;
    double cc = 0.0;
    for (int j = 1; j <= k; ++j) {
      ss += j * u[j] * c[k - j];
      cc -= j * u[j] * s[k - j];
    }
    s[k] = ss / k;
    c[k] = cc / k;
  }
}

}  // namespace

Jet sin(const Jet& u) {
  Jet s, c;
  sin_cos(u, s, c);
  return s;
}

Jet cos(const Jet& u) {
  Jet s, c;
  sin_cos(u, s, c);
  return c;
}

Jet exp(const Jet& u) {
  Jet e(u.base_point(), u.order());
  e[0] = std::exp(u[0]);
  for (int k = 1; k <= u.order(); ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += j * u[j] * e[k - j];
    e[k] = s / k;
  }
  return e;
}

Jet log(const Jet& u) {
  if (!(u[0] > 0.0)) throw Error(Errc::singularity, "log of a jet with nonpositive constant term");
  Jet l(u.base_point(), u.order());
  l[0] = std::log(u[0]);
  for (int k = 1; k <= u.order(); ++k) {
    double s = 0.0;
    for (int j = 1; j < k; ++j) s += j * l[j] * u[k - j];
    l[k] = (u[k] - s / k) / u[0];
  }
  return l;
}

Jet pow(const Jet& u, int n) {
  if (n < 0) {
    // n == INT_MIN cannot be negated; nobody needs that exponent.
    if (n == std::numeric_limits<int>::min()) throw Error(Errc::param, "exponent out of range");
    return reciprocal(pow(u, -n));
  }
  Jet result = Jet::constant(u.base_point(), u.order(), 1.0);
  Jet base = u;
  unsigned e = static_cast<unsigned>(n);
  while (e != 0) {
    if (e & 1u) result = result * base;
    e >>= 1u;
    if (e != 0) base = base * base;
  }
  return result;
}

double bump_value(double u) {
  if (!(std::abs(u) < 1.0)) return 0.0;
  return std::exp(-1.0 / (1.0 - u * u));
}

double smooth_step_value(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

Jet bump(const Jet& u) {
  if (!(std::abs(u[0]) < 1.0)) return Jet(u.base_point(), u.order());
  const Jet one = Jet::constant(u.base_point(), u.order(), 1.0);
  return exp(-reciprocal(one - u * u));
}

Jet smooth_step(const Jet& u) {
  if (u[0] <= 0.0) return Jet(u.base_point(), u.order());
  if (u[0] >= 1.0) return Jet::constant(u.base_point(), u.order(), 1.0);
  const Jet one = Jet::constant(u.base_point(), u.order(), 1.0);
  const Jet a = exp(-reciprocal(u));
  const Jet b = exp(-reciprocal(one - u));
  return a / (a + b);
}

Jet jet_compose(const Jet& outer, const Jet& inner) {
  if (outer.order() != inner.order()) {
    std::ostringstream os;
    os << "outer order " << outer.order() << " != inner order " << inner.order();
    throw Error(Errc::order_mismatch, os.str());
  }
  const double g0 = inner[0];
  if (std::abs(outer.base_point() - g0) > 1e-12 * std::max(1.0, std::abs(g0))) {
    std::ostringstream os;
    os.precision(17);
    os << "outer jet based at " << outer.base_point() << " but inner value is " << g0;
    throw Error(Errc::base_point_mismatch, os.str());
  }
  Jet d = inner;
  d[0] = 0.0;
  return compose_series(outer, d);
}

Jet jet_invert(const Jet& g) {
  const int order = g.order();
  Jet result(g[0], order);
  result[0] = g.base_point();
  if (order == 0) return result;
  const double g1 = g[1];
  if (!(std::abs(g1) > 1e-14) || !std::isfinite(g1)) {
    throw Error(Errc::non_invertible, "derivative vanishes at the base point");
  }
  // Series reversion: find h with h(0) = 0 and gt(h(s)) = s, where
  // gt(t) = g(x0 + t) - g(x0). Coefficient m of gt o h is g1*h[m] plus
  // terms involving h[1..m-1] only.
  Jet gt = g;
  gt[0] = 0.0;
  gt = gt.rebased(0.0);
  Jet h(0.0, order);
  h[1] = 1.0 / g1;
  for (int m = 2; m <= order; ++m) {
    const Jet comp = compose_series(gt, h);
    h[m] = -comp[m] / g1;
  }
  for (int m = 1; m <= order; ++m) result[m] = h[m];
  return result;
}

}  // namespace orbitforge
