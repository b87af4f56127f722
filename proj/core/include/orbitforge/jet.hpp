#pragma once

#include <array>
#include <span>

namespace orbitforge {

inline constexpr int kMaxJetOrder = 30;

/// Truncated Taylor expansion of a scalar function at a base point.
///
/// Coefficient i holds f^(i)(base)/i!. All arithmetic below works on the
/// truncated series, so derivatives propagate exactly up to roundoff.
/// Storage is inline; jets are cheap value types.
class Jet {
 public:
  Jet() = default;
  Jet(double base_point, int order);

  static Jet constant(double base_point, int order, double value);
  /// The jet of the identity map at `base_point`: (base_point, 1, 0, ...).
  static Jet variable(double base_point, int order);

  double base_point() const noexcept { return base_; }
  int order() const noexcept { return order_; }

  double operator[](int i) const noexcept { return c_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) noexcept { return c_[static_cast<std::size_t>(i)]; }

  double value() const noexcept { return c_[0]; }
  /// f^(i)(base) = i! * coeffs[i].
  double derivative(int i) const;

  std::span<const double> coeffs() const noexcept {
    return {c_.data(), static_cast<std::size_t>(order_) + 1};
  }

  bool all_finite() const noexcept;

  /// Same coefficients, reinterpreted at another base point.
  Jet rebased(double base_point) const;
  /// Jet truncated to a lower order.
  Jet truncated(int order) const;

  Jet& operator+=(const Jet& other);
  Jet& operator-=(const Jet& other);
  Jet& operator*=(double s) noexcept;

 private:
  double base_ = 0.0;
  int order_ = 0;
  std::array<double, kMaxJetOrder + 1> c_{};
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator-(Jet a);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator+(Jet a, double s);
Jet operator*(Jet a, double s);
Jet operator*(double s, Jet a);

Jet sin(const Jet& u);
Jet cos(const Jet& u);
Jet exp(const Jet& u);
Jet log(const Jet& u);
Jet pow(const Jet& u, int n);
Jet reciprocal(const Jet& u);

/// exp(-1/(1-u^2)) for |u| < 1, identically zero otherwise.
Jet bump(const Jet& u);
/// Smooth step: 0 for u <= 0, 1 for u >= 1, C-infinity in between.
Jet smooth_step(const Jet& u);

/// Jet of F o G at inner.base_point(), given the jet of F at G(x0) and the
/// jet of G at x0. Throws BasePointMismatch / OrderMismatch.
Jet jet_compose(const Jet& outer, const Jet& inner);

/// Jet of the compositional inverse G^{-1} at G(x0), given the jet of G at
/// x0. Throws NonInvertible when G'(x0) vanishes.
Jet jet_invert(const Jet& g);

// Scalar counterparts used by the value-only evaluation path.
double bump_value(double u);
double smooth_step_value(double u);

}  // namespace orbitforge
