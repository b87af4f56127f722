#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "orbitforge/scalar_family.hpp"

namespace orbitforge {

/// n x n matrix of jets sharing base point and order.
class JetMatrix {
 public:
  JetMatrix() = default;
  JetMatrix(int n, double base_point, int order);

  int n() const noexcept { return n_; }
  int order() const noexcept { return order_; }
  double base_point() const noexcept { return base_; }

  Jet& operator()(int i, int j) { return e_[index(i, j)]; }
  const Jet& operator()(int i, int j) const { return e_[index(i, j)]; }

  /// Matrix of Taylor coefficients of order m.
  Eigen::MatrixXd coefficient(int m) const;
  /// Matrix of m-th derivatives, m! * coefficient(m).
  Eigen::MatrixXd derivative(int m) const;
  void set_coefficient(int m, const Eigen::MatrixXd& c);

  friend JetMatrix operator*(const JetMatrix& a, const JetMatrix& b);

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
  }
  int n_ = 0;
  double base_ = 0.0;
  int order_ = 0;
  std::vector<Jet> e_;
};

/// n x n array of scalar families on a common domain (-eps, eps).
class MatrixFamily {
 public:
  MatrixFamily() = default;
  /// entries in row-major order; throws LengthMismatch unless n*n given.
  MatrixFamily(int n, std::vector<ScalarFamily> entries, double eps);

  static MatrixFamily identity(int n, double eps = ScalarFamily::kUnbounded);
  static MatrixFamily constant(const Eigen::MatrixXd& m, double eps = ScalarFamily::kUnbounded);

  int n() const noexcept { return n_; }
  double eps() const noexcept { return eps_; }
  const ScalarFamily& entry(int i, int j) const { return e_[index(i, j)]; }
  const std::vector<ScalarFamily>& entries() const noexcept { return e_; }

  Eigen::MatrixXd value(double z) const;
  Eigen::MatrixXd value_unchecked(double z) const;
  JetMatrix jets(double z0, int order) const;
  /// A^(m)(z0).
  Eigen::MatrixXd derivative(double z0, int m) const;

  /// Minimum of |det A(z)| over `samples` uniform points of the closed
  /// interval [-r, r], r slightly inside the domain (or [-1, 1] when the
  /// domain is unbounded).
  double min_abs_det(int samples = 257) const;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
  }
  int n_ = 0;
  double eps_ = ScalarFamily::kUnbounded;
  std::vector<ScalarFamily> e_;
};

/// Homogeneous action on T^n x (-eps, eps): generator j is
/// sum_i a_ij(z) Y_i + aZ_j(z) Z.
struct ActionSpec {
  int n = 0;
  int k = 1;
  double eps = ScalarFamily::kUnbounded;
  MatrixFamily A;
  /// Vertical coefficients; empty means identically zero.
  std::vector<ScalarFamily> aZ;
  Params params;

  /// True when some vertical coefficient is not the literal constant 0.
  bool perturbed() const;
  /// aZ(z) as a vector (zeros when aZ is empty).
  Eigen::VectorXd vertical(double z) const;
  Eigen::VectorXd vertical_unchecked(double z) const;
};

}  // namespace orbitforge
