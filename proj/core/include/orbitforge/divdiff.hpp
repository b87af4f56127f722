#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace orbitforge {

/// Strictly increasing finite nodes x_0 < ... < x_k.
class Grid {
 public:
  Grid() = default;
  /// Throws NotIncreasing when the nodes are not strictly increasing or not
  /// finite, ParamError when empty.
  explicit Grid(std::vector<double> nodes);

  std::span<const double> nodes() const noexcept { return nodes_; }
  double operator[](std::size_t i) const noexcept { return nodes_[i]; }
  std::size_t size() const noexcept { return nodes_.size(); }
  /// Degree k = size() - 1.
  int k() const noexcept { return static_cast<int>(nodes_.size()) - 1; }
  double span() const noexcept { return nodes_.empty() ? 0.0 : nodes_.back() - nodes_.front(); }
  double min_gap() const noexcept;

 private:
  std::vector<double> nodes_;
};

/// Relative gap guard applied by every divided-difference routine.
inline constexpr double kMinRelativeGap = 1e-12;

/// Triangular table of divided differences [y_i, ..., y_{i+m}].
class DDTable {
 public:
  DDTable(Grid grid, std::vector<double> values);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  /// [y_i, ..., y_{i+m}], 0 <= m <= k, 0 <= i <= k - m.
  double at(int i, int m) const;
  /// [y_0, ..., y_k].
  double leading() const { return at(0, grid_.k()); }
  /// Newton coefficients [y_0], [y_0,y_1], ..., [y_0..y_k].
  std::vector<double> newton_coefficients() const;

 private:
  Grid grid_;
  std::vector<double> values_;
  std::vector<double> table_;  // column m stored after columns 0..m-1
  std::vector<std::size_t> offset_;
};

DDTable dd_recursive(const Grid& grid, std::span<const double> values);

/// u_j = prod_{i != j} 1 / (x_j - x_i); the divided difference is sum u_j y_j.
std::vector<double> dd_weights(const Grid& grid);
double dd_weighted(const Grid& grid, std::span<const double> values);

inline constexpr int kMaxVandermondeDegree = 12;

/// det(W) / det(V), where V is the Vandermonde matrix of the nodes and W is V
/// with its last column replaced by the values. The nodes are first mapped
/// affinely onto [-1, 1]. Throws ConditioningError when det(V) is too small.
double dd_vandermonde(const Grid& grid, std::span<const double> values);

/// Evaluates the Newton form of the interpolating polynomial at x.
double newton_eval(const DDTable& table, double x);

/// Gap test |x_j - x_{j-1}| strictly between (1 -+ c)(x_1 - x_0). Requires
/// c_ap in (0, 1/4); ParamError otherwise.
bool is_quasi_ap(const Grid& grid, double c_ap);
/// The same test for any eps in (0, 1), the range used by lagrange_bound.
bool within_quasi_ap(const Grid& grid, double eps);

/// (2(1+eps)/(1-eps))^k: bound on |P| over [x_0, x_k] for a polynomial of
/// degree <= k with |P(x_j)| <= 1. Throws NotQuasiAP unless the grid passes
/// within_quasi_ap(grid, eps).
double lagrange_bound(const Grid& grid, double eps);

struct LagrangeCheck {
  double bound = 0.0;          // C~_k
  double worst_ratio = 0.0;    // max over trials of sup|P| / C
  int trials = 0;
  bool satisfied = false;      // worst_ratio <= bound
};

/// Samples `trials` random polynomials of degree <= k by drawing values in
/// [-1, 1] at the nodes (at least one at +-1), and measures sup|P| on
/// `dense` points of [x_0, x_k].
LagrangeCheck check_lagrange_bound(const Grid& grid, double eps, std::uint64_t seed, int trials = 200,
                                   int dense = 4001);

}  // namespace orbitforge
