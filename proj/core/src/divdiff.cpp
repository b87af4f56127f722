#include "orbitforge/divdiff.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "orbitforge/errors.hpp"

namespace orbitforge {

namespace {

void check_lengths(const Grid& grid, std::size_t n) {
  if (grid.size() != n) {
    std::ostringstream os;
    os << grid.size() << " nodes but " << n << " values";
    throw Error(Errc::length_mismatch, os.str());
  }
}

void check_gaps(const Grid& grid) {
  if (grid.size() < 2) return;
  if (grid.min_gap() < kMinRelativeGap * grid.span()) {
    std::ostringstream os;
    os.precision(3);
    os << "node gap " << grid.min_gap() << " below " << kMinRelativeGap << " * span";
    throw Error(Errc::conditioning, os.str());
  }
}

bool gaps_within(const Grid& grid, double c) {
  if (grid.size() < 3) return true;
  const double g0 = grid[1] - grid[0];
  for (std::size_t j = 2; j < grid.size(); ++j) {
    const double g = grid[j] - grid[j - 1];
    if (!((1.0 - c) * g0 < g && g < (1.0 + c) * g0)) return false;
  }
  return true;
}

}  // namespace

Grid::Grid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw Error(Errc::param, "grid needs at least one node");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!std::isfinite(nodes_[i])) throw Error(Errc::not_increasing, "grid node is not finite");
    if (i > 0 && !(nodes_[i - 1] < nodes_[i])) {
      std::ostringstream os;
      os << "grid nodes not strictly increasing at index " << i;
      throw Error(Errc::not_increasing, os.str());
    }
  }
}

double Grid::min_gap() const noexcept {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < nodes_.size(); ++i) g = std::min(g, nodes_[i] - nodes_[i - 1]);
  return g;
}

DDTable::DDTable(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
  check_lengths(grid_, values_.size());
  check_gaps(grid_);
  const int k = grid_.k();
  offset_.resize(static_cast<std::size_t>(k) + 1);
  std::size_t total = 0;
  for (int m = 0; m <= k; ++m) {
    offset_[static_cast<std::size_t>(m)] = total;
    total += static_cast<std::size_t>(k - m + 1);
  }
  table_.resize(total);
  std::copy(values_.begin(), values_.end(), table_.begin());
  for (int m = 1; m <= k; ++m) {
    const std::size_t cur = offset_[static_cast<std::size_t>(m)];
    const std::size_t prev = offset_[static_cast<std::size_t>(m - 1)];
    for (int i = 0; i + m <= k; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      table_[cur + ui] = (table_[prev + ui + 1] - table_[prev + ui]) /
                         (grid_[ui + static_cast<std::size_t>(m)] - grid_[ui]);
    }
  }
}

double DDTable::at(int i, int m) const {
  const int k = grid_.k();
  if (m < 0 || m > k || i < 0 || i + m > k) throw Error(Errc::param, "divided-difference index out of range");
  return table_[offset_[static_cast<std::size_t>(m)] + static_cast<std::size_t>(i)];
}

std::vector<double> DDTable::newton_coefficients() const {
  std::vector<double> c(grid_.size());
  for (int m = 0; m <= grid_.k(); ++m) c[static_cast<std::size_t>(m)] = at(0, m);
  return c;
}

DDTable dd_recursive(const Grid& grid, std::span<const double> values) {
  return DDTable(grid, std::vector<double>(values.begin(), values.end()));
}

std::vector<double> dd_weights(const Grid& grid) {
  check_gaps(grid);
  const std::size_t n = grid.size();
  std::vector<double> u(n, 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    double p = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i != j) p *= grid[j] - grid[i];
    }
    u[j] = 1.0 / p;
  }
  return u;
}

double dd_weighted(const Grid& grid, std::span<const double> values) {
  check_lengths(grid, values.size());
  const std::vector<double> u = dd_weights(grid);
  double s = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) s += u[j] * values[j];
  return s;
}

double dd_vandermonde(const Grid& grid, std::span<const double> values) {
  check_lengths(grid, values.size());
  const int k = grid.k();
  if (k > kMaxVandermondeDegree) {
    std::ostringstream os;
    os << "Vandermonde path limited to k <= " << kMaxVandermondeDegree << ", got " << k;
    throw Error(Errc::param, os.str());
  }
  if (k == 0) return values[0];
  check_gaps(grid);
  const double mid = 0.5 * (grid[0] + grid[grid.size() - 1]);
  const double half = 0.5 * grid.span();
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd v(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = (grid[static_cast<std::size_t>(i)] - mid) / half;
    double p = 1.0;
    for (Eigen::Index c = 0; c < n; ++c) {
      v(i, c) = p;
      p *= t;
    }
  }
  Eigen::MatrixXd w = v;
  for (Eigen::Index i = 0; i < n; ++i) w(i, n - 1) = values[static_cast<std::size_t>(i)];

  const double det_v = v.partialPivLu().determinant();
  // On [-1, 1] an equispaced grid gives |det V| around 1e-10 at k = 12; far
  // smaller values mean nearly coincident nodes.
  if (!std::isfinite(det_v) || std::abs(det_v) < 1e-200) {
    throw Error(Errc::conditioning, "Vandermonde determinant underflows");
  }
  const double det_w = w.partialPivLu().determinant();
  return det_w / det_v / std::pow(half, k);
}

double newton_eval(const DDTable& table, double x) {
  const int k = table.grid().k();
  double p = table.at(0, k);
  for (int m = k - 1; m >= 0; --m) {
    p = p * (x - table.grid()[static_cast<std::size_t>(m)]) + table.at(0, m);
  }
  return p;
}

bool is_quasi_ap(const Grid& grid, double c_ap) {
  if (!(c_ap > 0.0 && c_ap < 0.25)) {
    std::ostringstream os;
    os << "c_ap = " << c_ap << " outside (0, 1/4)";
    throw Error(Errc::param, os.str());
  }
  return gaps_within(grid, c_ap);
}

bool within_quasi_ap(const Grid& grid, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    std::ostringstream os;
    os << "eps = " << eps << " outside (0, 1)";
    throw Error(Errc::param, os.str());
  }
  return gaps_within(grid, eps);
}

double lagrange_bound(const Grid& grid, double eps) {
  if (!within_quasi_ap(grid, eps)) throw Error(Errc::not_quasi_ap, "grid is not an eps-quasi-AP");
  return std::pow(2.0 * (1.0 + eps) / (1.0 - eps), grid.k());
}

LagrangeCheck check_lagrange_bound(const Grid& grid, double eps, std::uint64_t seed, int trials, int dense) {
  LagrangeCheck out;
  out.bound = lagrange_bound(grid, eps);
  out.trials = trials;
  if (dense < 2) throw Error(Errc::param, "dense grid needs at least 2 points");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const std::size_t n = grid.size();
  std::vector<double> y(n);
  const double lo = grid[0];
  const double step = grid.span() / (dense - 1);
  for (int t = 0; t < trials; ++t) {
    for (auto& v : y) v = unit(rng);
    // Push one node to the extreme so |P(x_j)| <= 1 is attained.
    const std::size_t pin = static_cast<std::size_t>(rng() % n);
    y[pin] = (y[pin] < 0.0) ? -1.0 : 1.0;
    // Alternating extremes mimic the Chebyshev-type worst case.
    if (t % 4 == 0) {
      for (std::size_t j = 0; j < n; ++j) y[j] = (j % 2 == 0) ? 1.0 : -1.0;
    }
    const DDTable table(grid, y);
    double sup = 0.0;
    for (int s = 0; s < dense; ++s) sup = std::max(sup, std::abs(newton_eval(table, lo + s * step)));
    out.worst_ratio = std::max(out.worst_ratio, sup);
  }
  out.satisfied = out.worst_ratio <= out.bound;
  return out;
}

}  // namespace orbitforge
