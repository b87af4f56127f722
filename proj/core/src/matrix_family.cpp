#include "orbitforge/matrix_family.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "orbitforge/errors.hpp"

namespace orbitforge {

JetMatrix::JetMatrix(int n, double base_point, int order)
    : n_(n), base_(base_point), order_(order),
      e_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), Jet(base_point, order)) {}

Eigen::MatrixXd JetMatrix::coefficient(int m) const {
  Eigen::MatrixXd c(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) c(i, j) = (*this)(i, j)[m];
  }
  return c;
}

Eigen::MatrixXd JetMatrix::derivative(int m) const {
  double f = 1.0;
  for (int i = 2; i <= m; ++i) f *= i;
  return f * coefficient(m);
}

void JetMatrix::set_coefficient(int m, const Eigen::MatrixXd& c) {
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) (*this)(i, j)[m] = c(i, j);
  }
}

JetMatrix operator*(const JetMatrix& a, const JetMatrix& b) {
  if (a.n() != b.n()) throw Error(Errc::length_mismatch, "jet matrices of different sizes");
  JetMatrix r(a.n(), a.base_point(), a.order());
  for (int i = 0; i < a.n(); ++i) {
    for (int j = 0; j < a.n(); ++j) {
      Jet s(a.base_point(), a.order());
      for (int l = 0; l < a.n(); ++l) s += a(i, l) * b(l, j);
      r(i, j) = s;
    }
  }
  return r;
}

MatrixFamily::MatrixFamily(int n, std::vector<ScalarFamily> entries, double eps)
    : n_(n), eps_(eps), e_(std::move(entries)) {
  if (n < 1) throw Error(Errc::param, "matrix family needs n >= 1");
  if (e_.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
    std::ostringstream os;
    os << "expected " << n * n << " entries, got " << e_.size();
    throw Error(Errc::length_mismatch, os.str());
  }
  for (auto& e : e_) e = e.with_domain(eps);
}

MatrixFamily MatrixFamily::identity(int n, double eps) {
  std::vector<ScalarFamily> e;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) e.push_back(ScalarFamily::constant(i == j ? 1.0 : 0.0, eps));
  }
  return MatrixFamily(n, std::move(e), eps);
}

MatrixFamily MatrixFamily::constant(const Eigen::MatrixXd& m, double eps) {
  const auto n = static_cast<int>(m.rows());
  std::vector<ScalarFamily> e;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) e.push_back(ScalarFamily::constant(m(i, j), eps));
  }
  return MatrixFamily(n, std::move(e), eps);
}

Eigen::MatrixXd MatrixFamily::value(double z) const {
  Eigen::MatrixXd m(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) m(i, j) = entry(i, j)(z);
  }
  return m;
}

Eigen::MatrixXd MatrixFamily::value_unchecked(double z) const {
  Eigen::MatrixXd m(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) m(i, j) = entry(i, j).value_unchecked(z);
  }
  return m;
}

JetMatrix MatrixFamily::jets(double z0, int order) const {
  JetMatrix r(n_, z0, order);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) r(i, j) = entry(i, j).jet(z0, order);
  }
  return r;
}

Eigen::MatrixXd MatrixFamily::derivative(double z0, int m) const { return jets(z0, m).derivative(m); }

double MatrixFamily::min_abs_det(int samples) const {
  const double r = std::isfinite(eps_) ? eps_ * (1.0 - 1e-9) : 1.0;
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const double z = samples == 1 ? 0.0 : -r + 2.0 * r * s / (samples - 1);
    best = std::min(best, std::abs(value(z).determinant()));
  }
  return best;
}

bool ActionSpec::perturbed() const {
  for (const auto& a : aZ) {
    if (!(a.expr().op() == ExprOp::constant && a.expr().value() == 0.0)) return true;
  }
  return false;
}

Eigen::VectorXd ActionSpec::vertical(double z) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  for (std::size_t j = 0; j < aZ.size(); ++j) v(static_cast<Eigen::Index>(j)) = aZ[j](z);
  return v;
}

Eigen::VectorXd ActionSpec::vertical_unchecked(double z) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  for (std::size_t j = 0; j < aZ.size(); ++j) v(static_cast<Eigen::Index>(j)) = aZ[j].value_unchecked(z);
  return v;
}

}  // namespace orbitforge
