#include "orbitforge/action.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "orbitforge/errors.hpp"

namespace orbitforge {

namespace {

Eigen::PartialPivLU<Eigen::MatrixXd> factor_or_throw(const Eigen::MatrixXd& a0, double z0) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a0);
  const double rc = lu.rcond();
  if (!(rc > 1e-14) || !std::isfinite(rc)) {
    std::ostringstream os;
    os.precision(17);
    os << "matrix is singular at z = " << z0 << " (rcond " << rc << ")";
    throw Error(Errc::singular_matrix, os.str());
  }
  return lu;
}

Eigen::VectorXd orient(Eigen::VectorXd w) {
  Eigen::Index imax = 0;
  w.cwiseAbs().maxCoeff(&imax);
  if (w(imax) < 0.0) w = -w;
  return w / w.norm();
}

double max_entry_distance(const MatrixFamily& a, const MatrixFamily& b, Interval interval, int k,
                          CkNormOptions norm) {
  double d = 0.0;
  for (int i = 0; i < a.n(); ++i) {
    for (int j = 0; j < a.n(); ++j) {
      d = std::max(d, ck_norm(jet_difference(jet_fn(a.entry(i, j)), jet_fn(b.entry(i, j))), interval, k, norm));
    }
  }
  return d;
}

MatrixFamily blend(const ActionSpec& spec, const Eigen::MatrixXd& P, double eta_blend) {
  const int n = spec.n;
  const Expr psi = blend_ramp(eta_blend, 2.0 * eta_blend);
  std::vector<ScalarFamily> entries;
  entries.reserve(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Expr e = spec.A.entry(i, j).expr();
      for (int l = 0; l < n; ++l) {
        const double p = P(l, j);
        if (p == 0.0) continue;
        const Expr& a = spec.A.entry(i, l).expr();
        e = e + Expr::constant(p) * (a.substitute(psi) - a);
      }
      entries.emplace_back(e, spec.params, spec.eps);
    }
  }
  return MatrixFamily(n, std::move(entries), spec.eps);
}

}  // namespace

JetMatrix inverse_family(const MatrixFamily& A, double z0, int order) {
  const JetMatrix a = A.jets(z0, order);
  const auto lu = factor_or_throw(a.coefficient(0), z0);
  const int n = A.n();
  std::vector<Eigen::MatrixXd> ac(static_cast<std::size_t>(order) + 1);
  for (int m = 0; m <= order; ++m) ac[static_cast<std::size_t>(m)] = a.coefficient(m);
  std::vector<Eigen::MatrixXd> bc(static_cast<std::size_t>(order) + 1);
  bc[0] = lu.inverse();
  for (int m = 1; m <= order; ++m) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (int l = 1; l <= m; ++l) s += ac[static_cast<std::size_t>(l)] * bc[static_cast<std::size_t>(m - l)];
    bc[static_cast<std::size_t>(m)] = -lu.solve(s);
  }
  JetMatrix b(n, z0, order);
  for (int m = 0; m <= order; ++m) b.set_coefficient(m, bc[static_cast<std::size_t>(m)]);
  return b;
}

StabilityReport stacked_rank_test(const std::vector<Eigen::MatrixXd>& derivatives, double scale, int k,
                                  double rank_tol) {
  if (derivatives.empty()) throw Error(Errc::param, "rank test needs at least one derivative");
  if (!(rank_tol > 0.0)) throw Error(Errc::param, "rank tolerance must be positive");
  const auto n = derivatives.front().cols();
  Eigen::MatrixXd S(n * static_cast<Eigen::Index>(derivatives.size()), n);
  for (std::size_t m = 0; m < derivatives.size(); ++m) {
    S.middleRows(static_cast<Eigen::Index>(m) * n, n) = derivatives[m];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(S, Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues();
  StabilityReport rep;
  rep.k = k;
  rep.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  rep.threshold = rank_tol * std::max(smax, scale);
  rep.stacked_rank = static_cast<int>((sv.array() > rep.threshold).count());
  rep.condition1_holds = rep.stacked_rank <= 1;
  if (rep.condition1_holds) {
    const Eigen::MatrixXd& V = svd.matrixV();
    if (rep.stacked_rank == 1) {
      rep.w_star = orient(V.col(0));
      for (Eigen::Index c = 1; c < n; ++c) rep.kernel_basis.emplace_back(V.col(c));
    } else {
      rep.w_star = Eigen::VectorXd::Unit(n, 0);
      for (Eigen::Index c = 1; c < n; ++c) rep.kernel_basis.emplace_back(Eigen::VectorXd::Unit(n, c));
    }
  }
  return rep;
}

StabilityReport condition1_check(const ActionSpec& spec, int k, double rank_tol) {
  if (k < 1) throw Error(Errc::param, "condition 1 needs k >= 1");
  const JetMatrix a = spec.A.jets(0.0, k);
  factor_or_throw(a.coefficient(0), 0.0);
  std::vector<Eigen::MatrixXd> d;
  for (int m = 1; m <= k; ++m) d.push_back(a.derivative(m));
  return stacked_rank_test(d, a.coefficient(0).norm(), k, rank_tol);
}

StabilityReport condition1_dual_check(const ActionSpec& spec, int k, double rank_tol) {
  if (k < 1) throw Error(Errc::param, "condition 1 needs k >= 1");
  const JetMatrix b = inverse_family(spec.A, 0.0, k);
  std::vector<Eigen::MatrixXd> d;
  for (int m = 1; m <= k; ++m) d.push_back(b.derivative(m));
  return stacked_rank_test(d, b.coefficient(0).norm(), k, rank_tol);
}

ScalarFamily bump(double eta_blend, double delta, int k, double* constant, CkNormOptions norm) {
  if (!(eta_blend > 0.0) || !(delta > 0.0) || k < 0) {
    throw Error(Errc::param, "bump needs eta_blend > 0, delta > 0, k >= 0");
  }
  const Expr u = Expr::unary(ExprOp::bump, Expr::constant(4.0 / eta_blend) * Expr::var());
  const Interval support{-eta_blend / 4.0, eta_blend / 4.0};
  const double raw = ck_norm(ScalarFamily(u), support, k, norm);
  const double c = delta / (4.0 * raw);
  if (constant != nullptr) *constant = c;
  return ScalarFamily(Expr::constant(c) * u);
}

Expr blend_ramp(double inner, double outer) {
  if (!(0.0 < inner && inner < outer)) throw Error(Errc::param, "blend ramp needs 0 < inner < outer");
  const Expr z = Expr::var();
  const Expr arg = (Expr::power(z, 2) - Expr::constant(inner * inner)) / Expr::constant(outer * outer - inner * inner);
  return z * Expr::unary(ExprOp::step, arg);
}

PerturbedAction build_perturbation(const ActionSpec& spec, int k, double delta, PerturbationOptions options) {
  if (spec.perturbed()) throw Error(Errc::param, "spec already carries vertical coefficients");
  if (!(delta > 0.0) || !(delta < spec.eps / 2.0)) {
    std::ostringstream os;
    os << "delta = " << delta << " outside (0, eps/2)";
    throw Error(Errc::param, os.str());
  }
  const StabilityReport rep = condition1_check(spec, k, options.rank_tol);
  if (!rep.condition1_holds) {
    std::ostringstream os;
    os << "condition 1 fails at k = " << k << " (stacked rank " << rep.stacked_rank << ")";
    throw Error(Errc::condition1_fails, os.str());
  }
  const int n = spec.n;
  const Eigen::VectorXd& w = rep.w_star;
  // The complement of D' is spanned by w itself in both branches of the
  // rank test, so the projection along it is orthogonal.
  const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n) - w * w.transpose();

  PerturbedAction out;
  out.base = spec;
  out.w_star = w;
  out.delta = delta;
  double eta_blend = delta / 4.0;
  for (int h = 0; h <= options.max_halvings; ++h) {
    MatrixFamily a_hat = blend(spec, P, eta_blend);
    const Interval support{-2.0 * eta_blend, 2.0 * eta_blend};
    const double dist = max_entry_distance(a_hat, spec.A, support, k, options.norm);
    if (dist < delta / 2.0) {
      out.A_hat = std::move(a_hat);
      out.eta_blend = eta_blend;
      out.halvings = h;
      out.blend_distance = dist;
      break;
    }
    if (h == options.max_halvings) {
      std::ostringstream os;
      os << "blend distance " << dist << " still >= delta/2 after " << h << " halvings";
      throw Error(Errc::tolerance_unreachable, os.str());
    }
    eta_blend /= 2.0;
  }

  out.beta = bump(out.eta_blend, delta, k, &out.beta_constant, options.norm).with_domain(spec.eps);
  out.beta_norm = ck_norm(out.beta, {-out.eta_blend / 4.0, out.eta_blend / 4.0}, k, options.norm);

  ActionSpec r;
  r.n = n;
  r.k = spec.k;
  r.eps = spec.eps;
  r.A = out.A_hat;
  r.params = spec.params;
  for (int j = 0; j < n; ++j) {
    r.aZ.emplace_back(Expr::constant(w(j)) * out.beta.expr(), spec.params, spec.eps);
  }
  out.result = std::move(r);
  return out;
}

double commutator_residual(const ActionSpec& spec, double delta, int grid_size) {
  if (spec.aZ.empty()) return 0.0;
  if (grid_size < 2) throw Error(Errc::param, "commutator residual needs at least 2 samples");
  const int n = spec.n;
  double worst = 0.0;
  Eigen::VectorXd bracket(n + 1);
  for (int s = 0; s < grid_size; ++s) {
    const double z = -delta + 2.0 * delta * s / (grid_size - 1);
    const JetMatrix a = spec.A.jets(z, 1);
    std::vector<Jet> v;
    for (const auto& c : spec.aZ) v.push_back(c.jet(z, 1));
    for (int j0 = 0; j0 < n; ++j0) {
      for (int j1 = j0 + 1; j1 < n; ++j1) {
        const double p = v[static_cast<std::size_t>(j0)][0];
        const double q = v[static_cast<std::size_t>(j1)][0];
        for (int i = 0; i < n; ++i) bracket(i) = p * a(i, j1)[1] - q * a(i, j0)[1];
        bracket(n) = p * v[static_cast<std::size_t>(j1)][1] - q * v[static_cast<std::size_t>(j0)][1];
        worst = std::max(worst, bracket.norm());
      }
    }
  }
  return worst;
}

double commutator_residual(const PerturbedAction& pert, int grid_size) {
  return commutator_residual(pert.result, pert.delta, grid_size);
}

}  // namespace orbitforge
