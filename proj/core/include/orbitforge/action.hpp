#pragma once

#include <Eigen/Dense>
#include <vector>

#include "orbitforge/matrix_family.hpp"

namespace orbitforge {

/// Jets at z0 of every entry of B = A^{-1}, by series inversion
/// B_m = -A_0^{-1} sum_{l=1..m} A_l B_{m-l}. Throws SingularMatrix when A(z0)
/// is numerically singular.
JetMatrix inverse_family(const MatrixFamily& A, double z0, int order);

inline constexpr double kDefaultRankTol = 1e-8;

struct StabilityReport {
  int k = 0;
  int stacked_rank = 0;
  std::vector<double> singular_values;  // descending
  double threshold = 0.0;               // singular values above it count
  bool condition1_holds = false;
  /// Basis of the chosen codimension-one subspace D' (present iff the
  /// condition holds): the trailing right singular vectors, or e_2..e_n when
  /// the stacked matrix vanishes.
  std::vector<Eigen::VectorXd> kernel_basis;
  /// Unit covector annihilating D', largest component positive.
  Eigen::VectorXd w_star;
};

/// Rank test on S = [A'(0); ...; A^(k)(0)] (kn x n). A singular value counts
/// toward the rank when it exceeds rank_tol * max(sigma_max, ||A(0)||_F);
/// the second term keeps roundoff-level derivatives from counting.
StabilityReport condition1_check(const ActionSpec& spec, int k, double rank_tol = kDefaultRankTol);

/// The same test on the derivatives of B = A^{-1}.
StabilityReport condition1_dual_check(const ActionSpec& spec, int k, double rank_tol = kDefaultRankTol);

/// Stacks the given derivative matrices and applies the rank test.
StabilityReport stacked_rank_test(const std::vector<Eigen::MatrixXd>& derivatives, double scale, int k,
                                  double rank_tol);

struct PerturbedAction {
  ActionSpec base;
  MatrixFamily A_hat;
  Eigen::VectorXd w_star;
  ScalarFamily beta;
  double beta_constant = 0.0;  // c in c * bump(4z / eta_blend)
  double delta = 0.0;
  double eta_blend = 0.0;
  int halvings = 0;
  double blend_distance = 0.0;  // max over entries of ||A_hat - A||_{C^k} on [-delta, delta]
  double beta_norm = 0.0;       // ||beta||_{C^k}
  ActionSpec result;            // A_hat with aZ_j = w*_j beta
};

struct PerturbationOptions {
  double rank_tol = kDefaultRankTol;
  int max_halvings = 20;
  CkNormOptions norm{};
};

/// c * bump(4z / eta_blend), supported in |z| < eta_blend / 4, with c chosen
/// so that its grid C^k norm is delta / 4. `constant` receives c.
ScalarFamily bump(double eta_blend, double delta, int k, double* constant = nullptr, CkNormOptions norm = {});

/// Smooth ramp psi with psi = 0 on |z| <= inner and psi(z) = z on
/// |z| >= outer, as an expression in z.
Expr blend_ramp(double inner, double outer);

/// Builds the destabilizing perturbation. The blend is
/// A_hat(z) = A(z) + (A(psi(z)) - A(z)) P, with P the projection onto D'
/// along its complement and psi = blend_ramp(eta_blend, 2 eta_blend);
/// eta_blend starts at delta / 4 and is halved until the blend is within
/// delta / 2 in C^k. Throws Condition1Fails, ParamError (spec already
/// perturbed, or delta outside (0, eps/2)) and ToleranceUnreachable.
PerturbedAction build_perturbation(const ActionSpec& spec, int k, double delta, PerturbationOptions options = {});

/// Max over z in [-delta, delta] (grid_size points) and pairs j0 < j1 of the
/// Euclidean norm of the Lie bracket of generators j0 and j1 of `spec`.
double commutator_residual(const ActionSpec& spec, double delta, int grid_size);
double commutator_residual(const PerturbedAction& pert, int grid_size);

}  // namespace orbitforge
