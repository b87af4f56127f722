#pragma once

#include <string>
#include <vector>

#include "orbitforge/divdiff.hpp"
#include "orbitforge/scalar_family.hpp"

namespace orbitforge {

/// (2^{k+3}(k+3) B_{k+1} + 4) 8^{k+1} e^k. Requires k >= 2 and B_k1 >= 0.
double ck_constant(int k, double B_k1);

/// Inputs of the divided-difference sign estimate. h0, h and f are expected
/// to share the domain (-eps, eps).
struct FhInstance {
  int k = 2;
  double eps = 0.5;
  ScalarFamily h0;
  ScalarFamily h;
  ScalarFamily f;
  double eta = 0.0;
  double B = 0.0;     // h0^(k)(0)
  double B_k = 0.0;   // lower bound for |B|
  double B_k1 = 0.0;  // upper bound for ||h0||_{C^{k+1}}
};

enum class FhMode {
  exact,      // every hypothesis, including eta < min(1, B_k) / (2 C_k)
  practical,  // skips the eta-versus-C_k hypothesis; only the sign is gated
};

struct HypothesisCheck {
  std::string name;
  double measured = 0.0;
  double limit = 0.0;
  bool ok = false;
};

/// Evaluates every hypothesis for the given mode without throwing.
std::vector<HypothesisCheck> fh_hypotheses(const FhInstance& inst, FhMode mode, CkNormOptions norm = {});

struct OrbitPoints {
  Grid z;                        // z_{-2k}, ..., z_{2k}; z_j = f^j(0)
  std::vector<double> z_tilde;   // z~_0, ..., z~_k
  int k = 0;
  double at(int j) const { return z[static_cast<std::size_t>(j + 2 * k)]; }
};

/// Throws NotIncreasing when f(0) <= 0 or f' <= 0 at an orbit point,
/// DomainEscape when an iterate leaves the domain, ParamError when z_tilde0
/// is outside (z_{-2k}, z_{2k}).
OrbitPoints orbit_points(const ScalarFamily& f, double z_tilde0, int k);

struct SweepEntry {
  double z_tilde0 = 0.0;
  double dd_value = 0.0;
  bool bounds_ok = false;
  bool sign_ok = false;
};

/// |g(z_j) - B/k!| <= c_2 eta with c_2 = c_1 / k!, where g(z_j) is the
/// divided difference with z~_0 = z_j.
struct NodeEstimate {
  int j = 0;
  double z = 0.0;
  double deviation = 0.0;
  double limit = 0.0;
  bool ok = false;
};

struct FhReport {
  FhMode mode = FhMode::exact;
  double C_k = 0.0;
  double eta_max = 0.0;  // min(1, B_k) / (2 C_k)
  Grid z_points;
  double dd_value = 0.0;  // value farthest from B/k! across the sweep
  double lower = 0.0;     // (B - C_k eta) / k!
  double upper = 0.0;     // (B + C_k eta) / k!
  bool sign_ok = false;
  bool bounds_ok = false;
  std::vector<SweepEntry> sweep;
  std::vector<NodeEstimate> node_estimates;
  std::vector<HypothesisCheck> hypotheses;

  /// Exact mode: sign, bounds and node estimates. Practical mode: sign.
  bool passed() const;
};

/// Divided difference [z_0..z_k; h(z~_0)..h(z~_k)] for one starting point.
double fh_divided_difference(const FhInstance& inst, const OrbitPoints& pts);

/// Single-point check. Hypotheses are verified first; the first failure is
/// raised as HypothesisViolation.
FhReport fh_check(const FhInstance& inst, double z_tilde0, FhMode mode = FhMode::exact, CkNormOptions norm = {});

/// grid_size starting points z~_0 = a + (i+1)(b-a)/(grid_size+1) strictly
/// inside (a, b) = (z_{-2k}, z_{2k}).
FhReport fh_sweep(const FhInstance& inst, int grid_size, FhMode mode = FhMode::exact, CkNormOptions norm = {});

}  // namespace orbitforge
