#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "orbitforge/matrix_family.hpp"
#include "orbitforge/ode.hpp"

namespace orbitforge {

/// Vertical drift c(z) of the lift of the horizontal direction v: with
/// A~(z) b = v, the lifted field sum_j b_j X~_j equals v.Y + c(z) Z where
/// c(z) = sum_j b_j aZ_j(z).
class VerticalField {
 public:
  VerticalField(const ActionSpec& spec, Eigen::VectorXd direction);
  /// A field given directly by its drift coefficient.
  explicit VerticalField(ScalarFamily c);

  double operator()(double z) const;
  double value_unchecked(double z) const;
  /// b(z) = A~(z)^{-1} v; empty-spec fields return an empty vector.
  Eigen::VectorXd coefficients(double z) const;

  double eps() const noexcept { return eps_; }
  bool in_domain(double z) const noexcept { return -eps_ < z && z < eps_; }
  /// True when the spec carries no vertical coefficients at all.
  bool identically_zero() const noexcept { return zero_; }

 private:
  std::shared_ptr<const ActionSpec> spec_;
  Eigen::VectorXd direction_;
  std::optional<ScalarFamily> family_;
  double eps_ = ScalarFamily::kUnbounded;
  bool zero_ = false;
};

/// Lift of the i-th horizontal basis direction Y_i.
VerticalField vertical_field(const ActionSpec& spec, int i);

/// f^s(z0): solution at time 1 of dz/dt = s c(z). Throws DomainEscape with
/// the escape time.
double flow_time1(const VerticalField& field, double z0, int sign, const OdeOptions& options = {});

struct RotationEstimate {
  double estimate = 0.0;
  double error_bound = 0.0;
};

using Lift = std::function<double(double)>;

/// (F^N(x) - x) / N with error bound 1/N. Monotonicity of the lift is
/// sampled on [x, x+1]; NotMonotone is thrown on a decrease.
RotationEstimate rotation_number(const Lift& lift, long iters, double x = 0.0);

struct InducedRotation {
  double estimate = 0.0;
  double error_bound = 0.0;
  long fundamental_domains = 0;  // m with f_n^m(z*) <= f_i^N(z*) < f_n^{m+1}(z*)
  bool degenerate = false;       // f_n(z*) == z*: no circle to speak of
};

/// Rotation number of the circle map induced by f_i on the quotient of the
/// line by f_n, measured as fundamental domains of f_n crossed per iterate.
InducedRotation induced_rotation_number(const VerticalField& fi, const VerticalField& fn, double z_star, long iters,
                                        const OdeOptions& options = {});

enum class OrbitStatus { compact, noncompact, undecided };

std::string_view status_name(OrbitStatus s) noexcept;

struct DriftWitness {
  double lo = 0.0;  // traversed interval
  double hi = 0.0;
  int direction = 0;
  int sign = 1;
  double min_abs_c = 0.0;   // over sampled points of the interval
  double threshold = 0.0;   // what min_abs_c had to exceed
  std::string kind;         // "drift" or "monotone-escape"
};

struct OrbitVerdict {
  OrbitStatus status = OrbitStatus::undecided;
  std::vector<double> rotation_numbers;  // filled only when computed
  std::optional<DriftWitness> drift_witness;
  long iterations_used = 0;
  std::vector<double> last_iterates;  // undecided verdicts: the last 10
  std::string note;
};

struct ClassifyOptions {
  long budget = 10'000;
  /// Relative to the sampled sup of |c| over the domain.
  double integration_tol = 1e-12;
  double compact_tol = 1e-10;
  int scale_samples = 257;
  OdeOptions ode{};
};

OrbitVerdict classify_orbit(const ActionSpec& spec, double z0, const ClassifyOptions& options = {});

struct BirkhoffResult {
  Eigen::VectorXd estimate;                // xi(T v) / T
  std::vector<double> times;               // T/8, T/4, T/2, T
  std::vector<Eigen::VectorXd> convergence;
};

/// Integrates the lift of direction v from height z0 together with
/// xi(t) = int_0^t A~(z(s))^{-1} v ds, and reports xi / t at T/8, T/4, T/2, T.
BirkhoffResult birkhoff_tau(const ActionSpec& spec, const Eigen::VectorXd& v, double T, double z0 = 0.0,
                            const OdeOptions& options = {});

struct TrajectoryRow {
  double t = 0.0;
  double z = 0.0;
  double c = 0.0;
};

/// Rows at t = m T / steps, m = 0..steps, along the lift of direction v.
std::vector<TrajectoryRow> export_trajectory(const ActionSpec& spec, double z0, const Eigen::VectorXd& v, double T,
                                             int steps, const OdeOptions& options = {});

/// CSV with header t,z,c and 17 significant digits.
void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows);

}  // namespace orbitforge
