#include "orbitforge/orbitsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "orbitforge/errors.hpp"

namespace orbitforge {

namespace {

Eigen::VectorXd solve_direction(const Eigen::MatrixXd& a, const Eigen::VectorXd& v, double z) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  if (lu.determinant() == 0.0 || !std::isfinite(lu.determinant())) {
    std::ostringstream os;
    os.precision(17);
    os << "A~(z) singular at z = " << z;
    throw Error(Errc::singular_matrix, os.str());
  }
  return lu.solve(v);
}

OdeInside inside_of(const VerticalField& field) {
  return [&field](const State& x) { return field.in_domain(x[0]); };
}

double length_scale(double eps) { return std::isfinite(eps) ? eps : 1.0; }

}  // namespace

VerticalField::VerticalField(const ActionSpec& spec, Eigen::VectorXd direction)
    : spec_(std::make_shared<const ActionSpec>(spec)),
      direction_(std::move(direction)),
      eps_(spec.eps),
      zero_(!spec.perturbed()) {
  if (direction_.size() != spec.n) throw Error(Errc::length_mismatch, "direction has the wrong dimension");
}

VerticalField::VerticalField(ScalarFamily c) : family_(std::move(c)) {
  eps_ = family_->eps();
  zero_ = family_->expr().op() == ExprOp::constant && family_->expr().value() == 0.0;
}

double VerticalField::operator()(double z) const {
  if (!in_domain(z)) {
    std::ostringstream os;
    os.precision(17);
    os << "z = " << z << " outside the domain of the vertical field";
    throw Error(Errc::domain, os.str());
  }
  return value_unchecked(z);
}

double VerticalField::value_unchecked(double z) const {
  if (family_) return family_->value_unchecked(z);
  if (zero_) return 0.0;
  const Eigen::VectorXd b = solve_direction(spec_->A.value_unchecked(z), direction_, z);
  return b.dot(spec_->vertical_unchecked(z));
}

Eigen::VectorXd VerticalField::coefficients(double z) const {
  if (family_) return {};
  return solve_direction(spec_->A.value(z), direction_, z);
}

VerticalField vertical_field(const ActionSpec& spec, int i) {
  if (i < 0 || i >= spec.n) throw Error(Errc::param, "direction index out of range");
  return VerticalField(spec, Eigen::VectorXd::Unit(spec.n, i));
}

double flow_time1(const VerticalField& field, double z0, int sign, const OdeOptions& options) {
  if (sign != 1 && sign != -1) throw Error(Errc::param, "flow sign must be +1 or -1");
  if (!field.in_domain(z0)) throw DomainEscape("starting point outside the domain", 0.0, z0);
  if (field.identically_zero()) return z0;
  const double s = sign;
  const OdeRhs rhs = [&field, s](const State& x, State& dxdt, double) { dxdt[0] = s * field.value_unchecked(x[0]); };
  return integrate(rhs, State{z0}, 0.0, 1.0, options, inside_of(field))[0];
}

RotationEstimate rotation_number(const Lift& lift, long iters, double x) {
  if (iters < 1) throw Error(Errc::param, "rotation number needs at least one iterate");
  constexpr int kProbe = 64;
  double prev = lift(x);
  for (int s = 1; s <= kProbe; ++s) {
    const double cur = lift(x + static_cast<double>(s) / kProbe);
    if (!(cur > prev)) throw Error(Errc::not_monotone, "lift is not strictly increasing");
    prev = cur;
  }
  double y = x;
  for (long n = 0; n < iters; ++n) y = lift(y);
  return {(y - x) / static_cast<double>(iters), 1.0 / static_cast<double>(iters)};
}

InducedRotation induced_rotation_number(const VerticalField& fi, const VerticalField& fn, double z_star, long iters,
                                        const OdeOptions& options) {
  if (iters < 1) throw Error(Errc::param, "rotation number needs at least one iterate");
  InducedRotation out;
  const double d = flow_time1(fn, z_star, 1, options);
  if (d == z_star) {
    out.degenerate = true;
    return out;
  }
  const int sn = d > z_star ? 1 : -1;
  double y = z_star;
  for (long n = 0; n < iters; ++n) y = flow_time1(fi, y, 1, options);
  // Count fundamental domains of the generator between z_star and y.
  long m = 0;
  double u = z_star;
  const double dir = sn;
  if (dir * (y - z_star) >= 0.0) {
    for (;;) {
      const double next = flow_time1(fn, u, sn, options);
      if (dir * (next - y) > 0.0) break;
      u = next;
      ++m;
    }
  } else {
    while (dir * (u - y) > 0.0) {
      u = flow_time1(fn, u, -sn, options);
      --m;
    }
  }
  out.fundamental_domains = m;
  out.estimate = static_cast<double>(m) / static_cast<double>(iters);
  out.error_bound = 1.0 / static_cast<double>(iters);
  return out;
}

std::string_view status_name(OrbitStatus s) noexcept {
  switch (s) {
    case OrbitStatus::compact:
      return "compact";
    case OrbitStatus::noncompact:
      return "noncompact";
    case OrbitStatus::undecided:
      return "undecided";
  }
  return "undecided";
}

namespace {

void push_recent(std::vector<double>& recent, double z) {
  recent.push_back(z);
  if (recent.size() > 10) recent.erase(recent.begin());
}

DriftWitness drift_witness(const VerticalField& field, double z0, int direction, int sign, double threshold,
                           const OdeOptions& ode) {
  DriftWitness w;
  w.kind = "drift";
  w.direction = direction;
  w.sign = sign;
  w.threshold = threshold;
  w.lo = w.hi = z0;
  w.min_abs_c = std::abs(field(z0));
  const double s = sign;
  const OdeRhs rhs = [&field, s](const State& x, State& dxdt, double) { dxdt[0] = s * field.value_unchecked(x[0]); };
  constexpr int kSamples = 32;
  State x{z0};
  for (int m = 1; m <= kSamples; ++m) {
    try {
      x = integrate(rhs, x, static_cast<double>(m - 1) / kSamples, static_cast<double>(m) / kSamples, ode,
                    inside_of(field));
    } catch (const DomainEscape&) {
      break;
    }
    const double c = std::abs(field(x[0]));
    if (!(c > threshold)) break;
    w.lo = std::min(w.lo, x[0]);
    w.hi = std::max(w.hi, x[0]);
    w.min_abs_c = std::min(w.min_abs_c, c);
  }
  return w;
}

OrbitVerdict classify_impl(const ActionSpec& spec, double z0, const ClassifyOptions& opt) {
  OrbitVerdict v;
  if (!(-spec.eps < z0 && z0 < spec.eps)) {
    v.note = "z0 outside the domain";
    return v;
  }
  if (!spec.perturbed()) {
    v.status = OrbitStatus::compact;
    v.note = "no vertical coefficients; the orbit is the horizontal torus";
    return v;
  }
  const int n = spec.n;
  std::vector<VerticalField> fields;
  for (int i = 0; i < n; ++i) fields.push_back(vertical_field(spec, i));

  std::vector<double> cz(static_cast<std::size_t>(n));
  double scale = 0.0;
  for (int i = 0; i < n; ++i) {
    cz[static_cast<std::size_t>(i)] = fields[static_cast<std::size_t>(i)](z0);
    scale = std::max(scale, std::abs(cz[static_cast<std::size_t>(i)]));
  }
  const double r = std::isfinite(spec.eps) ? spec.eps * (1.0 - 1e-9) : 1.0;
  const double center = std::isfinite(spec.eps) ? 0.0 : z0;
  for (int s = 0; s < opt.scale_samples; ++s) {
    const double z = center - r + 2.0 * r * s / std::max(1, opt.scale_samples - 1);
    for (const auto& f : fields) scale = std::max(scale, std::abs(f(z)));
  }
  if (scale == 0.0) {
    v.status = OrbitStatus::compact;
    v.note = "vertical drift vanishes at every sampled height";
    return v;
  }

  const double threshold = 10.0 * opt.integration_tol * scale;
  int imax = 0;
  for (int i = 1; i < n; ++i) {
    if (std::abs(cz[static_cast<std::size_t>(i)]) > std::abs(cz[static_cast<std::size_t>(imax)])) imax = i;
  }
  const double cmax = cz[static_cast<std::size_t>(imax)];
  if (std::abs(cmax) > threshold) {
    v.status = OrbitStatus::noncompact;
    v.iterations_used = 1;
    v.drift_witness = drift_witness(fields[static_cast<std::size_t>(imax)], z0, imax, cmax > 0.0 ? 1 : -1,
                                    threshold, opt.ode);
    v.note = "vertical drift bounded away from zero along the traversed interval";
    return v;
  }
  if (std::all_of(cz.begin(), cz.end(), [](double c) { return c == 0.0; })) {
    v.status = OrbitStatus::compact;
    v.note = "z0 is a common fixed point of every time-1 map";
    return v;
  }

  // Drift is tiny but nonzero at z0. Probe the neighbourhood.
  const double room = std::isfinite(spec.eps) ? std::min(1.0, 0.5 * (spec.eps - std::abs(z0))) : 1.0;
  double probe_max = 0.0;
  int probe_dir = imax;
  for (double off : {1e-6, 1e-4, 1e-2}) {
    for (double sgn : {-1.0, 1.0}) {
      const double z = z0 + sgn * off * room;
      for (int i = 0; i < n; ++i) {
        const double c = std::abs(fields[static_cast<std::size_t>(i)](z));
        if (c > probe_max) {
          probe_max = c;
          probe_dir = i;
        }
      }
    }
  }
  const double compact_level = opt.compact_tol * scale;
  if (std::abs(cmax) <= compact_level && probe_max <= compact_level) {
    v.status = OrbitStatus::compact;
    v.note = "numerical: drift below tolerance at z0 and nearby";
    return v;
  }

  // Iterate the time-1 map of the most active direction.
  const VerticalField& field = fields[static_cast<std::size_t>(probe_dir)];
  const double L = length_scale(spec.eps);
  const int run_needed = 4 * std::max(1, spec.k);
  double z = z0;
  int run = 0;
  int run_sign = 0;
  double run_start = z0;
  double run_min_c = std::numeric_limits<double>::infinity();
  push_recent(v.last_iterates, z);
  for (long it = 1; it <= opt.budget; ++it) {
    double next = 0.0;
    try {
      next = flow_time1(field, z, 1, opt.ode);
    } catch (const DomainEscape&) {
      v.iterations_used = it;
      if (run >= 1) {
        v.status = OrbitStatus::noncompact;
        v.drift_witness = DriftWitness{std::min(run_start, z), std::max(run_start, z), probe_dir, run_sign,
                                       run_min_c, 0.0, "monotone-escape"};
        v.note = "monotone iterates left the domain";
      } else {
        v.note = "iterate left the domain without a monotone run";
      }
      return v;
    }
    v.iterations_used = it;
    const double step = next - z;
    const double floor = 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(z), L);
    if (std::abs(step) <= floor) {
      push_recent(v.last_iterates, next);
      v.note = "iterates stagnated at roundoff level";
      return v;
    }
    const int sgn = step > 0.0 ? 1 : -1;
    if (sgn == run_sign) {
      ++run;
    } else {
      run = 1;
      run_sign = sgn;
      run_start = z;
      run_min_c = std::numeric_limits<double>::infinity();
    }
    run_min_c = std::min(run_min_c, std::abs(field(next)));
    z = next;
    push_recent(v.last_iterates, z);
    if (run >= run_needed) {
      v.status = OrbitStatus::noncompact;
      v.drift_witness = DriftWitness{std::min(run_start, z), std::max(run_start, z), probe_dir, run_sign, run_min_c,
                                     floor, "monotone-escape"};
      v.note = "strictly monotone run of iterates";
      v.last_iterates.clear();
      return v;
    }
  }
  v.note = "iteration budget exhausted";
  return v;
}

}  // namespace

OrbitVerdict classify_orbit(const ActionSpec& spec, double z0, const ClassifyOptions& options) {
  try {
    return classify_impl(spec, z0, options);
  } catch (const Error& e) {
    OrbitVerdict v;
    v.note = std::string("classification aborted: ") + e.what();
    return v;
  }
}

BirkhoffResult birkhoff_tau(const ActionSpec& spec, const Eigen::VectorXd& v, double T, double z0,
                            const OdeOptions& options) {
  if (!(T > 0.0)) throw Error(Errc::param, "T must be positive");
  if (v.size() != spec.n) throw Error(Errc::length_mismatch, "direction has the wrong dimension");
  if (!(-spec.eps < z0 && z0 < spec.eps)) throw DomainEscape("starting point outside the domain", 0.0, z0);
  const int n = spec.n;
  const OdeRhs rhs = [&](const State& x, State& dxdt, double) {
    const Eigen::VectorXd b = solve_direction(spec.A.value_unchecked(x[0]), v, x[0]);
    dxdt[0] = spec.aZ.empty() ? 0.0 : b.dot(spec.vertical_unchecked(x[0]));
    for (int i = 0; i < n; ++i) dxdt[static_cast<std::size_t>(i) + 1] = b(i);
  };
  const OdeInside inside = [&spec](const State& x) { return -spec.eps < x[0] && x[0] < spec.eps; };
  BirkhoffResult out;
  State x(static_cast<std::size_t>(n) + 1, 0.0);
  x[0] = z0;
  double t = 0.0;
  for (double frac : {0.125, 0.25, 0.5, 1.0}) {
    const double t1 = frac * T;
    x = integrate(rhs, x, t, t1, options, inside);
    t = t1;
    Eigen::VectorXd est(n);
    for (int i = 0; i < n; ++i) est(i) = x[static_cast<std::size_t>(i) + 1] / t1;
    out.times.push_back(t1);
    out.convergence.push_back(est);
  }
  out.estimate = out.convergence.back();
  return out;
}

std::vector<TrajectoryRow> export_trajectory(const ActionSpec& spec, double z0, const Eigen::VectorXd& v, double T,
                                             int steps, const OdeOptions& options) {
  if (steps < 1) throw Error(Errc::param, "trajectory needs at least one step");
  if (!(T > 0.0)) throw Error(Errc::param, "T must be positive");
  const VerticalField field(spec, v);
  if (!field.in_domain(z0)) throw DomainEscape("starting point outside the domain", 0.0, z0);
  const OdeRhs rhs = [&field](const State& x, State& dxdt, double) { dxdt[0] = field.value_unchecked(x[0]); };
  std::vector<TrajectoryRow> rows;
  rows.reserve(static_cast<std::size_t>(steps) + 1);
  State x{z0};
  rows.push_back({0.0, z0, field(z0)});
  for (int m = 1; m <= steps; ++m) {
    const double t0 = T * (m - 1) / steps;
    const double t1 = T * m / steps;
    if (!field.identically_zero()) x = integrate(rhs, x, t0, t1, options, inside_of(field));
    rows.push_back({t1, x[0], field(x[0])});
  }
  return rows;
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows) {
  out << "t,z,c\n";
  char buf[96];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", r.t, r.z, r.c);
    out << buf;
  }
}

}  // namespace orbitforge
