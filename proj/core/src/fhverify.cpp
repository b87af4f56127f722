#include "orbitforge/fhverify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "orbitforge/errors.hpp"
#include "orbitforge/faa.hpp"
#include "orbitforge/parallel.hpp"

namespace orbitforge {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double c1_constant(int k, double B_k1) { return std::ldexp(1.0, k + 3) * (k + 3) * B_k1 + 4.0; }

// Largest closed interval the norm estimator may sample inside (-eps, eps).
Interval closed_domain(double eps) {
  const double r = std::isfinite(eps) ? eps * (1.0 - 1e-12) : 1.0;
  return {-r, r};
}

double fd(const ScalarFamily& f, double z) {
  if (!f.in_domain(z)) throw DomainEscape("orbit point left the domain", 0, z);
  return f(z);
}

void check_derivative(const ScalarFamily& f, double z) {
  const double d = f.jet(z, 1)[1];
  if (!(d > 0.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "f' = " << d << " <= 0 at z = " << z;
    throw Error(Errc::not_increasing, os.str());
  }
}

SweepEntry evaluate(const FhInstance& inst, const OrbitPoints& pts, double lower, double upper) {
  SweepEntry e;
  e.z_tilde0 = pts.z_tilde.front();
  e.dd_value = fh_divided_difference(inst, pts);
  e.bounds_ok = lower < e.dd_value && e.dd_value < upper;
  e.sign_ok = (inst.B > 0.0 && e.dd_value > 0.0) || (inst.B < 0.0 && e.dd_value < 0.0);
  return e;
}

}  // namespace

double ck_constant(int k, double B_k1) {
  if (k < 2) throw Error(Errc::param, "C_k needs k >= 2");
  if (!(B_k1 >= 0.0) || !std::isfinite(B_k1)) throw Error(Errc::param, "C_k needs a finite B_{k+1} >= 0");
  return c1_constant(k, B_k1) * std::pow(8.0, k + 1) * std::exp(static_cast<double>(k));
}

std::vector<HypothesisCheck> fh_hypotheses(const FhInstance& inst, FhMode mode, CkNormOptions norm) {
  if (inst.k < 2) throw Error(Errc::param, "k must be at least 2");
  if (inst.k + 3 > kMaxJetOrder) throw Error(Errc::param, "k too large for jet storage");
  std::vector<HypothesisCheck> out;
  auto add = [&](std::string name, double measured, double limit, bool ok) {
    out.push_back({std::move(name), measured, limit, ok});
  };
  const int k = inst.k;
  const Interval dom = closed_domain(inst.eps);

  add("0 < B_k", inst.B_k, 0.0, inst.B_k > 0.0);
  add("B_k <= B_{k+1}", inst.B_k, inst.B_k1, inst.B_k <= inst.B_k1);
  add("|B| >= B_k", std::abs(inst.B), inst.B_k, std::abs(inst.B) >= inst.B_k);
  const double hk0 = inst.h0.jet(0.0, k).derivative(k);
  add("B = h0^(k)(0)", hk0, inst.B, std::abs(hk0 - inst.B) <= 1e-9 * std::max(1.0, std::abs(inst.B)));
  const double h0_norm = ck_norm(inst.h0, dom, k + 1, norm);
  add("||h0||_{C^{k+1}} <= B_{k+1}", h0_norm, inst.B_k1, h0_norm <= inst.B_k1);
  const double dh = ck_norm(jet_difference(jet_fn(inst.h), jet_fn(inst.h0)), dom, k, norm);
  add("||h - h0||_{C^k} < eta", dh, inst.eta, dh < inst.eta);
  const double df = ck_norm(jet_minus_identity(jet_fn(inst.f)), dom, k, norm);
  add("||f - id||_{C^k} < eta", df, inst.eta, df < inst.eta);
  const double f0 = inst.f(0.0);
  add("f(0) > 0", f0, 0.0, f0 > 0.0);
  if (mode == FhMode::exact) {
    const double C_k = ck_constant(k, std::max(0.0, inst.B_k1));
    const double eta_max = std::min(1.0, inst.B_k) / (2.0 * C_k);
    add("0 < eta < min(1, B_k) / (2 C_k)", inst.eta, eta_max, inst.eta > 0.0 && inst.eta < eta_max);
  } else {
    add("0 < eta", inst.eta, 0.0, inst.eta > 0.0);
  }
  return out;
}

OrbitPoints orbit_points(const ScalarFamily& f, double z_tilde0, int k) {
  if (k < 1) throw Error(Errc::param, "orbit needs k >= 1");
  std::vector<double> z(static_cast<std::size_t>(4 * k + 1));
  const auto mid = static_cast<std::size_t>(2 * k);
  z[mid] = 0.0;
  if (!f.in_domain(0.0)) throw DomainEscape("0 outside the domain", 0, 0.0);
  const double delta = f(0.0);
  if (!(delta > 0.0)) throw Error(Errc::not_increasing, "f(0) must be positive");
  check_derivative(f, 0.0);
  for (int j = 1; j <= 2 * k; ++j) {
    const double prev = z[mid + static_cast<std::size_t>(j - 1)];
    double next = 0.0;
    try {
      next = fd(f, prev);
    } catch (const DomainEscape&) {
      throw DomainEscape("forward orbit of 0 left the domain", j, prev);
    }
    if (!f.in_domain(next)) throw DomainEscape("forward orbit of 0 left the domain", j, next);
    check_derivative(f, next);
    z[mid + static_cast<std::size_t>(j)] = next;
  }
  for (int j = 1; j <= 2 * k; ++j) {
    const double prev = z[mid - static_cast<std::size_t>(j - 1)];
    double x = 0.0;
    try {
      x = solve_preimage(f, prev, prev);
    } catch (const DomainEscape&) {
      throw DomainEscape("backward orbit of 0 left the domain", -j, prev);
    }
    check_derivative(f, x);
    z[mid - static_cast<std::size_t>(j)] = x;
  }
  OrbitPoints pts;
  pts.k = k;
  pts.z = Grid(std::move(z));  // NotIncreasing if the orbit folds back
  if (!(pts.z[0] < z_tilde0 && z_tilde0 < pts.z[pts.z.size() - 1])) {
    std::ostringstream os;
    os.precision(17);
    os << "z~_0 = " << z_tilde0 << " outside (z_{-2k}, z_{2k}) = (" << pts.z[0] << ", " << pts.z[pts.z.size() - 1]
       << ")";
    throw Error(Errc::param, os.str());
  }
  pts.z_tilde.resize(static_cast<std::size_t>(k) + 1);
  pts.z_tilde[0] = z_tilde0;
  for (int j = 1; j <= k; ++j) {
    const double prev = pts.z_tilde[static_cast<std::size_t>(j - 1)];
    const double next = fd(f, prev);
    if (!f.in_domain(next)) throw DomainEscape("orbit of z~_0 left the domain", j, next);
    pts.z_tilde[static_cast<std::size_t>(j)] = next;
  }
  return pts;
}

double fh_divided_difference(const FhInstance& inst, const OrbitPoints& pts) {
  const int k = pts.k;
  std::vector<double> nodes(static_cast<std::size_t>(k) + 1);
  std::vector<double> values(static_cast<std::size_t>(k) + 1);
  for (int j = 0; j <= k; ++j) {
    nodes[static_cast<std::size_t>(j)] = pts.at(j);
    values[static_cast<std::size_t>(j)] = inst.h(pts.z_tilde[static_cast<std::size_t>(j)]);
  }
  return dd_recursive(Grid(std::move(nodes)), values).leading();
}

bool FhReport::passed() const {
  if (mode == FhMode::practical) return sign_ok;
  const bool nodes_ok = std::all_of(node_estimates.begin(), node_estimates.end(), [](const NodeEstimate& e) { return e.ok; });
  return sign_ok && bounds_ok && nodes_ok;
}

namespace {

FhReport prepare(const FhInstance& inst, FhMode mode, CkNormOptions norm) {
  FhReport rep;
  rep.mode = mode;
  rep.hypotheses = fh_hypotheses(inst, mode, norm);
  for (const auto& h : rep.hypotheses) {
    if (!h.ok) throw HypothesisViolation(h.name, h.measured, h.limit);
  }
  const int k = inst.k;
  rep.C_k = ck_constant(k, inst.B_k1);
  rep.eta_max = std::min(1.0, inst.B_k) / (2.0 * rep.C_k);
  const double kf = factorial(k);
  rep.lower = (inst.B - rep.C_k * inst.eta) / kf;
  rep.upper = (inst.B + rep.C_k * inst.eta) / kf;
  return rep;
}

void finish(FhReport& rep, const FhInstance& inst) {
  const double target = inst.B / factorial(inst.k);
  rep.sign_ok = !rep.sweep.empty();
  rep.bounds_ok = !rep.sweep.empty();
  double worst = -1.0;
  for (const auto& e : rep.sweep) {
    rep.sign_ok = rep.sign_ok && e.sign_ok;
    rep.bounds_ok = rep.bounds_ok && e.bounds_ok;
    const double dev = std::abs(e.dd_value - target);
    if (dev > worst) {
      worst = dev;
      rep.dd_value = e.dd_value;
    }
  }
}

std::string at_point(const std::string& what, double z) {
  std::ostringstream os;
  os.precision(17);
  os << what << " (z~_0 = " << z << ")";
  return os.str();
}

}  // namespace

FhReport fh_check(const FhInstance& inst, double z_tilde0, FhMode mode, CkNormOptions norm) {
  FhReport rep = prepare(inst, mode, norm);
  const OrbitPoints pts = orbit_points(inst.f, z_tilde0, inst.k);
  rep.z_points = pts.z;
  rep.sweep.push_back(evaluate(inst, pts, rep.lower, rep.upper));
  finish(rep, inst);
  return rep;
}

FhReport fh_sweep(const FhInstance& inst, int grid_size, FhMode mode, CkNormOptions norm) {
  if (grid_size < 1) throw Error(Errc::param, "sweep needs at least one point");
  FhReport rep = prepare(inst, mode, norm);
  const int k = inst.k;
  // Orbit of 0 alone; its endpoints fix the sweep interval.
  const OrbitPoints base = orbit_points(inst.f, 0.0, k);
  rep.z_points = base.z;
  const double a = base.at(-2 * k);
  const double b = base.at(2 * k);

  rep.sweep.resize(static_cast<std::size_t>(grid_size));
  parallel_for(rep.sweep.size(), [&](std::size_t i) {
    const double zt = a + static_cast<double>(i + 1) * (b - a) / (grid_size + 1);
    try {
      rep.sweep[i] = evaluate(inst, orbit_points(inst.f, zt, k), rep.lower, rep.upper);
    } catch (const DomainEscape& e) {
      throw DomainEscape(at_point(e.what(), zt), e.when(), e.where());
    } catch (const Error& e) {
      throw Error(e.code(), at_point(e.what(), zt));
    }
  });

  const double kf = factorial(k);
  const double c2 = c1_constant(k, inst.B_k1) / kf;
  for (int j = -2 * k + 1; j <= 2 * k - 1; ++j) {
    NodeEstimate ne;
    ne.j = j;
    ne.z = base.at(j);
    const double g = fh_divided_difference(inst, orbit_points(inst.f, ne.z, k));
    ne.deviation = std::abs(g - inst.B / kf);
    ne.limit = c2 * inst.eta;
    ne.ok = ne.deviation <= ne.limit;
    rep.node_estimates.push_back(ne);
  }
  finish(rep, inst);
  return rep;
}

}  // namespace orbitforge
