#include "orbitforge/faa.hpp"

#include <cmath>
#include <sstream>

#include "orbitforge/errors.hpp"

namespace orbitforge {

namespace {

void check_partition_size(int r) {
  if (r < 1 || r > kMaxPartitionSize) {
    std::ostringstream os;
    os << "partition size " << r << " outside [1, " << kMaxPartitionSize << "]";
    throw Error(Errc::param, os.str());
  }
}

void check_combinatorial_range(int n, int m) {
  if (n < 0 || n > 20 || m < 0 || m > n) {
    std::ostringstream os;
    os << "(n, m) = (" << n << ", " << m << ") outside 0 <= m <= n <= 20";
    throw Error(Errc::param, os.str());
  }
}

Jet step_forward(const ScalarFamily& f, const Jet& cur, int index) {
  if (!f.in_domain(cur[0])) throw DomainEscape("iterate left the domain", index, cur[0]);
  return f.jet(cur);
}

Jet step_backward(const ScalarFamily& f, const Jet& cur, int index) {
  const double y = cur[0];
  double x = 0.0;
  try {
    x = solve_preimage(f, y, y);
  } catch (const DomainEscape&) {
    throw DomainEscape("inverse iterate left the domain", index, y);
  }
  const Jet g = f.jet(x, cur.order());
  const Jet inv = jet_invert(g).rebased(y);
  return jet_compose(inv, cur);
}

void require(bool ok, const char* hypothesis, double measured, double limit) {
  if (!ok) throw HypothesisViolation(hypothesis, measured, limit);
}

}  // namespace

std::vector<SetPartition> set_partitions(int r) {
  check_partition_size(r);
  std::vector<SetPartition> out;
  out.reserve(static_cast<std::size_t>(bell(r)));
  for_each_partition(r, [&](const std::vector<int>& a, int blocks) {
    SetPartition p;
    p.blocks.resize(static_cast<std::size_t>(blocks));
    for (int i = 0; i < r; ++i) p.blocks[static_cast<std::size_t>(a[static_cast<std::size_t>(i)])].push_back(i + 1);
    out.push_back(std::move(p));
  });
  return out;
}

std::uint64_t stirling2(int n, int m) {
  check_combinatorial_range(n, m);
  // S(i, l) = l S(i-1, l) + S(i-1, l-1), row by row.
  std::vector<std::uint64_t> row(static_cast<std::size_t>(n) + 1, 0);
  row[0] = 1;
  for (int i = 1; i <= n; ++i) {
    for (int l = i; l >= 1; --l) {
      row[static_cast<std::size_t>(l)] =
          static_cast<std::uint64_t>(l) * row[static_cast<std::size_t>(l)] + row[static_cast<std::size_t>(l - 1)];
    }
    row[0] = 0;
  }
  return row[static_cast<std::size_t>(m)];
}

std::uint64_t bell(int n) {
  check_combinatorial_range(n, 0);
  if (n == 0) return 1;
  std::uint64_t total = 0;
  for (int m = 0; m <= n; ++m) total += stirling2(n, m);
  return total;
}

std::uint64_t binomial(int n, int m) {
  check_combinatorial_range(n, m);
  std::uint64_t c = 1;
  for (int i = 1; i <= m; ++i) c = c * static_cast<std::uint64_t>(n - m + i) / static_cast<std::uint64_t>(i);
  return c;
}

double faa_di_bruno(std::span<const double> outer_derivs, std::span<const double> inner_derivs, int r) {
  if (r < 1 || r > kMaxFaaOrder) {
    std::ostringstream os;
    os << "order " << r << " outside [1, " << kMaxFaaOrder << "]";
    throw Error(Errc::param, os.str());
  }
  if (outer_derivs.size() < static_cast<std::size_t>(r) || inner_derivs.size() < static_cast<std::size_t>(r)) {
    throw Error(Errc::length_mismatch, "need r outer and r inner derivatives");
  }
  std::vector<int> sizes(static_cast<std::size_t>(r));
  double total = 0.0;
  for_each_partition(r, [&](const std::vector<int>& a, int blocks) {
    std::fill(sizes.begin(), sizes.begin() + blocks, 0);
    for (int i = 0; i < r; ++i) ++sizes[static_cast<std::size_t>(a[static_cast<std::size_t>(i)])];
    double term = outer_derivs[static_cast<std::size_t>(blocks - 1)];
    for (int b = 0; b < blocks; ++b) term *= inner_derivs[static_cast<std::size_t>(sizes[static_cast<std::size_t>(b)] - 1)];
    total += term;
  });
  return total;
}

double solve_preimage(const ScalarFamily& f, double y, double guess) {
  double x = guess;
  for (int it = 0; it < 100; ++it) {
    if (!f.in_domain(x)) throw DomainEscape("Newton iterate left the domain", it, x);
    const Jet j = f.jet(x, 1);
    const double d = j[1];
    if (!(std::abs(d) > 1e-14) || !std::isfinite(d)) {
      throw Error(Errc::non_invertible, "derivative vanishes while solving f(x) = y");
    }
    const double dx = (j[0] - y) / d;
    x -= dx;
    if (std::abs(dx) <= 4e-16 * std::max(1.0, std::abs(x))) return x;
  }
  throw Error(Errc::non_invertible, "Newton iteration for f(x) = y did not converge");
}

Jet iterate_map_jets(const ScalarFamily& f, int j, double z0, int order) {
  if (!f.in_domain(z0)) throw DomainEscape("starting point outside the domain", 0, z0);
  Jet cur = Jet::variable(z0, order);
  if (j >= 0) {
    for (int s = 0; s < j; ++s) cur = step_forward(f, cur, s + 1);
  } else {
    for (int s = 0; s < -j; ++s) cur = step_backward(f, cur, -(s + 1));
  }
  return cur;
}

Jet inverse_map_jet(const ScalarFamily& f, double z0, int order) { return jet_invert(f.jet(z0, order)); }

double tildehj_constant(int k, double B_k1) {
  return (std::ldexp(1.0, k + 3) * (k + 3) - 2.0 * k) * B_k1 + 4.0;
}

double tildehj_eta_limit(int k) { return 1.0 / ((k + 1) * std::ldexp(1.0, k + 3)); }

namespace {

Interval widen(Interval i, double margin) { return {i.lo - margin, i.hi + margin}; }

}  // namespace

CompositionBoundReport tildehj_check(const ScalarFamily& h0, const ScalarFamily& h, const ScalarFamily& f, int k,
                                     int j, double eta, double B_k1, BoundCheckOptions options) {
  if (k < 2) throw Error(Errc::param, "composition bound needs k >= 2");
  if (k + 3 > kMaxJetOrder) throw Error(Errc::param, "k too large for jet storage");
  require(j >= -2 * k && j <= 2 * k, "-2k <= j <= 2k", j, 2 * k);
  const double eta_limit = tildehj_eta_limit(k);
  require(eta > 0.0 && eta < eta_limit, "0 < eta < 1/((k+1) 2^(k+3))", eta, eta_limit);

  // Iterates of points in the interval move by at most about 2k eta, so the
  // hypotheses are measured on a slightly wider interval.
  const Interval wide = widen(options.interval, 4.0 * k * eta);
  const double h0_norm = ck_norm(h0, wide, k + 1, options.norm);
  require(h0_norm <= B_k1, "||h0||_{C^{k+1}} <= B_{k+1}", h0_norm, B_k1);
  const double dh = ck_norm(jet_difference(jet_fn(h), jet_fn(h0)), wide, k, options.norm);
  require(dh < eta, "||h - h0||_{C^k} < eta", dh, eta);
  const double df = ck_norm(jet_minus_identity(jet_fn(f)), wide, k, options.norm);
  require(df < eta, "||f - id||_{C^k} < eta", df, eta);

  CompositionBoundReport rep;
  rep.k = k;
  rep.j = j;
  rep.eta = eta;
  rep.bound_constant = tildehj_constant(k, B_k1);
  rep.bound_value = rep.bound_constant * eta;
  const JetFn composed = [&](double z, int order) {
    return h.jet(iterate_map_jets(f, j, z, order)) - h0.jet(z, order);
  };
  rep.measured_norm = ck_norm(composed, options.interval, k, options.norm);
  rep.satisfied = rep.measured_norm < rep.bound_value;
  return rep;
}

IterateBoundReport iterate_bound_check(const ScalarFamily& f, int k, int j, double eta, BoundCheckOptions options) {
  if (k < 1) throw Error(Errc::param, "iterate bound needs k >= 1");
  const Interval wide = widen(options.interval, 4.0 * std::abs(j) * eta);
  const double df = ck_norm(jet_minus_identity(jet_fn(f)), wide, k, options.norm);
  require(df < eta, "||f - id||_{C^k} < eta", df, eta);
  const double eta_limit = tildehj_eta_limit(k);
  if (j < 0) require(eta < eta_limit, "0 < eta < 1/((k+1) 2^(k+3))", eta, eta_limit);

  IterateBoundReport rep;
  rep.j = j;
  const double per_step = j >= 0 ? eta : (1.0 + 0.5 / k) * eta;
  rep.bound_value = 2.0 * std::abs(j) * per_step;
  const JetFn iterate = [&](double z, int order) {
    return iterate_map_jets(f, j, z, order) - Jet::variable(z, order);
  };
  rep.measured_norm = ck_norm(iterate, options.interval, k, options.norm);
  rep.satisfied = j == 0 ? rep.measured_norm == 0.0 : rep.measured_norm < rep.bound_value;
  return rep;
}

bool power_inequality_holds(double a, int m) {
  // (1+a)^m < (1-a)^{-m}  <=>  m log1p(a) < -m log1p(-a)
  // (1-a)^{-m} < 1+(m+1)a <=>  -m log1p(-a) < log1p((m+1)a)
  const double lhs = m * std::log1p(a);
  const double mid = -m * std::log1p(-a);
  const double rhs = std::log1p((m + 1) * a);
  return lhs < mid && mid < rhs;
}

}  // namespace orbitforge
