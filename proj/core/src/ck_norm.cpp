#include <algorithm>
#include <cmath>
#include <vector>

#include "orbitforge/errors.hpp"
#include "orbitforge/scalar_family.hpp"

namespace orbitforge {

double ck_norm(const JetFn& f, Interval interval, int k, CkNormOptions options) {
  if (k < 0) throw Error(Errc::param, "ck_norm: k must be nonnegative");
  if (options.samples < 2) throw Error(Errc::param, "ck_norm: need at least 2 samples");
  if (!(interval.lo <= interval.hi) || !std::isfinite(interval.lo) || !std::isfinite(interval.hi)) {
    throw Error(Errc::param, "ck_norm: invalid interval");
  }
  const bool refine = options.refine && k + 2 <= kMaxJetOrder && interval.hi > interval.lo;
  const int order = refine ? k + 2 : k;
  const int n = options.samples;
  const double h = interval.width() / (n - 1);

  // d[s * (order+1) + i] = f^(i)(z_s)
  std::vector<double> z(static_cast<std::size_t>(n));
  std::vector<double> d(static_cast<std::size_t>(n) * static_cast<std::size_t>(order + 1));
  for (int s = 0; s < n; ++s) {
    const double zs = (s == n - 1) ? interval.hi : interval.lo + s * h;
    z[static_cast<std::size_t>(s)] = zs;
    const Jet jet = f(zs, order);
    double fact = 1.0;
    for (int i = 0; i <= order; ++i) {
      if (i > 0) fact *= i;
      d[static_cast<std::size_t>(s * (order + 1) + i)] = fact * jet[i];
    }
  }
  auto at = [&](int s, int i) { return d[static_cast<std::size_t>(s * (order + 1) + i)]; };

  double best = 0.0;
  for (int i = 0; i <= k; ++i) {
    for (int s = 0; s < n; ++s) best = std::max(best, std::abs(at(s, i)));
    if (!refine) continue;
    for (int s = 1; s + 1 < n; ++s) {
      const double m = std::abs(at(s, i));
      if (m < std::abs(at(s - 1, i)) || m < std::abs(at(s + 1, i))) continue;
      const double d2 = at(s, i + 2);
      if (d2 == 0.0) continue;
      double zr = z[static_cast<std::size_t>(s)] - at(s, i + 1) / d2;
      zr = std::clamp(zr, z[static_cast<std::size_t>(s - 1)], z[static_cast<std::size_t>(s + 1)]);
      const Jet jr = f(zr, i);
      best = std::max(best, std::abs(jr.derivative(i)));
    }
  }
  return best;
}

double ck_norm(const ScalarFamily& f, Interval interval, int k, CkNormOptions options) {
  if (!f.in_domain(interval.lo) || !f.in_domain(interval.hi)) {
    throw Error(Errc::domain, "ck_norm: interval not inside the domain of the family");
  }
  return ck_norm(jet_fn(f), interval, k, options);
}

}  // namespace orbitforge
