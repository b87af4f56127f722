// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "orbitforge/action.hpp"
#include "orbitforge/divdiff.hpp"
#include "orbitforge/errors.hpp"
#include "orbitforge/faa.hpp"
#include "orbitforge/fhverify.hpp"
#include "orbitforge/orbitsim.hpp"
#include "orbitforge/parallel.hpp"
#include "orbitforge/tools/cli.hpp"

using namespace orbitforge;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

using Rng = std::mt19937_64;

double uniform(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
int uniform_int(Rng& rng, int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// 1 --------------------------------------------------------------------------

Outcome divided_difference_routes() {
  Rng rng(1001);
  double worst = 0.0;
  int bad = 0;
  std::string first;
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = uniform_int(rng, 1, 8);
    std::vector<double> x(static_cast<std::size_t>(k) + 1), y(x.size());
    x[0] = uniform(rng, -5.0, 5.0);
    for (std::size_t i = 1; i < x.size(); ++i) x[i] = x[i - 1] + uniform(rng, 1e-3, 1.0);
    for (auto& v : y) v = uniform(rng, -10.0, 10.0);
    try {
      const Grid g(x);
      const auto w = dd_weights(g);
      double scale = 0.0;
      for (std::size_t j = 0; j < w.size(); ++j) scale += std::abs(w[j] * y[j]);
      const double a = dd_recursive(g, y).leading();
      const double b = dd_weighted(g, y);
      const double c = dd_vandermonde(g, y);
      const double rel = std::max({std::abs(a - b), std::abs(a - c), std::abs(b - c)}) / scale;
      worst = std::max(worst, rel);
      if (!(rel <= 1e-9)) ++bad;
    } catch (const std::exception& e) {
      ++bad;
      if (first.empty()) first = e.what();
    }
  }
  return {bad == 0, fmt("1000 instances, k<=8, max pairwise rel %.2e, %d failures%s", worst, bad,
                        first.empty() ? "" : ("; " + first).c_str())};
}

// 2 --------------------------------------------------------------------------

Outcome polynomial_exactness() {
  Rng rng(2002);
  double worst_low = 0.0, worst_monic = 0.0;
  int bad = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int k = uniform_int(rng, 1, 8);
    const double h = 2.0 / k;
    std::vector<double> x(static_cast<std::size_t>(k) + 1);
    for (int j = 0; j <= k; ++j) x[static_cast<std::size_t>(j)] = -1.0 + j * h + uniform(rng, -0.25, 0.25) * h;
    const bool monic = trial % 2 == 1;
    const int degree = monic ? k : uniform_int(rng, 0, k - 1);
    std::vector<double> a(static_cast<std::size_t>(degree) + 1);
    for (auto& c : a) c = uniform(rng, -1.0, 1.0);
    if (monic) a.back() = 1.0;
    std::vector<double> y;
    for (double xi : x) {
      double p = 0.0;
      for (auto it = a.rbegin(); it != a.rend(); ++it) p = p * xi + *it;
      y.push_back(p);
    }
    const double dd = dd_recursive(Grid(x), y).leading();
    if (monic) {
      worst_monic = std::max(worst_monic, std::abs(dd - 1.0));
      if (!(std::abs(dd - 1.0) <= 1e-10)) ++bad;
    } else {
      worst_low = std::max(worst_low, std::abs(dd));
      if (!(std::abs(dd) <= 1e-9)) ++bad;
    }
  }
  return {bad == 0,
          fmt("10000 cases, max |dd| below degree k %.2e, max |dd-1| monic %.2e, %d failures", worst_low,
              worst_monic, bad)};
}

// 3 --------------------------------------------------------------------------

const char* const kOuter[] = {"exp(a*z)", "sin(a*z + b)", "cos(a*z) + b*z^3", "log(2 + a*sin(z))", "1/(3 + a*z + b*z^2)",
                              "exp(0.5*log(4 + a*z))"};
const char* const kInner[] = {"a*sin(z) + b*z^2", "exp(a*z) - 1", "z/(2 + b*z^2)", "a*z^3 + b*z", "cos(a*z + b)",
                              "log(3 + a*z)"};

Outcome faa_di_bruno_vs_jets() {
  Rng rng(3003);
  const int r_max = 8;
  double worst = 0.0;
  int bad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Params p{{"a", uniform(rng, -1.0, 1.0)}, {"b", uniform(rng, -1.0, 1.0)}};
    const auto g = ScalarFamily::parse(kInner[trial % 6], p);
    const auto f = ScalarFamily::parse(kOuter[(trial / 6) % 6], p);
    const double x = uniform(rng, -0.5, 0.5);
    const Jet inner = g.jet(x, r_max);
    const Jet outer = f.jet(inner.value(), r_max);
    const Jet comp = jet_compose(outer, inner);
    std::vector<double> F, G, absF, absG;
    for (int i = 1; i <= r_max; ++i) {
      F.push_back(outer.derivative(i));
      G.push_back(inner.derivative(i));
      absF.push_back(std::abs(F.back()));
      absG.push_back(std::abs(G.back()));
    }
    for (int r = 1; r <= r_max; ++r) {
      const double scale = std::max(faa_di_bruno(absF, absG, r), std::numeric_limits<double>::min());
      const double rel = std::abs(faa_di_bruno(F, G, r) - comp.derivative(r)) / scale;
      worst = std::max(worst, rel);
      if (!(rel <= 1e-10)) ++bad;
    }
  }
  // Bell numbers by the recurrence B_{n+1} = sum_m C(n, m) B_m.
  std::vector<std::uint64_t> bells{1};
  for (int n = 0; n < 9; ++n) {
    std::uint64_t s = 0;
    for (int m = 0; m <= n; ++m) s += binomial(n, m) * bells[static_cast<std::size_t>(m)];
    bells.push_back(s);
  }
  const std::uint64_t listed[] = {1, 1, 2, 5, 15, 52, 203, 877, 4140};
  bool counts_ok = true;
  for (int n = 0; n <= 8; ++n) counts_ok = counts_ok && bells[static_cast<std::size_t>(n)] == listed[n];
  for (int r = 1; r <= 9; ++r) {
    std::uint64_t count = 0;
    for_each_partition(r, [&](const std::vector<int>&, int) { ++count; });
    counts_ok = counts_ok && count == bells[static_cast<std::size_t>(r)] && bell(r) == count;
  }
  return {bad == 0 && counts_ok, fmt("200 pairs x r=1..8, max rel %.2e, %d failures; partition counts %s", worst, bad,
                                     counts_ok ? "match Bell numbers for r<=9" : "MISMATCH")};
}

// 4 --------------------------------------------------------------------------

Outcome composition_bound() {
  const int n = 500;
  struct Result {
    bool ok = false;
    double ratio = 0.0;
    std::string error;
  };
  std::vector<Result> results(n);
  parallel_for(n, [&](std::size_t i) {
    Rng rng(4004 + i);
    const int k = 2 + static_cast<int>(i % 3);
    const double eta = uniform(rng, 0.05, 0.95) * tildehj_eta_limit(k);
    const int j = uniform_int(rng, -2 * k, 2 * k);
    Params p{{"a", uniform(rng, -1.0, 1.0)}, {"w", uniform(rng, 0.5, 2.0)}, {"ph", uniform(rng, 0.0, 6.3)}};
    std::string h0_text = "a*sin(w*z + ph)";
    for (int m = 0; m <= k + 1; ++m) {
      const std::string c = "c" + std::to_string(m);
      p[c] = uniform(rng, -1.0, 1.0);
      h0_text += " + " + c + "*z^" + std::to_string(m);
    }
    p["s"] = uniform(rng, 0.1, 0.9) * eta;
    p["w2"] = uniform(rng, 0.2, 1.0);
    p["ph2"] = uniform(rng, 0.0, 6.3);
    p["t"] = uniform(rng, -0.6, 0.6) * eta;
    p["u"] = uniform(rng, -0.3, 0.3) * eta;
    p["w3"] = uniform(rng, 0.2, 1.0);
    p["ph3"] = uniform(rng, 0.0, 6.3);
    const auto h0 = ScalarFamily::parse(h0_text, p);
    // With w2, w3 <= 1 every derivative of the sine terms is bounded by its
    // amplitude, so ||h - h0|| <= s < eta and ||f - id|| <= |t| + |u| < eta.
    const auto h = ScalarFamily::parse(h0_text + " + s*sin(w2*z + ph2)", p);
    const auto f = ScalarFamily::parse("z + t + u*sin(w3*z + ph3)", p);
    BoundCheckOptions opts;
    const Interval wide{opts.interval.lo - 4.0 * k * eta, opts.interval.hi + 4.0 * k * eta};
    const double B_k1 = 1.01 * ck_norm(h0, wide, k + 1, opts.norm);
    try {
      const auto rep = tildehj_check(h0, h, f, k, j, eta, B_k1, opts);
      results[i] = {rep.satisfied, rep.measured_norm / rep.bound_value, {}};
    } catch (const std::exception& e) {
      results[i] = {false, 0.0, e.what()};
    }
  });
  int bad = 0;
  double worst = 0.0;
  std::string first;
  for (const auto& r : results) {
    if (!r.ok) ++bad;
    if (first.empty() && !r.error.empty()) first = r.error;
    worst = std::max(worst, r.ratio);
  }
  return {bad == 0, fmt("500 instances k in {2,3,4}, %d violations, max measured/bound %.3e%s", bad, worst,
                        first.empty() ? "" : ("; " + first).c_str())};
}

// 5 --------------------------------------------------------------------------

FhInstance fh_instance(Rng& rng, int k, FhMode mode) {
  FhInstance in;
  in.k = k;
  in.eps = 0.5;
  const double B = (uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0) * uniform(rng, 0.5, 2.0);
  Params p{{"Bk", B / factorial(k)}};
  std::string text = "Bk*z^" + std::to_string(k);
  for (int m = 1; m <= k + 1; ++m) {
    if (m == k) continue;
    const std::string c = "c" + std::to_string(m);
    p[c] = uniform(rng, -0.5, 0.5);
    text += " + " + c + "*z^" + std::to_string(m);
  }
  in.h0 = ScalarFamily::parse(text, p, in.eps);
  in.B = B;
  in.B_k = 0.99 * std::abs(B);
  in.B_k1 = 1.0;
  // The measured C^{k+1} norm is the fifth hypothesis.
  const auto draft = fh_hypotheses(in, FhMode::practical);
  in.B_k1 = std::max(in.B_k, 1.01 * draft[4].measured);
  in.eta = mode == FhMode::exact ? 0.9 * std::min(1.0, in.B_k) / (2.0 * ck_constant(k, in.B_k1)) : 1e-3;
  p["e"] = in.eta;
  p["ph"] = uniform(rng, 0.0, 6.3);
  p["ps"] = uniform(rng, 0.0, 6.3);
  in.h = ScalarFamily::parse(text + " + 0.3*e*sin(z + ph)", p, in.eps);
  in.f = ScalarFamily::parse("z + 0.5*e + 0.1*e*sin(z + ps)", p, in.eps);
  return in;
}

Outcome fh_obstruction() {
  Rng rng(5005);
  int exact_bad = 0, practical_bad = 0, practical_total = 0;
  std::string first;
  double eta_seen = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    try {
      const FhInstance in = fh_instance(rng, 2, FhMode::exact);
      eta_seen = std::max(eta_seen, in.eta);
      const FhReport r = fh_sweep(in, 101, FhMode::exact);
      bool ok = r.sweep.size() == 101;
      for (const auto& e : r.sweep) ok = ok && e.bounds_ok && e.sign_ok;
      if (!ok) ++exact_bad;
    } catch (const std::exception& e) {
      ++exact_bad;
      if (first.empty()) first = e.what();
    }
  }
  for (int k : {2, 3, 4}) {
    for (int trial = 0; trial < 30; ++trial) {
      ++practical_total;
      try {
        const FhInstance in = fh_instance(rng, k, FhMode::practical);
        const FhReport r = fh_sweep(in, 101, FhMode::practical);
        bool ok = r.sweep.size() == 101;
        for (const auto& e : r.sweep) ok = ok && e.sign_ok;
        if (!ok) ++practical_bad;
      } catch (const std::exception& e) {
        ++practical_bad;
        if (first.empty()) first = e.what();
      }
    }
  }
  return {exact_bad == 0 && practical_bad == 0,
          fmt("exact k=2: 50 instances x 101 points, max eta %.2e, %d violations; practical k=2..4 eta=1e-3: %d "
              "instances x 101 points, %d violations%s",
              eta_seen, exact_bad, practical_total, practical_bad, first.empty() ? "" : ("; " + first).c_str())};
}

// 6 --------------------------------------------------------------------------

ActionSpec dance(const std::string& phi, double eps = 0.5) {
  const auto c = ScalarFamily::parse("cos(" + phi + ")", {}, eps);
  const auto s = ScalarFamily::parse("sin(" + phi + ")", {}, eps);
  const auto ms = ScalarFamily::parse("-sin(" + phi + ")", {}, eps);
  ActionSpec spec;
  spec.n = 2;
  spec.eps = eps;
  spec.A = MatrixFamily(2, {c, s, ms, c}, eps);
  return spec;
}

Outcome stability_fixtures() {
  struct Case {
    const char* phi;
    int k;
    bool holds;
  };
  const Case cases[] = {{"2*pi*z", 1, false},
                        {"cos(2*pi*z)", 1, true},
                        {"cos(2*pi*z)", 2, false},
                        {"cos(2*pi*(z+0.25))^3", 2, true},
                        {"cos(2*pi*(z+0.25))^3", 3, false}};
  bool ok = true;
  std::string verdicts;
  for (const auto& c : cases) {
    const ActionSpec s = dance(c.phi);
    const bool primal = condition1_check(s, c.k).condition1_holds;
    const bool dual = condition1_dual_check(s, c.k).condition1_holds;
    ok = ok && primal == c.holds && dual == primal;
    verdicts += fmt(" %s@k=%d:%s/%s", c.phi, c.k, primal ? "holds" : "fails", dual ? "holds" : "fails");
  }
  return {ok, "primal/dual" + verdicts};
}

// 7 --------------------------------------------------------------------------

Outcome perturbation_builder() {
  const double delta = 0.1;
  const ActionSpec s = dance("cos(2*pi*z)");
  const PerturbedAction p = build_perturbation(s, 1, delta);
  const double residual = commutator_residual(p, 1001);

  Rng rng(7007);
  int outside_bad = 0;
  for (int i = 0; i < 1000; ++i) {
    double z = uniform(rng, delta, s.eps);
    if (z >= s.eps) z = delta;
    if (i % 2) z = -z;
    const bool same = (p.result.A.value(z) - s.A.value(z)).cwiseAbs().maxCoeff() == 0.0 &&
                      p.result.vertical(z).cwiseAbs().maxCoeff() == 0.0;
    if (!same) ++outside_bad;
  }
  const double distance = p.blend_distance + p.beta_norm;

  std::atomic<int> noncompact{0};
  parallel_for(100, [&](std::size_t i) {
    const double z0 = -p.eta_blend / 4 + (static_cast<double>(i) + 1.0) * (p.eta_blend / 2) / 101.0;
    const OrbitVerdict v = classify_orbit(p.result, z0);
    if (v.status == OrbitStatus::noncompact && v.drift_witness) ++noncompact;
  });
  const bool ok = residual <= 1e-9 && outside_bad == 0 && distance < delta && noncompact == 100;
  return {ok, fmt("residual %.2e, %d/1000 outside samples differ, C^1 distance %.4f < %.1f, %d/100 base points "
                  "noncompact with witness",
                  residual, outside_bad, distance, delta, noncompact.load())};
}

// 8 --------------------------------------------------------------------------

Outcome rotation_numbers() {
  const long N = 100000;
  const auto rigid = rotation_number([](double x) { return x + 0.375; }, N);
  const double rigid_err = std::abs(rigid.estimate - 0.375);
  const double tp = 2.0 * std::numbers::pi;
  const Lift F = [tp](double x) { return x + 0.3 + 0.05 * std::sin(tp * x); };
  double lo = 1e300, hi = -1e300;
  for (double x : {0.0, 0.37, 0.81}) {
    const double r = rotation_number(F, N, x).estimate;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  const bool ok = rigid_err <= 1.0 / N && hi - lo <= 1e-5;
  return {ok, fmt("rigid error %.2e (limit %.0e), nonlinear spread %.2e over 3 base points", rigid_err, 1.0 / N,
                  hi - lo)};
}

// 9 --------------------------------------------------------------------------

Outcome quasi_ap_iterates() {
  Rng rng(9009);
  int bad = 0, hyp_bad = 0;
  std::string first;
  for (int trial = 0; trial < 500; ++trial) {
    const int k = uniform_int(rng, 2, 8);
    const int r = uniform_int(rng, 1, 4);
    const double kr = static_cast<double>(k * r);
    const double eta = uniform(rng, 0.2, 1.0) * std::min(1.0 / (kr * kr), 0.24 / kr);
    const double a = eta * uniform(rng, 0.2, 0.5);
    const Params p{{"a", a},
                   {"b", a * uniform(rng, -0.9, 0.9)},
                   {"w", uniform(rng, 0.1, 2.0)},
                   {"ph", uniform(rng, 0.0, 6.3)}};
    const double eps = 0.5;
    const auto f = ScalarFamily::parse("z + a + b*sin(w*z + ph)", p, eps);
    const double c = uniform(rng, -0.45, 0.0);
    try {
      const double dist = ck_norm(jet_minus_identity(jet_fn(f)), {-0.49, 0.49}, 1);
      if (!(dist < eta) || !(f(c) > c)) {
        ++hyp_bad;
        continue;
      }
      std::vector<double> x{c};
      double z = c;
      for (int j = 1; j <= k; ++j) {
        for (int s = 0; s < r; ++s) z = f(z);
        x.push_back(z);
      }
      if (!is_quasi_ap(Grid(x), kr * eta)) ++bad;
    } catch (const std::exception& e) {
      ++bad;
      if (first.empty()) first = e.what();
    }
  }
  return {bad == 0 && hyp_bad == 0, fmt("500 instances k in [2,8], r in [1,4], %d violations, %d inadmissible%s", bad,
                                        hyp_bad, first.empty() ? "" : ("; " + first).c_str())};
}

// 10 -------------------------------------------------------------------------

std::pair<int, std::string> invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = tools::run(args, out, err);
  return {code, out.str()};
}

Outcome determinism() {
  const auto dir = std::filesystem::temp_directory_path() / ("orbitforge_acceptance_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  auto path = [&](const char* name) { return (dir / name).string(); };
  std::string first_run_examples = invoke({"examples", "-o", dir.string()}).second;
  {
    std::ofstream(dir / "lag.json") << R"({"check": "lagrange", "nodes": [0, 1, 2.1, 3], "eps": 0.2})";
    std::ofstream(dir / "lift.json") << R"j({"lift": "z + 0.3 + 0.05*sin(2*pi*z)"})j";
  }
  const std::vector<std::vector<std::string>> runs = {
      {"divdiff", "--seed", "42", "--k", "6"},
      {"fh-verify", "-i", path("translation.json")},
      {"bounds", "-i", path("lag.json"), "--seed", "42"},
      {"stability", "-i", path("dance_cos3.json"), "--k", "2"},
      {"perturb", "-i", path("dance_cos.json"), "--k", "1", "--delta", "0.1"},
      {"orbit", "-i", path("dance_cos.json"), "--z0", "0.05"},
      {"orbit", "-i", path("lift.json"), "--what", "rotation", "--iters", "10000"},
      {"examples", "-o", path("again")},
  };
  int differing = 0;
  std::string names;
  const char* saved = std::getenv("ORBITFORGE_THREADS");
  const std::string saved_value = saved ? saved : "";
  for (const auto& args : runs) {
    const auto a = invoke(args);
    const auto b = invoke(args);
    // A single-threaded run must match as well.
    ::setenv("ORBITFORGE_THREADS", "1", 1);
    const auto c = invoke(args);
    if (saved) ::setenv("ORBITFORGE_THREADS", saved_value.c_str(), 1);
    else ::unsetenv("ORBITFORGE_THREADS");
    if (a != b || a != c || a.second.empty()) {
      ++differing;
      names += " " + args[0];
    }
  }
  if (invoke({"examples", "-o", dir.string()}).second != first_run_examples) ++differing;
  std::filesystem::remove_all(dir);
  return {differing == 0, fmt("%zu subcommand invocations x 3 runs (incl. 1 thread), %d differing%s", runs.size(),
                              differing, names.c_str())};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget;  // seconds
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "divided-difference oracle equivalence", 5.0, divided_difference_routes},
      {2, "polynomial exactness", 5.0, polynomial_exactness},
      {3, "Faa di Bruno vs jet composition", 10.0, faa_di_bruno_vs_jets},
      {4, "composition bound for h o f^j", 60.0, composition_bound},
      {5, "divided-difference obstruction sweep", 120.0, fh_obstruction},
      {6, "stability fixtures", 1.0, stability_fixtures},
      {7, "perturbation builder", 30.0, perturbation_builder},
      {8, "rotation numbers", 5.0, rotation_numbers},
      {9, "quasi-AP iterates", 10.0, quasi_ap_iterates},
      {10, "determinism", 0.0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double t = seconds_since(t0);
    const bool in_time = c.budget <= 0.0 || t < c.budget;
    const bool pass = o.ok && in_time;
    if (!pass) ++failed;
    std::cout << (pass ? "PASS" : "FAIL") << " " << c.id << " " << c.name << ": " << o.detail
              << fmt(" [%.2f s", t) << (c.budget > 0.0 ? fmt(" / %.0f s]", c.budget) : std::string("]"))
              << (in_time ? "" : " over budget") << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : fmt("%d criteria failed", failed)) << std::endl;
  return failed == 0 ? 0 : 1;
}
