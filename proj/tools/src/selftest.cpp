#include <cmath>
#include <functional>
#include <ostream>
#include <random>

#include "orbitforge/errors.hpp"
#include "orbitforge/tools/cli.hpp"
#include "orbitforge/tools/spec_io.hpp"

namespace orbitforge::tools {

namespace {

struct Suite {
  json checks = json::array();
  bool ok = true;

  void check(const std::string& name, const std::function<bool()>& body) {
    bool pass = false;
    std::string detail;
    try {
      pass = body();
    } catch (const std::exception& e) {
      detail = e.what();
    }
    ok = ok && pass;
    json c = {{"name", name}, {"ok", pass}};
    if (!detail.empty()) c["error"] = detail;
    checks.push_back(c);
  }
};

void divdiff_suite(Suite& s) {
  s.check("three routes agree on seeded instances", [] {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> gap(1e-3, 1.0);
    std::uniform_real_distribution<double> val(-10.0, 10.0);
    for (int t = 0; t < 50; ++t) {
      const int k = 1 + t % 8;
      std::vector<double> x;
      std::vector<double> y;
      double cur = 0.0;
      for (int i = 0; i <= k; ++i) {
        x.push_back(cur);
        cur += gap(rng);
        y.push_back(val(rng));
      }
      const Grid g(x);
      const auto u = dd_weights(g);
      double scale = 0.0;
      for (int i = 0; i <= k; ++i) scale += std::abs(u[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)]);
      const double a = dd_recursive(g, y).leading();
      const double b = dd_weighted(g, y);
      const double c = dd_vandermonde(g, y);
      if (std::abs(a - b) > 1e-9 * scale || std::abs(a - c) > 1e-9 * scale) return false;
    }
    return true;
  });
  s.check("monic degree-k polynomial has leading difference 1", [] {
    const Grid g({-1.0, -0.3, 0.2, 0.9});
    std::vector<double> y;
    for (double x : g.nodes()) y.push_back(x * x * x - 2.0 * x + 1.0);
    return std::abs(dd_recursive(g, y).leading() - 1.0) < 1e-12;
  });
  s.check("k = 1 weights are -1 and 1 on unit spacing", [] {
    const auto u = dd_weights(Grid({0.0, 1.0}));
    return u[0] == -1.0 && u[1] == 1.0;
  });
}

void fh_suite(Suite& s) {
  s.check("translation instance passes in exact mode", [] {
    return fh_sweep(translation_instance(2), 11, FhMode::exact).passed();
  });
  s.check("practical mode keeps the sign of B", [] {
    FhInstance in = translation_instance(3);
    in.eta = 1e-3;
    in.f = ScalarFamily::parse("z + 0.0005", {}, in.eps);
    return fh_sweep(in, 11, FhMode::practical).sign_ok;
  });
}

void bounds_suite(Suite& s) {
  s.check("power inequality on small a", [] {
    for (int m = 1; m <= 8; ++m) {
      if (!power_inequality_holds(1e-3, m)) return false;
    }
    return true;
  });
  s.check("composition bound on a translation", [] {
    const int k = 2;
    const double eta = 0.5 * tildehj_eta_limit(k);
    const auto h0 = ScalarFamily::parse("z^2/2 + z/3");
    const auto f = ScalarFamily::parse("z + a", {{"a", 0.5 * eta}});
    BoundCheckOptions opts;
    opts.interval = {-0.25, 0.25};
    return tildehj_check(h0, h0, f, k, 2, eta, 1.0, opts).satisfied;
  });
  s.check("Lagrange bound on an arithmetic progression", [] {
    return check_lagrange_bound(Grid({0.0, 1.0, 2.0, 3.0, 4.0}), 0.1, 3, 50).satisfied;
  });
  s.check("quasi-AP accepts an AP and rejects a stretched grid", [] {
    return is_quasi_ap(Grid({0.0, 1.0, 2.0, 3.0}), 0.1) && !is_quasi_ap(Grid({0.0, 1.0, 2.5, 3.5}), 0.1);
  });
}

void stability_suite(Suite& s) {
  auto verdict = [](const char* phi, int k) {
    const ActionSpec spec = dance_spec(phi, k);
    const bool p = condition1_check(spec, k).condition1_holds;
    const bool d = condition1_dual_check(spec, k).condition1_holds;
    if (p != d) throw Error(Errc::param, "primal and dual disagree");
    return p;
  };
  s.check("2 pi z fails at k = 1", [&] { return !verdict("2*pi*z", 1); });
  s.check("cos 2 pi z holds at k = 1, fails at k = 2",
          [&] { return verdict("cos(2*pi*z)", 1) && !verdict("cos(2*pi*z)", 2); });
  s.check("cos^3 holds at k = 2, fails at k = 3", [&] {
    return verdict("cos(2*pi*(z+0.25))^3", 2) && !verdict("cos(2*pi*(z+0.25))^3", 3);
  });
}

void perturb_suite(Suite& s) {
  s.check("builder output commutes and stays delta-close", [] {
    const auto p = build_perturbation(dance_spec("cos(2*pi*z)", 1), 1, 0.1);
    return commutator_residual(p, 201) <= 1e-9 && p.blend_distance < 0.1 && p.result.perturbed();
  });
  s.check("builder refuses a stable spec", [] {
    try {
      build_perturbation(dance_spec("2*pi*z", 1), 1, 0.1);
    } catch (const Error& e) {
      return e.code() == Errc::condition1_fails;
    }
    return false;
  });
}

void orbit_suite(Suite& s) {
  s.check("rigid rotation number", [] {
    const auto r = rotation_number([](double x) { return x + 0.375; }, 1000);
    return std::abs(r.estimate - 0.375) <= r.error_bound;
  });
  s.check("unperturbed dance orbits are compact", [] {
    return classify_orbit(dance_spec("cos(2*pi*z)", 1), 0.1).status == OrbitStatus::compact;
  });
}

void examples_suite(Suite& s) {
  s.check("fixture specs round-trip through JSON", [] {
    for (const char* phi : {"2*pi*z", "cos(2*pi*z)", "cos(2*pi*(z+0.25))^3"}) {
      const json a = action_to_json(dance_spec(phi, 1));
      if (action_to_json(action_from_json(a)) != a) return false;
    }
    const json t = fh_to_json(translation_instance(2), FhMode::exact);
    return fh_to_json(fh_from_json(t), FhMode::exact) == t;
  });
}

}  // namespace

bool selftest(const std::string& subcommand, std::ostream& out) {
  Suite s;
  if (subcommand == "divdiff") divdiff_suite(s);
  else if (subcommand == "fh-verify") fh_suite(s);
  else if (subcommand == "bounds") bounds_suite(s);
  else if (subcommand == "stability") stability_suite(s);
  else if (subcommand == "perturb") perturb_suite(s);
  else if (subcommand == "orbit") orbit_suite(s);
  else if (subcommand == "examples") examples_suite(s);
  else s.check("known subcommand", [] { return false; });

  json j;
  j["schema"] = kSchemaVersion;
  j["selftest"] = subcommand;
  j["checks"] = s.checks;
  j["passed"] = s.ok;
  out << dump(j);
  return s.ok;
}

}  // namespace orbitforge::tools
