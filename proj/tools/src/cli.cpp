#include "orbitforge/tools/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <random>
#include <sstream>

#include "orbitforge/errors.hpp"
#include "orbitforge/tools/spec_io.hpp"

namespace orbitforge::tools {

namespace {

struct Flags {
  std::string input;
  std::string output;
  std::string format = "json";
  std::string what;
  std::string mode;
  int k = 0;
  double eta = 0.0;
  double delta = 0.1;
  int grid = 0;
  long iters = 0;
  std::uint64_t seed = 1;
  double rank_tol = kDefaultRankTol;
  double z0 = 0.0;
  double T = 0.0;
  int direction = 0;
  bool selftest = false;
};

// Options that were actually given on the command line.
struct Given {
  CLI::Option* k = nullptr;
  CLI::Option* eta = nullptr;
  CLI::Option* grid = nullptr;
  CLI::Option* iters = nullptr;
  CLI::Option* T = nullptr;
  bool has(CLI::Option* o) const { return o != nullptr && o->count() > 0; }
};

struct Output {
  std::string text;
  int code = kExitOk;
};

constexpr double kOracleTol = 1e-9;
constexpr double kResidualTol = 1e-9;

int exit_code_for(Errc c) {
  switch (c) {
    case Errc::syntax:
    case Errc::unknown_identifier:
    case Errc::param:
    case Errc::length_mismatch:
    case Errc::base_point_mismatch:
    case Errc::order_mismatch:
      return kExitUsage;
    default:
      return kExitHypothesis;
  }
}

json with_schema(json j) {
  j["schema"] = kSchemaVersion;
  return j;
}

json require_input(const Flags& f) {
  if (f.input.empty()) throw IoError("--input is required");
  return read_json_file(f.input);
}

Params params_of(const json& in) {
  Params p;
  if (in.contains("params")) {
    for (const auto& [name, v] : in.at("params").items()) p.emplace(name, v.get<double>());
  }
  return p;
}

std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------- divdiff

Output cmd_divdiff(const Flags& f, const Given& g) {
  std::vector<double> x;
  std::vector<double> y;
  if (!f.input.empty()) {
    const json in = read_json_file(f.input);
    x = in.at("x").get<std::vector<double>>();
    if (in.contains("y")) {
      y = in.at("y").get<std::vector<double>>();
    } else if (in.contains("f")) {
      const auto fam = ScalarFamily::parse(in.at("f").get<std::string>(), params_of(in));
      for (double xi : x) y.push_back(fam(xi));
    } else {
      throw IoError("divdiff input needs 'y' or 'f'");
    }
  } else {
    // Seeded random instance: sorted nodes with gaps >= 1e-3, values in [-10, 10].
    const int k = g.has(g.k) ? f.k : 4;
    if (k < 0 || k > 64) throw IoError("--k must be in [0, 64]");
    std::mt19937_64 rng(f.seed);
    std::uniform_real_distribution<double> gap(1e-3, 1.0);
    std::uniform_real_distribution<double> val(-10.0, 10.0);
    double cur = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    for (int i = 0; i <= k; ++i) {
      x.push_back(cur);
      cur += gap(rng);
      y.push_back(val(rng));
    }
  }
  if (x.size() != y.size()) throw Error(Errc::length_mismatch, "'x' and 'y' differ in length");

  const Grid grid(x);
  const DDTable table = dd_recursive(grid, y);
  const auto weights = dd_weights(grid);
  const double weighted = dd_weighted(grid, y);
  double scale = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) scale += std::abs(weights[j] * y[j]);
  scale = std::max(scale, std::numeric_limits<double>::min());

  std::vector<double> routes{table.leading(), weighted};
  json report;
  report["nodes"] = x;
  report["values"] = y;
  report["recursive"] = table.leading();
  report["weighted"] = weighted;
  if (grid.k() <= kMaxVandermondeDegree) {
    const double v = dd_vandermonde(grid, y);
    routes.push_back(v);
    report["vandermonde"] = v;
  } else {
    report["vandermonde"] = nullptr;
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < routes.size(); ++a) {
    for (std::size_t b = a + 1; b < routes.size(); ++b) worst = std::max(worst, std::abs(routes[a] - routes[b]) / scale);
  }
  report["max_relative_disagreement"] = worst;
  report["agree"] = worst <= kOracleTol;
  report["weights"] = weights;
  report["newton_coefficients"] = table.newton_coefficients();
  json cols = json::array();
  for (int m = 0; m <= grid.k(); ++m) {
    json col = json::array();
    for (int i = 0; i + m <= grid.k(); ++i) col.push_back(table.at(i, m));
    cols.push_back(col);
  }
  report["table"] = cols;

  Output o;
  o.code = worst <= kOracleTol ? kExitOk : kExitCheckFailed;
  if (f.format == "csv") {
    std::ostringstream s;
    s << "i,x,y,weight\n";
    for (std::size_t i = 0; i < x.size(); ++i) {
      s << i << ',' << csv_number(x[i]) << ',' << csv_number(y[i]) << ',' << csv_number(weights[i]) << '\n';
    }
    o.text = s.str();
  } else {
    o.text = dump(with_schema(report));
  }
  return o;
}

// ---------------------------------------------------------------- fh-verify

Output cmd_fh(const Flags& f, const Given& g) {
  FhMode mode = FhMode::exact;
  FhInstance inst = fh_from_json(require_input(f), &mode);
  if (!f.mode.empty()) mode = f.mode == "practical" ? FhMode::practical : FhMode::exact;
  if (g.has(g.eta)) inst.eta = f.eta;
  const int grid = g.has(g.grid) ? f.grid : 101;

  const FhReport rep = fh_sweep(inst, grid, mode);
  Output o;
  o.code = rep.passed() ? kExitOk : kExitCheckFailed;
  if (f.format == "csv") {
    std::ostringstream s;
    s << "z_tilde0,dd_value,bounds_ok,sign_ok\n";
    for (const auto& e : rep.sweep) {
      s << csv_number(e.z_tilde0) << ',' << csv_number(e.dd_value) << ',' << (e.bounds_ok ? 1 : 0) << ','
        << (e.sign_ok ? 1 : 0) << '\n';
    }
    o.text = s.str();
  } else {
    json j;
    j["instance"] = fh_to_json(inst, mode);
    j["report"] = to_json(rep);
    o.text = dump(with_schema(j));
  }
  return o;
}

// ---------------------------------------------------------------- bounds

Interval interval_from(const json& in) {
  if (!in.contains("interval")) return {-0.5, 0.5};
  const auto v = in.at("interval").get<std::vector<double>>();
  if (v.size() != 2 || !(v[0] < v[1])) throw IoError("'interval' must be [lo, hi] with lo < hi");
  return {v[0], v[1]};
}

std::vector<int> iterate_indices(const json& in, int k) {
  if (in.contains("j")) {
    if (in.at("j").is_array()) return in.at("j").get<std::vector<int>>();
    return {in.at("j").get<int>()};
  }
  std::vector<int> js;
  for (int j = -2 * k; j <= 2 * k; ++j) {
    if (j != 0) js.push_back(j);
  }
  return js;
}

Output cmd_bounds(const Flags& f, const Given& g) {
  const json in = require_input(f);
  std::string what = f.what;
  if (what.empty()) what = in.value("check", std::string("tildehj"));

  const Params params = params_of(in);
  const double eps = in.contains("eps") ? in.at("eps").get<double>() : ScalarFamily::kUnbounded;
  auto family = [&](const char* key) { return ScalarFamily::parse(in.at(key).get<std::string>(), params, eps); };

  json report;
  report["check"] = what;
  bool ok = true;

  if (what == "tildehj" || what == "iterate") {
    const int k = g.has(g.k) ? f.k : in.at("k").get<int>();
    const double eta = g.has(g.eta) ? f.eta : in.at("eta").get<double>();
    BoundCheckOptions opts;
    opts.interval = interval_from(in);
    const auto fmap = family("f");
    json rows = json::array();
    if (what == "tildehj") {
      const auto h0 = family("h0");
      const auto h = family("h");
      const double B_k1 = in.at("B_k1").get<double>();
      for (int j : iterate_indices(in, k)) {
        const auto r = tildehj_check(h0, h, fmap, k, j, eta, B_k1, opts);
        ok = ok && r.satisfied;
        rows.push_back(to_json(r));
      }
      report["eta_limit"] = tildehj_eta_limit(k);
    } else {
      for (int j : iterate_indices(in, k)) {
        const auto r = iterate_bound_check(fmap, k, j, eta, opts);
        ok = ok && r.satisfied;
        rows.push_back({{"j", r.j}, {"measured_norm", r.measured_norm}, {"bound_value", r.bound_value},
                        {"satisfied", r.satisfied}});
      }
    }
    report["results"] = rows;
  } else if (what == "quasi-ap") {
    std::vector<double> nodes;
    if (in.contains("nodes")) {
      nodes = in.at("nodes").get<std::vector<double>>();
    } else {
      const auto fmap = family("f");
      double z = in.value("z0", 0.0);
      const int count = in.at("count").get<int>();
      for (int i = 0; i < count; ++i) {
        nodes.push_back(z);
        z = fmap(z);
      }
    }
    const double c_ap = in.at("c_ap").get<double>();
    const Grid grid(nodes);
    ok = is_quasi_ap(grid, c_ap);
    report["nodes"] = nodes;
    report["c_ap"] = c_ap;
    report["quasi_ap"] = ok;
  } else if (what == "lagrange") {
    const Grid grid(in.at("nodes").get<std::vector<double>>());
    const double e = in.at("eps").get<double>();
    const int trials = g.has(g.iters) ? static_cast<int>(f.iters) : 200;
    const auto r = check_lagrange_bound(grid, e, f.seed, trials);
    ok = r.satisfied;
    report["bound"] = r.bound;
    report["worst_ratio"] = r.worst_ratio;
    report["trials"] = r.trials;
    report["seed"] = f.seed;
    report["satisfied"] = r.satisfied;
  } else if (what == "power") {
    const double a = in.at("a").get<double>();
    const int m = in.at("m").get<int>();
    ok = power_inequality_holds(a, m);
    report["a"] = a;
    report["m"] = m;
    report["holds"] = ok;
  } else {
    throw IoError("unknown bounds check '" + what + "'");
  }
  report["passed"] = ok;
  return {dump(with_schema(report)), ok ? kExitOk : kExitCheckFailed};
}

// ---------------------------------------------------------------- stability

Output cmd_stability(const Flags& f, const Given& g) {
  const ActionSpec spec = action_from_json(require_input(f));
  const int k = g.has(g.k) ? f.k : spec.k;
  const auto primal = condition1_check(spec, k, f.rank_tol);
  const auto dual = condition1_dual_check(spec, k, f.rank_tol);
  const bool agree = primal.condition1_holds == dual.condition1_holds;
  json j;
  j["k"] = k;
  j["rank_tol"] = f.rank_tol;
  j["primal"] = to_json(primal);
  j["dual"] = to_json(dual);
  j["agree"] = agree;
  j["condition1_holds"] = primal.condition1_holds;
  j["spec"] = action_to_json(spec);
  return {dump(with_schema(j)), agree ? kExitOk : kExitCheckFailed};
}

// ---------------------------------------------------------------- perturb

/// Largest entrywise difference between the perturbed and the original spec
/// at `samples` points of the domain outside (-delta, delta).
double outside_difference(const PerturbedAction& p, int samples) {
  const double r = std::isfinite(p.base.eps) ? p.base.eps : 1.0;
  const double lo = p.delta;
  const double hi = r * (1.0 - 1e-9);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = lo + (hi - lo) * (static_cast<double>(i % (samples / 2 + 1)) / (samples / 2));
    const double z = i < samples / 2 ? t : -t;
    const Eigen::MatrixXd d = p.result.A.value(z) - p.base.A.value(z);
    worst = std::max(worst, d.cwiseAbs().maxCoeff());
    worst = std::max(worst, p.result.vertical(z).cwiseAbs().maxCoeff());
  }
  return worst;
}

Output cmd_perturb(const Flags& f, const Given& g) {
  const ActionSpec spec = action_from_json(require_input(f));
  const int k = g.has(g.k) ? f.k : spec.k;
  PerturbationOptions opts;
  opts.rank_tol = f.rank_tol;
  const PerturbedAction p = build_perturbation(spec, k, f.delta, opts);
  const int grid = g.has(g.grid) ? f.grid : 1001;
  const double residual = commutator_residual(p, grid);
  const double outside = outside_difference(p, 1000);

  json j = to_json(p);
  const bool residual_ok = residual <= kResidualTol;
  const bool distance_ok = p.blend_distance < f.delta;
  const bool outside_ok = outside == 0.0;
  j["checks"] = {{"commutator_residual", residual},
                 {"residual_ok", residual_ok},
                 {"ck_distance", p.blend_distance},
                 {"distance_ok", distance_ok},
                 {"outside_difference", outside},
                 {"outside_ok", outside_ok}};
  const bool ok = residual_ok && distance_ok && outside_ok;
  return {dump(with_schema(j)), ok ? kExitOk : kExitCheckFailed};
}

// ---------------------------------------------------------------- orbit

Eigen::VectorXd basis_direction(int n, int i) {
  if (i < 0 || i >= n) throw Error(Errc::param, "--direction out of range");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  v(i) = 1.0;
  return v;
}

Output cmd_orbit(const Flags& f, const Given& g) {
  const json in = require_input(f);
  const std::string what = f.what.empty() ? "classify" : f.what;
  json j;
  j["what"] = what;
  j["z0"] = f.z0;

  if (what == "rotation" && in.contains("lift")) {
    const auto lift_fam = ScalarFamily::parse(in.at("lift").get<std::string>(), params_of(in));
    const long n = g.has(g.iters) ? f.iters : 100000;
    const auto r = rotation_number([&](double x) { return lift_fam(x); }, n, f.z0);
    j["iterations"] = n;
    j["estimate"] = r.estimate;
    j["error_bound"] = r.error_bound;
    return {dump(with_schema(j)), kExitOk};
  }

  const ActionSpec spec = action_from_json(in);
  if (what == "classify") {
    ClassifyOptions opts;
    if (g.has(g.iters)) opts.budget = f.iters;
    j["verdict"] = to_json(classify_orbit(spec, f.z0, opts));
    return {dump(with_schema(j)), kExitOk};
  }
  if (what == "rotation") {
    const long n = g.has(g.iters) ? f.iters : 1000;
    const auto r = induced_rotation_number(vertical_field(spec, f.direction), vertical_field(spec, spec.n - 1), f.z0, n);
    j["iterations"] = n;
    j["estimate"] = r.estimate;
    j["error_bound"] = r.error_bound;
    j["fundamental_domains"] = r.fundamental_domains;
    j["degenerate"] = r.degenerate;
    return {dump(with_schema(j)), kExitOk};
  }
  const Eigen::VectorXd v = basis_direction(spec.n, f.direction);
  if (what == "trajectory") {
    const double T = g.has(g.T) ? f.T : 1.0;
    const int steps = g.has(g.grid) ? f.grid : 100;
    const auto rows = export_trajectory(spec, f.z0, v, T, steps);
    if (f.format == "csv") {
      std::ostringstream s;
      write_trajectory_csv(s, rows);
      return {s.str(), kExitOk};
    }
    json arr = json::array();
    for (const auto& r : rows) arr.push_back({{"t", r.t}, {"z", r.z}, {"c", r.c}});
    j["T"] = T;
    j["rows"] = arr;
    return {dump(with_schema(j)), kExitOk};
  }
  if (what == "birkhoff") {
    const double T = g.has(g.T) ? f.T : 100.0;
    const auto r = birkhoff_tau(spec, v, T, f.z0);
    j["T"] = T;
    j["estimate"] = vector_to_json(r.estimate);
    j["times"] = r.times;
    json conv = json::array();
    for (const auto& c : r.convergence) conv.push_back(vector_to_json(c));
    j["convergence"] = conv;
    return {dump(with_schema(j)), kExitOk};
  }
  throw IoError("unknown orbit mode '" + what + "'");
}

// ---------------------------------------------------------------- examples

struct Fixture {
  std::string file;
  json content;
};

std::vector<Fixture> fixtures() {
  std::vector<Fixture> out;
  auto dance = [&](const char* file, const char* phi, int k) {
    out.push_back({file, with_schema(action_to_json(dance_spec(phi, k)))});
  };
  dance("dance_2piz.json", "2*pi*z", 1);
  dance("dance_cos.json", "cos(2*pi*z)", 1);
  dance("dance_cos3.json", "cos(2*pi*(z+0.25))^3", 2);
  out.push_back({"translation.json", with_schema(fh_to_json(translation_instance(2), FhMode::exact))});
  return out;
}

Output cmd_examples(const Flags& f) {
  const std::filesystem::path dir = f.output.empty() ? std::filesystem::path(".") : std::filesystem::path(f.output);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "'");
  json files = json::array();
  for (const auto& fx : fixtures()) {
    write_text_file(dir / fx.file, dump(fx.content));
    files.push_back(fx.file);
  }
  json j;
  j["files"] = files;
  return {dump(with_schema(j)), kExitOk};
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--input,-i", f.input, "input JSON file");
  sub->add_option("--output,-o", f.output, "output file (default: stdout)");
  sub->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--seed", f.seed, "64-bit RNG seed");
  sub->add_flag("--selftest", f.selftest, "run the invariant suite and exit");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Flags f;
  Given g;
  CLI::App app{"orbitforge: numerical verifiers for homogeneous torus actions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "orbitforge 0.1.0");

  auto* dd = app.add_subcommand("divdiff", "divided-difference table, weights and oracle comparison");
  auto* fh = app.add_subcommand("fh-verify", "divided-difference sign estimate along orbit points");
  auto* bd = app.add_subcommand("bounds", "composition, iterate, quasi-AP, Lagrange and power-inequality checks");
  auto* st = app.add_subcommand("stability", "Condition 1 rank test, primal and dual");
  auto* pt = app.add_subcommand("perturb", "destabilizing perturbation builder");
  auto* ob = app.add_subcommand("orbit", "orbit classification, trajectories, rotation numbers, Birkhoff averages");
  auto* ex = app.add_subcommand("examples", "write the standard fixtures into --output (a directory)");
  for (auto* s : {dd, fh, bd, st, pt, ob, ex}) add_common(s, f);

  for (auto* s : {dd, bd, st, pt}) s->add_option("--k", f.k, "order k")->check(CLI::Range(0, 64));
  for (auto* s : {fh, bd}) s->add_option("--eta", f.eta, "eta override")->check(CLI::PositiveNumber);
  fh->add_option("--mode", f.mode, "exact or practical")->check(CLI::IsMember({"exact", "practical"}));
  for (auto* s : {fh, pt, ob}) s->add_option("--grid", f.grid, "grid size")->check(CLI::PositiveNumber);
  for (auto* s : {bd, ob}) s->add_option("--iters", f.iters, "iteration count or trials")->check(CLI::PositiveNumber);
  for (auto* s : {st, pt}) s->add_option("--rank-tol", f.rank_tol, "relative rank tolerance")->check(CLI::PositiveNumber);
  pt->add_option("--delta", f.delta, "perturbation size")->check(CLI::PositiveNumber);
  bd->add_option("--what", f.what, "tildehj, iterate, quasi-ap, lagrange or power");
  ob->add_option("--what", f.what, "classify, trajectory, rotation or birkhoff");
  ob->add_option("--z0", f.z0, "starting height");
  ob->add_option("--T", f.T, "integration time")->check(CLI::PositiveNumber);
  ob->add_option("--direction", f.direction, "horizontal basis direction index");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << "orbitforge 0.1.0\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  // Presence of overrides is looked up on the chosen subcommand.
  CLI::App* sub = app.get_subcommands().front();
  auto find = [&](const char* name) -> CLI::Option* {
    try {
      return sub->get_option(name);
    } catch (const CLI::OptionNotFound&) {
      return nullptr;
    }
  };
  g.k = find("--k");
  g.eta = find("--eta");
  g.grid = find("--grid");
  g.iters = find("--iters");
  g.T = find("--T");

  const std::string name = sub->get_name();
  if (f.selftest) {
    std::ostringstream s;
    const bool ok = selftest(name, s);
    out << s.str();
    return ok ? kExitOk : kExitCheckFailed;
  }

  try {
    Output o;
    if (name == "divdiff") o = cmd_divdiff(f, g);
    else if (name == "fh-verify") o = cmd_fh(f, g);
    else if (name == "bounds") o = cmd_bounds(f, g);
    else if (name == "stability") o = cmd_stability(f, g);
    else if (name == "perturb") o = cmd_perturb(f, g);
    else if (name == "orbit") o = cmd_orbit(f, g);
    else o = cmd_examples(f);

    if (name != "examples" && !f.output.empty()) {
      write_text_file(f.output, o.text);
    } else {
      out << o.text;
    }
    if (o.code == kExitCheckFailed) err << name << ": check failed\n";
    return o.code;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    err << "error: malformed input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const HypothesisViolation& e) {
    err << "hypothesis not established: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const Error& e) {
    err << errc_name(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace orbitforge::tools
