#include "orbitforge/tools/spec_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "orbitforge/errors.hpp"

namespace orbitforge::tools {

namespace {

template <class T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw IoError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw IoError(std::string("field '") + key + "' has the wrong type");
  }
}

Params params_from_json(const json& j) {
  Params p;
  if (!j.contains("params")) return p;
  if (!j.at("params").is_object()) throw IoError("field 'params' must be an object");
  for (const auto& [name, value] : j.at("params").items()) {
    if (!value.is_number()) throw IoError("parameter '" + name + "' must be a number");
    p.emplace(name, value.get<double>());
  }
  return p;
}

json params_to_json(const Params& p) {
  json j = json::object();
  for (const auto& [name, value] : p) j[name] = value;
  return j;
}

double eps_from_json(const json& j) {
  if (!j.contains("eps") || j.at("eps").is_null()) return ScalarFamily::kUnbounded;
  const double eps = field<double>(j, "eps");
  if (!(eps > 0.0)) throw IoError("field 'eps' must be positive");
  return eps;
}

ScalarFamily family(const json& j, const char* key, const Params& params, double eps) {
  return ScalarFamily::parse(field<std::string>(j, key), params, eps);
}

const char* mode_name(FhMode m) { return m == FhMode::exact ? "exact" : "practical"; }

}  // namespace

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

ActionSpec action_from_json(const json& j) {
  ActionSpec s;
  s.n = field<int>(j, "n");
  if (s.n < 1) throw IoError("field 'n' must be at least 1");
  s.k = j.contains("k") ? field<int>(j, "k") : 1;
  s.eps = eps_from_json(j);
  s.params = params_from_json(j);
  const auto rows = field<std::vector<std::vector<std::string>>>(j, "A");
  if (rows.size() != static_cast<std::size_t>(s.n)) throw IoError("'A' must have n rows");
  std::vector<ScalarFamily> entries;
  for (const auto& row : rows) {
    if (row.size() != static_cast<std::size_t>(s.n)) throw IoError("every row of 'A' must have n entries");
    for (const auto& e : row) entries.push_back(ScalarFamily::parse(e, s.params, s.eps));
  }
  s.A = MatrixFamily(s.n, std::move(entries), s.eps);
  if (j.contains("aZ")) {
    const auto az = field<std::vector<std::string>>(j, "aZ");
    if (az.size() != static_cast<std::size_t>(s.n)) throw IoError("'aZ' must have n entries");
    for (const auto& e : az) s.aZ.push_back(ScalarFamily::parse(e, s.params, s.eps));
  }
  return s;
}

json action_to_json(const ActionSpec& spec) {
  json j;
  j["n"] = spec.n;
  j["k"] = spec.k;
  if (std::isfinite(spec.eps)) j["eps"] = spec.eps;
  json rows = json::array();
  for (int r = 0; r < spec.n; ++r) {
    json row = json::array();
    for (int c = 0; c < spec.n; ++c) row.push_back(spec.A.entry(r, c).to_string());
    rows.push_back(row);
  }
  j["A"] = rows;
  if (!spec.aZ.empty()) {
    json az = json::array();
    for (const auto& a : spec.aZ) az.push_back(a.to_string());
    j["aZ"] = az;
  }
  j["params"] = params_to_json(spec.params);
  return j;
}

FhInstance fh_from_json(const json& j, FhMode* mode) {
  FhInstance in;
  in.k = field<int>(j, "k");
  in.eps = eps_from_json(j);
  const Params params = params_from_json(j);
  in.h0 = family(j, "h0", params, in.eps);
  in.h = family(j, "h", params, in.eps);
  in.f = family(j, "f", params, in.eps);
  in.eta = field<double>(j, "eta");
  in.B = field<double>(j, "B");
  in.B_k = field<double>(j, "B_k");
  in.B_k1 = field<double>(j, "B_k1");
  if (mode != nullptr) {
    *mode = FhMode::exact;
    if (j.contains("mode")) {
      const auto m = field<std::string>(j, "mode");
      if (m == "practical") {
        *mode = FhMode::practical;
      } else if (m != "exact") {
        throw IoError("field 'mode' must be \"exact\" or \"practical\"");
      }
    }
  }
  return in;
}

json fh_to_json(const FhInstance& inst, FhMode mode) {
  json j;
  j["k"] = inst.k;
  if (std::isfinite(inst.eps)) j["eps"] = inst.eps;
  j["h0"] = inst.h0.to_string();
  j["h"] = inst.h.to_string();
  j["f"] = inst.f.to_string();
  j["eta"] = inst.eta;
  j["B"] = inst.B;
  j["B_k"] = inst.B_k;
  j["B_k1"] = inst.B_k1;
  j["mode"] = mode_name(mode);
  Params all = inst.h0.params();
  for (const auto* fam : {&inst.h, &inst.f}) all.insert(fam->params().begin(), fam->params().end());
  j["params"] = params_to_json(all);
  return j;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const StabilityReport& rep) {
  json j;
  j["k"] = rep.k;
  j["stacked_rank"] = rep.stacked_rank;
  j["singular_values"] = rep.singular_values;
  j["threshold"] = rep.threshold;
  j["condition1_holds"] = rep.condition1_holds;
  if (rep.condition1_holds) {
    json basis = json::array();
    for (const auto& v : rep.kernel_basis) basis.push_back(vector_to_json(v));
    j["kernel_basis"] = basis;
    j["w_star"] = vector_to_json(rep.w_star);
  }
  return j;
}

json to_json(const FhReport& rep) {
  json j;
  j["mode"] = mode_name(rep.mode);
  j["C_k"] = rep.C_k;
  j["eta_max"] = rep.eta_max;
  j["z_points"] = std::vector<double>(rep.z_points.nodes().begin(), rep.z_points.nodes().end());
  j["dd_value"] = rep.dd_value;
  j["lower"] = rep.lower;
  j["upper"] = rep.upper;
  j["sign_ok"] = rep.sign_ok;
  j["bounds_ok"] = rep.bounds_ok;
  j["passed"] = rep.passed();
  json hyp = json::array();
  for (const auto& h : rep.hypotheses) {
    hyp.push_back({{"name", h.name}, {"measured", h.measured}, {"limit", h.limit}, {"ok", h.ok}});
  }
  j["hypotheses"] = hyp;
  json sweep = json::array();
  for (const auto& e : rep.sweep) {
    sweep.push_back(
        {{"z_tilde0", e.z_tilde0}, {"dd_value", e.dd_value}, {"bounds_ok", e.bounds_ok}, {"sign_ok", e.sign_ok}});
  }
  j["sweep"] = sweep;
  json nodes = json::array();
  for (const auto& n : rep.node_estimates) {
    nodes.push_back({{"j", n.j}, {"z", n.z}, {"deviation", n.deviation}, {"limit", n.limit}, {"ok", n.ok}});
  }
  j["node_estimates"] = nodes;
  return j;
}

json to_json(const CompositionBoundReport& rep) {
  return {{"k", rep.k},
          {"j", rep.j},
          {"eta", rep.eta},
          {"bound_constant", rep.bound_constant},
          {"measured_norm", rep.measured_norm},
          {"bound_value", rep.bound_value},
          {"satisfied", rep.satisfied}};
}

json to_json(const OrbitVerdict& v) {
  json j;
  j["status"] = std::string(status_name(v.status));
  j["iterations_used"] = v.iterations_used;
  j["rotation_numbers"] = v.rotation_numbers;
  j["note"] = v.note;
  if (v.drift_witness) {
    const auto& w = *v.drift_witness;
    j["drift_witness"] = {{"interval", {w.lo, w.hi}}, {"direction", w.direction}, {"sign", w.sign},
                          {"min_abs_c", w.min_abs_c}, {"threshold", w.threshold}, {"kind", w.kind}};
  } else {
    j["drift_witness"] = nullptr;
  }
  if (!v.last_iterates.empty()) j["last_iterates"] = v.last_iterates;
  return j;
}

json to_json(const PerturbedAction& p) {
  json j = action_to_json(p.result);
  j["provenance"] = {{"delta", p.delta},
                     {"eta_blend", p.eta_blend},
                     {"w_star", vector_to_json(p.w_star)},
                     {"bump_constant", p.beta_constant},
                     {"halvings", p.halvings},
                     {"blend_distance", p.blend_distance},
                     {"beta_norm", p.beta_norm}};
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

ActionSpec dance_spec(const std::string& phi, int k, double eps) {
  const std::string c = "cos(" + phi + ")";
  const std::string s = "sin(" + phi + ")";
  json j;
  j["n"] = 2;
  j["k"] = k;
  j["eps"] = eps;
  j["A"] = json::array({json::array({c, s}), json::array({"-" + s, c})});
  j["params"] = json::object();
  return action_from_json(j);
}

FhInstance translation_instance(int k) {
  FhInstance in;
  in.k = k;
  in.eps = 0.5;
  double kf = 1.0;
  for (int i = 2; i <= k; ++i) kf *= i;
  std::ostringstream h0;
  h0.precision(17);
  h0 << "z^" << k << "/" << kf;
  in.h0 = ScalarFamily::parse(h0.str(), {}, in.eps);
  in.h = in.h0;
  in.B = 1.0;
  in.B_k = 1.0;
  in.B_k1 = 1.0;
  in.eta = 0.9 * std::min(1.0, in.B_k) / (2.0 * ck_constant(k, in.B_k1));
  in.f = ScalarFamily(Expr::var() + Expr::constant(0.5 * in.eta), {}, in.eps);
  return in;
}

}  // namespace orbitforge::tools
