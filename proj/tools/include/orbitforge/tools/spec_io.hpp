#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>

#include "orbitforge/action.hpp"
#include "orbitforge/divdiff.hpp"
#include "orbitforge/faa.hpp"
#include "orbitforge/fhverify.hpp"
#include "orbitforge/orbitsim.hpp"

namespace orbitforge::tools {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Unreadable file, malformed JSON or a missing field.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Action-spec schema:
///   { "n": int, "k": int, "eps": real, "A": [[expr]], "aZ": [expr],
///     "params": {name: real} }
/// "eps" may be omitted (unbounded domain); "aZ" may be omitted (zero).
ActionSpec action_from_json(const json& j);
json action_to_json(const ActionSpec& spec);

/// Instance schema for the divided-difference sign estimate:
///   { "k", "eps", "h0", "h", "f", "eta", "B", "B_k", "B_k1", "params",
///     "mode": "exact" | "practical" (optional) }
FhInstance fh_from_json(const json& j, FhMode* mode = nullptr);
json fh_to_json(const FhInstance& inst, FhMode mode);

json to_json(const StabilityReport& rep);
json to_json(const FhReport& rep);
json to_json(const CompositionBoundReport& rep);
json to_json(const OrbitVerdict& v);
json to_json(const PerturbedAction& p);
json vector_to_json(const Eigen::VectorXd& v);

/// Serialised with sorted keys and two-space indentation, newline-terminated.
std::string dump(const json& j);

/// Rotation dance family: a11 = a22 = cos(phi), a12 = -a21 = sin(phi).
ActionSpec dance_spec(const std::string& phi, int k, double eps = 0.5);
/// f = z + delta, h = h0 = z^k / k! with the largest admissible eta.
FhInstance translation_instance(int k = 2);

}  // namespace orbitforge::tools
