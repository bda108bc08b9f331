#pragma once

// JSON forms of the library types and a byte-stable writer.
//
// Operators: {"systems": [{"label", "dim"}], "matrix": [[[re, im], ...], ...]}
// Maps add "inputs", "outputs" (label lists), "normalization"
// ("standard" | "paper") and optionally "kraus" and "teeth".
// Processes add "parties": [{"name", "input", "output", "owner"}] where
// input/output is a label, a label list, or null.

#include <cstdint>
#include <string>

#include "causalproc/choi.hpp"
#include "causalproc/locc.hpp"
#include "causalproc/network.hpp"
#include "causalproc/optimizer.hpp"
#include "causalproc/process.hpp"
#include "json.hpp"

namespace causalproc {

using Json = nlohmann::ordered_json;

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json operator_to_json(const LabeledOperator& op);
LabeledOperator operator_from_json(const Json& j);

Json map_to_json(const QuantumMap& m);
QuantumMap map_from_json(const Json& j);

Json party_to_json(const Party& p);
Json process_to_json(const ProcessOperator& w);
/// Party systems take their dimensions from the operator.
ProcessOperator process_from_json(const Json& j);

Json network_to_json(const NetworkSpec& net);
NetworkSpec network_from_json(const Json& j);

Json config_to_json(const OptimizerConfig& cfg);
/// Missing fields keep their defaults; unknown fields are rejected.
OptimizerConfig config_from_json(const Json& j);

Json report_to_json(const ValidityReport& r);
Json result_to_json(const OptimizationResult& r);
Json probe_to_json(const ProbeReport& r);

/// Objects indented by two spaces, arrays without objects on one line,
/// doubles printed with "%.17g" (non-finite values as null).
std::string dump_deterministic(const Json& j);

/// Parses a file; malformed content throws Error naming the file.
Json read_json_file(const std::string& path);

std::uint64_t fnv1a64(const std::string& bytes);
/// FNV-1a of the deterministic serialization.
std::uint64_t spec_hash(const NetworkSpec& net);

}  // namespace causalproc
