#pragma once

// JSON forms of run configurations, symmetry records, run reports and manifests.

#include "symlearn/learner.hpp"
#include "symlearn/statelib.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace symlearn {

using Json = nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kRecordVersion = 1;

struct RunConfig {
  StateSpec state = StateSpec::ghz(3);
  LearnerConfig learner = default_learner_config({3, 0, EntanglerFamily::nearest_neighbor});
  std::optional<std::uint64_t> seed;
  std::string output_dir = "symlearn_out";
};

// Missing keys take defaults; unknown keys are rejected with ArgumentError.
Json to_json(const StateSpec& s);
StateSpec state_spec_from_json(const Json& j);
Json to_json(const CircuitSpec& s);
CircuitSpec circuit_spec_from_json(const Json& j);
Json to_json(const MeasurementBasis& b);
MeasurementBasis basis_from_json(const Json& j);
Json to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const Json& j);

RunConfig default_run_config();
RunConfig load_run_config(const std::string& path);

Json record_to_json(const SymmetryRecord& rec, const StateSpec& state);
struct LoadedRecord {
  SymmetryRecord record;
  std::optional<StateSpec> state;
};
LoadedRecord record_from_json(const Json& j);
LoadedRecord load_record(const std::string& path);

Json report_to_json(const LearnReport& report);

// FNV-1a over the canonical (sorted-key) dump.
std::uint64_t config_hash(const Json& j);
std::string hex64(std::uint64_t v);

// Writes text to path via a temporary file and rename.
void write_text_atomic(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace symlearn
