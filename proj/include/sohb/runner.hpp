#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "sohb/config.hpp"

namespace sohb {

/// What a run produced: every file written, in order, and the metadata
/// sidecars (one per replica for simulate/single, one otherwise).
struct RunResult {
    std::vector<std::string> outputs;
    std::vector<nlohmann::json> metadata;
    /// Only meaningful for validate mode.
    bool passed = true;
};

/// Executes `config` in its mode and writes outputs under output_dir:
///   simulate  <prefix>_r<k>.ndjson (+ _r<k>_events.ndjson for jump runs)
///   single    <prefix>_r<k>.ndjson
///   constants <prefix>_constants.csv    gci  <prefix>_gci.csv
///   macro     <prefix>_macro.csv        validate  <prefix>_validate.json
/// with a <file stem>.meta.json sidecar next to each. Replica k uses seed + k.
RunResult run(const RunConfig& config);

/// Builds and schema-checks a metadata document. Throws SchemaError.
nlohmann::json make_metadata(const RunConfig& config, const std::vector<std::string>& outputs);

/// "sohb <version>".
const char* tool_version();

}  // namespace sohb
