#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sohb/micro.hpp"

namespace sohb {

/// Validator for the subset of JSON Schema used by the published schemas:
/// type, properties, additionalProperties (boolean), required, enum,
/// minimum/maximum and their exclusive forms, items, minItems, maxItems and
/// default. Defaults of absent properties are filled in place.
class SchemaValidator {
public:
    explicit SchemaValidator(nlohmann::json schema);
    /// Throws SchemaError naming the offending path ("D", "macro.n[1]").
    void validate(nlohmann::json& instance) const;

private:
    void check(const nlohmann::json& schema, nlohmann::json& value, const std::string& path) const;
    nlohmann::json schema_;
};

const std::string& run_config_schema_text();
const std::string& metadata_schema_text();
const SchemaValidator& run_config_validator();
const SchemaValidator& metadata_validator();

struct MacroConfig {
    std::array<int, 3> n{64, 1, 1};
    Vec3 length = Vec3::Ones();
    std::uint64_t steps = 200;
    double sigma = 0.2;
    double nu = 0.5;
    double amplitude = 0.3;
    double rho_amplitude = 0.3;
    std::uint64_t save_every = 50;
};

enum class RunMode { Simulate, Single, Constants, Gci, Macro, Validate };
const char* to_string(RunMode m);

/// A validated configuration with every default resolved.
struct RunConfig {
    RunMode mode = RunMode::Simulate;
    SimParams sim;
    double t_end = 1.0;
    std::uint64_t save_every = 10;
    std::uint64_t replicas = 1;
    InitSpec init;
    Mat3 single_field = Mat3::Identity();
    std::vector<double> gci_D;
    std::vector<Model> gci_models;
    MacroConfig macro;
    std::string output_dir = "out";
    std::string output_prefix = "run";
    /// The resolved document, echoed into run metadata.
    nlohmann::json resolved;
};

/// Validates `doc` (after applying `seed_override`), fills defaults and
/// derives the typed view. Seeds for positions and orientations default to
/// the run seed.
RunConfig config_from_json(nlohmann::json doc, std::optional<std::uint64_t> seed_override = std::nullopt);
/// Throws ParseError on malformed JSON text.
RunConfig parse_config(const std::string& text, std::optional<std::uint64_t> seed_override = std::nullopt);
/// Throws IoError if the file cannot be read.
RunConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override = std::nullopt);

Model parse_model(const std::string& s);
Representation parse_representation(const std::string& s);

}  // namespace sohb
