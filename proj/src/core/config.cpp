#include "sohb/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "sohb/errors.hpp"
#include "sohb_schemas.hpp"

namespace sohb {

using nlohmann::json;

SchemaValidator::SchemaValidator(json schema) : schema_(std::move(schema)) {}

void SchemaValidator::validate(json& instance) const { check(schema_, instance, ""); }

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

bool has_type(const json& v, const std::string& type) {
    if (type == "object") return v.is_object();
    if (type == "array") return v.is_array();
    if (type == "string") return v.is_string();
    if (type == "boolean") return v.is_boolean();
    if (type == "integer") return v.is_number_integer();
    if (type == "number") return v.is_number();
    if (type == "null") return v.is_null();
    return false;
}

std::string where(const std::string& path) { return path.empty() ? "(root)" : path; }

}  // namespace

void SchemaValidator::check(const json& schema, json& value, const std::string& path) const {
    if (auto it = schema.find("type"); it != schema.end()) {
        bool ok = false;
        if (it->is_array()) {
            for (const auto& t : *it) ok = ok || has_type(value, t.get<std::string>());
        } else {
            ok = has_type(value, it->get<std::string>());
        }
        if (!ok) throw SchemaError(where(path), "expected type " + it->dump());
    }
    if (auto it = schema.find("enum"); it != schema.end()) {
        if (std::find(it->begin(), it->end(), value) == it->end())
            throw SchemaError(where(path), "value " + value.dump() + " not in " + it->dump());
    }
    if (value.is_number()) {
        const double x = value.get<double>();
        if (auto it = schema.find("minimum"); it != schema.end() && x < it->get<double>())
            throw SchemaError(where(path), "must be >= " + it->dump());
        if (auto it = schema.find("maximum"); it != schema.end() && x > it->get<double>())
            throw SchemaError(where(path), "must be <= " + it->dump());
        if (auto it = schema.find("exclusiveMinimum"); it != schema.end() && !(x > it->get<double>()))
            throw SchemaError(where(path), "must be > " + it->dump());
        if (auto it = schema.find("exclusiveMaximum"); it != schema.end() && !(x < it->get<double>()))
            throw SchemaError(where(path), "must be < " + it->dump());
    }
    if (value.is_array()) {
        if (auto it = schema.find("minItems"); it != schema.end() && value.size() < it->get<std::size_t>())
            throw SchemaError(where(path), "needs at least " + it->dump() + " items");
        if (auto it = schema.find("maxItems"); it != schema.end() && value.size() > it->get<std::size_t>())
            throw SchemaError(where(path), "allows at most " + it->dump() + " items");
        if (auto it = schema.find("items"); it != schema.end())
            for (std::size_t i = 0; i < value.size(); ++i)
                check(*it, value[i], where(path) + "[" + std::to_string(i) + "]");
    }
    if (value.is_object()) {
        const json empty = json::object();
        const auto pit = schema.find("properties");
        const json& props = pit != schema.end() ? *pit : empty;
        if (auto it = schema.find("required"); it != schema.end())
            for (const auto& key : *it)
                if (!value.contains(key.get<std::string>()))
                    throw SchemaError(join(path, key.get<std::string>()), "required property missing");
        const auto ait = schema.find("additionalProperties");
        const bool strict = ait != schema.end() && ait->is_boolean() && !ait->get<bool>();
        for (auto& [key, sub] : value.items()) {
            if (props.contains(key))
                check(props.at(key), sub, join(path, key));
            else if (strict)
                throw SchemaError(join(path, key), "unknown property");
        }
        for (const auto& [key, sub] : props.items()) {
            if (value.contains(key) || !sub.contains("default")) continue;
            value[key] = sub.at("default");
            check(sub, value[key], join(path, key));
        }
    }
}

const std::string& run_config_schema_text() {
    static const std::string text(embedded::run_config_schema);
    return text;
}

const std::string& metadata_schema_text() {
    static const std::string text(embedded::metadata_schema);
    return text;
}

const SchemaValidator& run_config_validator() {
    static const SchemaValidator v(json::parse(run_config_schema_text()));
    return v;
}

const SchemaValidator& metadata_validator() {
    static const SchemaValidator v(json::parse(metadata_schema_text()));
    return v;
}

const char* to_string(RunMode m) {
    switch (m) {
        case RunMode::Simulate: return "simulate";
        case RunMode::Single: return "single";
        case RunMode::Constants: return "constants";
        case RunMode::Gci: return "gci";
        case RunMode::Macro: return "macro";
        case RunMode::Validate: return "validate";
    }
    return "?";
}

Model parse_model(const std::string& s) {
    if (s == "gradual") return Model::Gradual;
    if (s == "jump") return Model::Jump;
    throw InvalidArgument("unknown model '" + s + "'");
}

Representation parse_representation(const std::string& s) {
    if (s == "matrix") return Representation::Matrix;
    if (s == "quaternion") return Representation::Quaternion;
    throw InvalidArgument("unknown representation '" + s + "'");
}

namespace {

RunMode parse_mode(const std::string& s) {
    for (RunMode m : {RunMode::Simulate, RunMode::Single, RunMode::Constants, RunMode::Gci, RunMode::Macro,
                      RunMode::Validate})
        if (s == to_string(m)) return m;
    throw InvalidArgument("unknown mode '" + s + "'");
}

Vec3 vec3(const json& a) { return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()}; }

}  // namespace

RunConfig config_from_json(json doc, std::optional<std::uint64_t> seed_override) {
    if (!doc.is_object()) throw SchemaError("(root)", "configuration must be a JSON object");
    if (seed_override) doc["seed"] = *seed_override;
    run_config_validator().validate(doc);
    const std::uint64_t seed = doc["seed"].get<std::uint64_t>();
    auto& init = doc["init"];
    if (!init.contains("position_seed")) init["position_seed"] = seed;
    if (!init.contains("orientation_seed")) init["orientation_seed"] = seed;

    RunConfig c;
    c.mode = parse_mode(doc["mode"].get<std::string>());
    c.sim.N = doc["N"].get<std::size_t>();
    c.sim.D = doc["D"].get<double>();
    c.sim.model = parse_model(doc["model"].get<std::string>());
    c.sim.representation = parse_representation(doc["representation"].get<std::string>());
    c.sim.dt = doc["dt"].get<double>();
    c.sim.seed = seed;
    c.sim.box.lengths = vec3(doc["box"]);
    c.sim.radius = doc["radius"].get<double>();
    c.sim.kernel = doc["kernel"] == "indicator" ? KernelShape::Indicator : KernelShape::SmoothBump;
    c.sim.threads = doc["threads"].get<unsigned>();
    c.sim.tolerance.det_min = doc["tolerance"]["det_min"].get<double>();
    c.sim.tolerance.gap_min = doc["tolerance"]["gap_min"].get<double>();
    c.t_end = doc["t_end"].get<double>();
    c.save_every = doc["save_every"].get<std::uint64_t>();
    c.replicas = doc["replicas"].get<std::uint64_t>();

    const std::string orient = init["orientation"].get<std::string>();
    c.init.orientation = orient == "aligned"   ? InitOrientation::Aligned
                         : orient == "uniform" ? InitOrientation::Uniform
                                               : InitOrientation::VonMises;
    c.init.spread_D = init["spread_D"].get<double>();
    c.init.position_seed = init["position_seed"].get<std::uint64_t>();
    c.init.orientation_seed = init["orientation_seed"].get<std::uint64_t>();

    const auto& f = doc["single"]["field"];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) c.single_field(i, j) = f[3 * i + j].get<double>();
    if (rotation_defect(c.single_field) > 1e-9) throw SchemaError("single.field", "not a rotation matrix");

    for (const auto& d : doc["gci"]["D_values"]) c.gci_D.push_back(d.get<double>());
    for (const auto& m : doc["gci"]["models"]) c.gci_models.push_back(parse_model(m.get<std::string>()));

    const auto& m = doc["macro"];
    for (int a = 0; a < 3; ++a) c.macro.n[a] = m["n"][a].get<int>();
    c.macro.length = vec3(m["length"]);
    c.macro.steps = m["steps"].get<std::uint64_t>();
    c.macro.sigma = m["sigma"].get<double>();
    c.macro.nu = m["nu"].get<double>();
    c.macro.amplitude = m["amplitude"].get<double>();
    c.macro.rho_amplitude = m["rho_amplitude"].get<double>();
    c.macro.save_every = m["save_every"].get<std::uint64_t>();

    c.output_dir = doc["output"]["dir"].get<std::string>();
    c.output_prefix = doc["output"]["prefix"].get<std::string>();
    c.resolved = std::move(doc);
    return c;
}

RunConfig parse_config(const std::string& text, std::optional<std::uint64_t> seed_override) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    return config_from_json(std::move(doc), seed_override);
}

RunConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), seed_override);
}

}  // namespace sohb
