#pragma once

// Report envelope shared by the CLI subcommands, plus a small JSON Schema
// checker covering the subset the shipped schema uses (type, enum, required,
// properties, items, $ref into $defs). Reports are deterministic: nlohmann
// objects serialize with sorted keys, big numbers travel as decimal strings,
// and checks are merged in name order.

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "shiftlab/errors.hpp"

namespace shiftlab {

inline constexpr const char* kToolName = "shiftlab";
inline constexpr const char* kToolVersion = "0.1.0";

struct NamedCheck {
    std::string name;
    nlohmann::json body;
};

inline nlohmann::json make_report(const std::string& command, const nlohmann::json& config,
                                  std::uint64_t seed, std::vector<NamedCheck> checks) {
    std::sort(checks.begin(), checks.end(),
              [](const NamedCheck& a, const NamedCheck& b) { return a.name < b.name; });
    nlohmann::json checks_json = nlohmann::json::array();
    for (auto& c : checks) {
        nlohmann::json row = c.body;
        row["name"] = c.name;
        checks_json.push_back(std::move(row));
    }
    nlohmann::json report;
    report["tool"] = kToolName;
    report["version"] = kToolVersion;
    report["command"] = command;
    report["seed"] = std::to_string(seed);
    report["config"] = config;
    report["checks"] = std::move(checks_json);
    return report;
}

// --- Schema checking -----------------------------------------------------------

namespace detail_schema {

inline const nlohmann::json* resolve_ref(const nlohmann::json& root, const std::string& ref) {
    const std::string prefix = "#/$defs/";
    if (ref.rfind(prefix, 0) != 0) return nullptr;
    std::string key = ref.substr(prefix.size());
    if (!root.contains("$defs") || !root["$defs"].contains(key)) return nullptr;
    return &root["$defs"][key];
}

inline bool type_matches(const nlohmann::json& value, const std::string& type) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "number") return value.is_number();
    if (type == "integer") return value.is_number_integer();
    if (type == "boolean") return value.is_boolean();
    if (type == "null") return value.is_null();
    return false;
}

inline void check_value(const nlohmann::json& root, const nlohmann::json& schema,
                        const nlohmann::json& value, const std::string& path,
                        std::vector<std::string>& errors) {
    if (schema.contains("$ref")) {
        const auto* target = resolve_ref(root, schema["$ref"].get<std::string>());
        if (!target) {
            errors.push_back(path + ": unresolvable $ref " +
                             schema["$ref"].get<std::string>());
            return;
        }
        check_value(root, *target, value, path, errors);
        return;
    }
    if (schema.contains("type")) {
        std::string type = schema["type"].get<std::string>();
        if (!type_matches(value, type)) {
            errors.push_back(path + ": expected " + type + ", got " +
                             std::string(value.type_name()));
            return;
        }
    }
    if (schema.contains("enum")) {
        bool hit = false;
        for (const auto& option : schema["enum"])
            if (option == value) hit = true;
        if (!hit) errors.push_back(path + ": value " + value.dump() + " not in enum");
    }
    if (value.is_object()) {
        if (schema.contains("required"))
            for (const auto& key : schema["required"])
                if (!value.contains(key.get<std::string>()))
                    errors.push_back(path + ": missing required key '" +
                                     key.get<std::string>() + "'");
        if (schema.contains("properties"))
            for (auto it = schema["properties"].begin(); it != schema["properties"].end();
                 ++it)
                if (value.contains(it.key()))
                    check_value(root, it.value(), value.at(it.key()), path + "/" + it.key(),
                                errors);
    }
    if (value.is_array() && schema.contains("items")) {
        std::size_t i = 0;
        for (const auto& element : value)
            check_value(root, schema["items"], element, path + "/" + std::to_string(i++),
                        errors);
    }
}

}  // namespace detail_schema

// Returns the list of violations; empty means the value conforms.
inline std::vector<std::string> schema_violations(const nlohmann::json& schema,
                                                  const nlohmann::json& value) {
    std::vector<std::string> errors;
    detail_schema::check_value(schema, schema, value, "$", errors);
    return errors;
}

}  // namespace shiftlab
