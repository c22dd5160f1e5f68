#include "pheno/schema.hpp"

#include <cmath>
#include <regex>

namespace pheno {

using json = nlohmann::json;

std::string to_string(QueryKind kind) {
    switch (kind) {
        case QueryKind::tnm_staging: return "tnm_staging";
        case QueryKind::tumor_info: return "tumor_info";
        case QueryKind::grade_performance: return "grade_performance";
        case QueryKind::biomarkers: return "biomarkers";
    }
    return "biomarkers";
}

std::optional<QueryKind> query_kind_from_string(const std::string& s) {
    for (QueryKind kind : all_query_kinds())
        if (s == to_string(kind)) return kind;
    return std::nullopt;
}

const std::vector<QueryKind>& all_query_kinds() {
    static const std::vector<QueryKind> kinds = {QueryKind::tnm_staging, QueryKind::tumor_info,
                                                 QueryKind::grade_performance, QueryKind::biomarkers};
    return kinds;
}

std::string to_string(SchemaViolation::Rule rule) {
    switch (rule) {
        case SchemaViolation::Rule::missing_required: return "missing_required";
        case SchemaViolation::Rule::wrong_type: return "wrong_type";
        case SchemaViolation::Rule::enum_mismatch: return "enum_mismatch";
        case SchemaViolation::Rule::pattern_mismatch: return "pattern_mismatch";
        case SchemaViolation::Rule::unknown_key: return "unknown_key";
    }
    return "wrong_type";
}

std::string describe(const std::vector<SchemaViolation>& violations) {
    std::string out;
    for (size_t i = 0; i < violations.size(); ++i) {
        if (i) out += "; ";
        out += violations[i].path + ": " + to_string(violations[i].rule);
        if (!violations[i].detail.empty()) out += " (" + violations[i].detail + ")";
    }
    return out;
}

namespace {

SchemaNode nullable_enum(SchemaNode::Kind kind, std::vector<json> values) {
    SchemaNode node;
    node.kind = kind;
    node.nullable = true;
    node.enum_values = std::move(values);
    return node;
}

SchemaNode nullable_string_pattern(std::string pattern) {
    SchemaNode node;
    node.kind = SchemaNode::Kind::string;
    node.nullable = true;
    node.pattern = std::move(pattern);
    return node;
}

SchemaNode nullable_leaf(SchemaNode::Kind kind) {
    SchemaNode node;
    node.kind = kind;
    node.nullable = true;
    return node;
}

SchemaNode receptor_field() {
    return nullable_enum(SchemaNode::Kind::string, {"positive", "negative", "equivocal", "unknown"});
}

SchemaNode object_of(std::map<std::string, SchemaNode> properties) {
    SchemaNode node;
    node.kind = SchemaNode::Kind::object;
    for (const auto& [name, child] : properties) node.required.push_back(name);
    node.properties = std::move(properties);
    return node;
}

}  // namespace

SchemaNode phenotype_schema(QueryKind kind) {
    switch (kind) {
        case QueryKind::tnm_staging:
            return object_of({
                {"t", nullable_string_pattern("(TX|Tis|T[0-4][a-z0-9]{0,3})")},
                {"n", nullable_string_pattern("(NX|N[0-3][a-z0-9]{0,3})")},
                {"m", nullable_enum(SchemaNode::Kind::string, {"MX", "M0", "M1"})},
                {"stage_group", nullable_enum(SchemaNode::Kind::string, {"0", "I", "IA", "IB", "II", "IIA", "IIB",
                                                                         "III", "IIIA", "IIIB", "IIIC", "IV"})},
            });
        case QueryKind::tumor_info: {
            SchemaNode item = object_of({
                {"size_value", nullable_leaf(SchemaNode::Kind::number)},
                {"size_unit", nullable_enum(SchemaNode::Kind::string, {"cm", "mm"})},
                {"kind", nullable_enum(SchemaNode::Kind::string, {"tumor", "mass", "lesion"})},
                {"location", nullable_leaf(SchemaNode::Kind::string)},
                {"date", nullable_leaf(SchemaNode::Kind::string)},
            });
            SchemaNode tumors;
            tumors.kind = SchemaNode::Kind::array;
            tumors.nullable = true;
            tumors.items = std::make_shared<SchemaNode>(std::move(item));
            return object_of({{"tumors", std::move(tumors)}});
        }
        case QueryKind::grade_performance:
            return object_of({
                {"grade", nullable_enum(SchemaNode::Kind::integer, {1, 2, 3})},
                {"ecog", nullable_enum(SchemaNode::Kind::integer, {0, 1, 2, 3, 4, 5})},
                {"karnofsky",
                 nullable_enum(SchemaNode::Kind::integer, {0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100})},
            });
        case QueryKind::biomarkers:
            return object_of({{"er", receptor_field()}, {"pr", receptor_field()}, {"her2", receptor_field()}});
    }
    return {};
}

namespace {

bool is_integral_number(const json& v) {
    if (v.is_number_integer() || v.is_number_unsigned()) return true;
    if (v.is_number_float()) {
        double d = v.get<double>();
        return std::isfinite(d) && d == std::floor(d);
    }
    return false;
}

bool enum_contains(const std::vector<json>& values, const json& v) {
    for (const auto& candidate : values)
        if (candidate == v) return true;
    return false;
}

const char* kind_name(SchemaNode::Kind kind) {
    switch (kind) {
        case SchemaNode::Kind::object: return "object";
        case SchemaNode::Kind::array: return "array";
        case SchemaNode::Kind::string: return "string";
        case SchemaNode::Kind::number: return "number";
        case SchemaNode::Kind::integer: return "integer";
        case SchemaNode::Kind::boolean: return "boolean";
        case SchemaNode::Kind::null_value: return "null";
    }
    return "?";
}

void validate_node(const json& doc, const SchemaNode& node, const std::string& path,
                   std::vector<SchemaViolation>& out) {
    if (doc.is_null()) {
        if (!node.nullable && node.kind != SchemaNode::Kind::null_value)
            out.push_back({path, SchemaViolation::Rule::wrong_type, "null not allowed"});
        return;
    }

    switch (node.kind) {
        case SchemaNode::Kind::object: {
            if (!doc.is_object()) {
                out.push_back({path, SchemaViolation::Rule::wrong_type, "expected object"});
                return;
            }
            for (const auto& name : node.required)
                if (!doc.contains(name))
                    out.push_back({path + "/" + name, SchemaViolation::Rule::missing_required, "key absent"});
            for (const auto& [key, value] : doc.items()) {
                auto it = node.properties.find(key);
                if (it == node.properties.end()) {
                    out.push_back({path + "/" + key, SchemaViolation::Rule::unknown_key, "not in schema"});
                    continue;
                }
                validate_node(value, it->second, path + "/" + key, out);
            }
            return;
        }
        case SchemaNode::Kind::array: {
            if (!doc.is_array()) {
                out.push_back({path, SchemaViolation::Rule::wrong_type, "expected array"});
                return;
            }
            if (node.items)
                for (size_t i = 0; i < doc.size(); ++i)
                    validate_node(doc[i], *node.items, path + "/" + std::to_string(i), out);
            return;
        }
        case SchemaNode::Kind::string:
            if (!doc.is_string()) {
                out.push_back({path, SchemaViolation::Rule::wrong_type, "expected string"});
                return;
            }
            break;
        case SchemaNode::Kind::number:
            if (!doc.is_number()) {
                out.push_back({path, SchemaViolation::Rule::wrong_type, "expected number"});
                return;
            }
            break;
        case SchemaNode::Kind::integer:
            if (!is_integral_number(doc)) {
                out.push_back({path, SchemaViolation::Rule::wrong_type, "expected integer"});
                return;
            }
            break;
        case SchemaNode::Kind::boolean:
            if (!doc.is_boolean()) {
                out.push_back({path, SchemaViolation::Rule::wrong_type, "expected boolean"});
                return;
            }
            break;
        case SchemaNode::Kind::null_value:
            out.push_back({path, SchemaViolation::Rule::wrong_type, "expected null"});
            return;
    }

    if (!node.enum_values.empty() && !enum_contains(node.enum_values, doc))
        out.push_back({path, SchemaViolation::Rule::enum_mismatch, doc.dump() + " not in enum"});
    if (node.pattern && doc.is_string()) {
        std::regex re(*node.pattern);
        if (!std::regex_match(doc.get<std::string>(), re))
            out.push_back({path, SchemaViolation::Rule::pattern_mismatch,
                           doc.dump() + " does not match " + *node.pattern});
    }
}

json schema_to_json(const SchemaNode& node) {
    json j;
    if (node.nullable && node.kind != SchemaNode::Kind::null_value)
        j["type"] = json::array({kind_name(node.kind), "null"});
    else
        j["type"] = kind_name(node.kind);

    if (node.kind == SchemaNode::Kind::object) {
        json props = json::object();
        for (const auto& [name, child] : node.properties) props[name] = schema_to_json(child);
        j["properties"] = props;
        j["required"] = node.required;
        j["additionalProperties"] = false;
    }
    if (node.kind == SchemaNode::Kind::array && node.items) j["items"] = schema_to_json(*node.items);
    if (!node.enum_values.empty()) j["enum"] = node.enum_values;
    if (node.pattern) j["pattern"] = *node.pattern;
    return j;
}

}  // namespace

std::vector<SchemaViolation> validate(const json& doc, const SchemaNode& schema) {
    std::vector<SchemaViolation> out;
    validate_node(doc, schema, "", out);
    return out;
}

std::string render_schema(const SchemaNode& schema) {
    // nlohmann::json with default object ordering is already key-sorted.
    return schema_to_json(schema).dump(2);
}

}  // namespace pheno
