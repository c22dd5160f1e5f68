#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace pheno {

/// The four extraction queries. tnm_staging covers both the TNM and stage
/// phenotype groups.
enum class QueryKind { tnm_staging, tumor_info, grade_performance, biomarkers };

std::string to_string(QueryKind kind);
std::optional<QueryKind> query_kind_from_string(const std::string& s);

/// All four query kinds in canonical order.
const std::vector<QueryKind>& all_query_kinds();

/// The JSON-schema subset needed by the phenotype schemas: objects, arrays,
/// typed leaves with optional enums and patterns, closed-world keys.
struct SchemaNode {
    enum class Kind { object, array, string, number, integer, boolean, null_value };

    Kind kind = Kind::object;
    bool nullable = false;
    std::map<std::string, SchemaNode> properties;  // object kind
    std::shared_ptr<SchemaNode> items;             // array kind
    std::vector<std::string> required;
    std::vector<nlohmann::json> enum_values;
    std::optional<std::string> pattern;  // string kind only, full match
};

struct SchemaViolation {
    enum class Rule { missing_required, wrong_type, enum_mismatch, pattern_mismatch, unknown_key };

    std::string path;  // JSON pointer
    Rule rule = Rule::wrong_type;
    std::string detail;
};

std::string to_string(SchemaViolation::Rule rule);

/// Joined "path: rule detail" lines, for retry feedback and logs.
std::string describe(const std::vector<SchemaViolation>& violations);

/// The fixed extraction schema for one query kind. All leaves are nullable;
/// t and n accept subdivision suffixes (truncated later in post-processing)
/// via patterns, m and stage_group are closed enums.
SchemaNode phenotype_schema(QueryKind kind);

/// Closed-world validation: unknown keys are violations. Empty result iff the
/// document satisfies the schema.
std::vector<SchemaViolation> validate(const nlohmann::json& doc, const SchemaNode& schema);

/// Canonical, key-sorted, two-space-indented JSON text of the schema.
std::string render_schema(const SchemaNode& schema);

}  // namespace pheno
