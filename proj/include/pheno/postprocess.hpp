#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pheno/core.hpp"
#include "pheno/schema.hpp"

namespace pheno {

enum class SizeUnit { cm, mm };

/// Parses {YYYY-MM-DD, MM/DD/YYYY, M/D/YY, "Month D, YYYY", "D Mon YYYY"}
/// into a calendar date. Total: anything else (including invalid calendar
/// days) returns null. Two-digit years pivot at 50 (>= 50 -> 19xx).
std::optional<Date> standardize_date(const std::string& raw);

/// Tumor size in normalized centimeters. A missing unit is assumed to be cm
/// and flagged in `provenance` when provided. Throws std::invalid_argument on
/// negative values.
double normalize_size(double value, std::optional<SizeUnit> unit, std::vector<std::string>* provenance = nullptr);

/// Maps yes/no-like strings and booleans onto booleans; unmapped input is
/// null. Trailing periods are ignored ("pos." == "pos").
std::optional<bool> normalize_boolean(const nlohmann::json& raw);

/// Bracket repair for LLM output: scans {} and [] outside string literals,
/// appends missing closers in stack order, drops unmatched closers, closes an
/// unterminated string literal (dropping a dangling trailing escape) so the
/// result is balance-valid and the repair is idempotent.
std::string fix_brackets(const std::string& raw);

/// Where the schema expects a scalar but the document wraps it in a
/// single-key object ({"value"|"result"|"status": x}), substitutes the inner
/// value; recurses through objects and arrays. Multi-key wrappers stay
/// untouched for validation to reject.
nlohmann::json flatten_kv(const nlohmann::json& doc, const SchemaNode& schema);

/// Builds the final record from the per-query validated documents, applying
/// the normalizers and TNM subdivision truncation (T1c -> T1). Coercion
/// failures null the field and leave a provenance flag; the result always
/// passes validate_record.
PhenotypeRecord assemble_record(const std::map<QueryKind, nlohmann::json>& per_query_docs,
                                const std::string& note_id, const std::string& extractor_id,
                                const std::string& extracted_at);

// TNM subdivision truncation to the major category; nullopt when the value
// does not start with a recognized category.
std::optional<TnmT> truncate_tnm_t(const std::string& raw);
std::optional<TnmN> truncate_tnm_n(const std::string& raw);
std::optional<TnmM> truncate_tnm_m(const std::string& raw);

}  // namespace pheno
