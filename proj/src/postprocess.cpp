#include "pheno/postprocess.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <regex>
#include <stdexcept>

namespace pheno {

using json = nlohmann::json;

namespace {

std::optional<int> month_from_name(std::string name) {
    for (char& c : name)
        if (c >= 'A' && c <= 'Z') c += 'a' - 'A';
    if (!name.empty() && name.back() == '.') name.pop_back();
    static const std::pair<const char*, int> months[] = {
        {"january", 1}, {"february", 2}, {"march", 3},     {"april", 4},   {"may", 5},      {"june", 6},
        {"july", 7},    {"august", 8},   {"september", 9}, {"october", 10}, {"november", 11}, {"december", 12},
        {"jan", 1},     {"feb", 2},      {"mar", 3},       {"apr", 4},     {"jun", 6},      {"jul", 7},
        {"aug", 8},     {"sep", 9},      {"sept", 9},      {"oct", 10},    {"nov", 11},     {"dec", 12}};
    for (const auto& [n, m] : months)
        if (name == n) return m;
    return std::nullopt;
}

std::optional<Date> checked(int y, int m, int d) {
    Date date{y, m, d};
    if (!date.ok()) return std::nullopt;
    return date;
}

int pivot_two_digit_year(int yy) { return yy >= 50 ? 1900 + yy : 2000 + yy; }

}  // namespace

std::optional<Date> standardize_date(const std::string& raw) {
    static const std::regex iso(R"(^\s*(\d{4})-(\d{1,2})-(\d{1,2})\s*$)");
    static const std::regex slashed(R"(^\s*(\d{1,2})/(\d{1,2})/(\d{2}|\d{4})\s*$)");
    static const std::regex month_first(R"(^\s*([A-Za-z]+\.?)\s+(\d{1,2}),\s*(\d{4})\s*$)");
    static const std::regex day_first(R"(^\s*(\d{1,2})\s+([A-Za-z]+\.?)\s+(\d{4})\s*$)");

    std::smatch m;
    if (std::regex_match(raw, m, iso)) return checked(std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3]));
    if (std::regex_match(raw, m, slashed)) {
        int year = std::stoi(m[3]);
        if (m[3].length() == 2) year = pivot_two_digit_year(year);
        return checked(year, std::stoi(m[1]), std::stoi(m[2]));
    }
    if (std::regex_match(raw, m, month_first)) {
        auto month = month_from_name(m[1]);
        if (!month) return std::nullopt;
        return checked(std::stoi(m[3]), *month, std::stoi(m[2]));
    }
    if (std::regex_match(raw, m, day_first)) {
        auto month = month_from_name(m[2]);
        if (!month) return std::nullopt;
        return checked(std::stoi(m[3]), *month, std::stoi(m[1]));
    }
    return std::nullopt;
}

double normalize_size(double value, std::optional<SizeUnit> unit, std::vector<std::string>* provenance) {
    if (!(value >= 0.0) || !std::isfinite(value))
        throw std::invalid_argument("normalize_size: negative or non-finite value");
    if (!unit) {
        if (provenance) provenance->push_back("tumor size unit missing; assumed cm");
        return value;
    }
    return *unit == SizeUnit::mm ? value / 10.0 : value;
}

std::optional<bool> normalize_boolean(const json& raw) {
    if (raw.is_boolean()) return raw.get<bool>();
    if (!raw.is_string()) return std::nullopt;
    std::string s = raw.get<std::string>();
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return std::nullopt;
    size_t e = s.find_last_not_of(" \t\r\n");
    s = s.substr(b, e - b + 1);
    while (!s.empty() && s.back() == '.') s.pop_back();
    for (char& c : s)
        if (c >= 'A' && c <= 'Z') c += 'a' - 'A';

    static const char* truthy[] = {"true", "yes", "y", "positive", "pos", "+"};
    static const char* falsy[] = {"false", "no", "n", "negative", "neg", "-"};
    for (const char* t : truthy)
        if (s == t) return true;
    for (const char* f : falsy)
        if (s == f) return false;
    return std::nullopt;
}

std::string fix_brackets(const std::string& raw) {
    std::string out;
    out.reserve(raw.size() + 4);
    std::vector<char> stack;
    bool in_string = false, escape = false;
    for (char c : raw) {
        if (in_string) {
            out += c;
            if (escape) escape = false;
            else if (c == '\\') escape = true;
            else if (c == '"') in_string = false;
            continue;
        }
        switch (c) {
            case '"':
                in_string = true;
                out += c;
                break;
            case '{':
            case '[':
                stack.push_back(c);
                out += c;
                break;
            case '}':
                if (!stack.empty() && stack.back() == '{') {
                    stack.pop_back();
                    out += c;
                }
                break;  // unmatched closer dropped
            case ']':
                if (!stack.empty() && stack.back() == '[') {
                    stack.pop_back();
                    out += c;
                }
                break;
            default:
                out += c;
        }
    }
    if (in_string) {
        if (escape) out.pop_back();  // dangling trailing escape
        out += '"';
    }
    while (!stack.empty()) {
        out += stack.back() == '{' ? '}' : ']';
        stack.pop_back();
    }
    return out;
}

json flatten_kv(const json& doc, const SchemaNode& schema) {
    switch (schema.kind) {
        case SchemaNode::Kind::object: {
            if (!doc.is_object()) return doc;
            json out = json::object();
            for (const auto& [key, value] : doc.items()) {
                auto it = schema.properties.find(key);
                out[key] = it == schema.properties.end() ? value : flatten_kv(value, it->second);
            }
            return out;
        }
        case SchemaNode::Kind::array: {
            if (!doc.is_array() || !schema.items) return doc;
            json out = json::array();
            for (const auto& element : doc) out.push_back(flatten_kv(element, *schema.items));
            return out;
        }
        default: {
            json current = doc;
            while (current.is_object() && current.size() == 1) {
                const std::string& key = current.begin().key();
                if (key != "value" && key != "result" && key != "status") break;
                current = current.begin().value();
            }
            return current;
        }
    }
}

namespace {

template <typename Enum>
std::optional<Enum> truncate_prefix(const std::string& raw, char letter, char max_digit,
                                    std::optional<Enum> (*from_string)(const std::string&)) {
    if (raw.size() < 2 || raw[0] != letter) return std::nullopt;
    if (raw[1] == 'X' && raw.size() == 2) return from_string(std::string(1, letter) + "X");
    if (raw[1] >= '0' && raw[1] <= max_digit) return from_string(std::string(1, letter) + raw[1]);
    return std::nullopt;
}

}  // namespace

std::optional<TnmT> truncate_tnm_t(const std::string& raw) {
    if (raw.rfind("Tis", 0) == 0) return TnmT::Tis;
    return truncate_prefix<TnmT>(raw, 'T', '4', tnm_t_from_string);
}

std::optional<TnmN> truncate_tnm_n(const std::string& raw) {
    return truncate_prefix<TnmN>(raw, 'N', '3', tnm_n_from_string);
}

std::optional<TnmM> truncate_tnm_m(const std::string& raw) {
    if (raw.size() >= 2 && raw[0] == 'M' && (raw[1] == '0' || raw[1] == '1'))
        return raw[1] == '0' ? TnmM::M0 : TnmM::M1;
    if (raw == "MX") return TnmM::MX;
    return std::nullopt;
}

namespace {

// Shared shape for nullable scalar fields of validated documents.
const json* field_or_null(const json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) return nullptr;
    return &*it;
}

std::optional<int> coerce_int(const json& v) {
    if (v.is_number_integer() || v.is_number_unsigned()) return v.get<int>();
    if (v.is_number_float()) {
        double d = v.get<double>();
        if (std::isfinite(d) && d == std::floor(d)) return static_cast<int>(d);
    }
    return std::nullopt;
}

}  // namespace

PhenotypeRecord assemble_record(const std::map<QueryKind, json>& per_query_docs, const std::string& note_id,
                                const std::string& extractor_id, const std::string& extracted_at) {
    PhenotypeRecord rec;
    rec.note_id = note_id;
    rec.extractor_id = extractor_id;
    rec.extracted_at = extracted_at;
    auto flag = [&](const std::string& msg) { rec.provenance.push_back(msg); };

    if (auto it = per_query_docs.find(QueryKind::biomarkers); it != per_query_docs.end() && it->second.is_object()) {
        auto receptor = [&](const char* key) {
            const json* v = field_or_null(it->second, key);
            if (!v) return ReceptorStatus::unknown;
            if (v->is_string())
                if (auto parsed = receptor_from_string(v->get<std::string>())) return *parsed;
            flag(std::string("biomarkers.") + key + ": coercion failure for " + v->dump() + "; set unknown");
            return ReceptorStatus::unknown;
        };
        rec.biomarkers.er = receptor("er");
        rec.biomarkers.pr = receptor("pr");
        rec.biomarkers.her2 = receptor("her2");
    }

    if (auto it = per_query_docs.find(QueryKind::grade_performance);
        it != per_query_docs.end() && it->second.is_object()) {
        auto ranged_int = [&](const char* key, int lo, int hi, int step) -> std::optional<int> {
            const json* v = field_or_null(it->second, key);
            if (!v) return std::nullopt;
            auto n = coerce_int(*v);
            if (!n || *n < lo || *n > hi || *n % step != 0) {
                flag(std::string("grade_perf.") + key + ": coercion failure for " + v->dump() + "; set null");
                return std::nullopt;
            }
            return n;
        };
        rec.grade_perf.grade = ranged_int("grade", 1, 3, 1);
        rec.grade_perf.ecog = ranged_int("ecog", 0, 5, 1);
        rec.grade_perf.karnofsky = ranged_int("karnofsky", 0, 100, 10);
    }

    if (auto it = per_query_docs.find(QueryKind::tnm_staging); it != per_query_docs.end() && it->second.is_object()) {
        const json& doc = it->second;
        auto coerce = [&](const char* key, auto truncate, auto& out) {
            const json* v = field_or_null(doc, key);
            if (!v) return;
            if (v->is_string()) {
                auto value = truncate(v->get<std::string>());
                if (value) {
                    out = value;
                    return;
                }
            }
            flag(std::string("tnm.") + key + ": coercion failure for " + v->dump() + "; set null");
        };
        coerce("t", truncate_tnm_t, rec.tnm.t);
        coerce("n", truncate_tnm_n, rec.tnm.n);
        coerce("m", truncate_tnm_m, rec.tnm.m);
        if (const json* v = field_or_null(doc, "stage_group")) {
            if (v->is_string())
                rec.stage = stage_from_string(v->get<std::string>());
            if (!rec.stage) flag("stage_group: coercion failure for " + v->dump() + "; set null");
        }
    }

    if (auto it = per_query_docs.find(QueryKind::tumor_info); it != per_query_docs.end() && it->second.is_object()) {
        const json* tumors = field_or_null(it->second, "tumors");
        if (tumors && tumors->is_array()) {
            for (const json& entry : *tumors) {
                if (!entry.is_object()) continue;
                const json* size_value = field_or_null(entry, "size_value");
                const json* size_unit = field_or_null(entry, "size_unit");
                const json* kind = field_or_null(entry, "kind");
                const json* location = field_or_null(entry, "location");
                const json* date = field_or_null(entry, "date");
                if (!size_value && !kind && !location && !date) continue;  // empty entry carries nothing

                TumorFinding finding;
                if (kind && kind->is_string() && tumor_kind_from_string(kind->get<std::string>())) {
                    finding.kind = *tumor_kind_from_string(kind->get<std::string>());
                } else {
                    finding.kind = TumorKind::tumor;
                    flag("tumor kind " + std::string(kind ? kind->dump() : "null") + "; defaulted to tumor");
                }
                if (size_value && size_value->is_number()) {
                    double v = size_value->get<double>();
                    if (v >= 0.0 && std::isfinite(v)) {
                        std::optional<SizeUnit> unit;
                        if (size_unit && size_unit->is_string())
                            unit = size_unit->get<std::string>() == "mm" ? SizeUnit::mm : SizeUnit::cm;
                        finding.size_cm = normalize_size(v, unit, &rec.provenance);
                    } else {
                        flag("tumor size_value " + size_value->dump() + " invalid; set null");
                    }
                }
                if (location && location->is_string()) finding.location = location->get<std::string>();
                if (date && date->is_string()) {
                    finding.observed_date = standardize_date(date->get<std::string>());
                    if (!finding.observed_date) flag("unparseable tumor date " + date->dump() + "; set null");
                }
                rec.tumors.push_back(std::move(finding));
            }
        }
    }

    return rec;
}

}  // namespace pheno
