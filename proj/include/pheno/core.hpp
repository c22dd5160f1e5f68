#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace pheno {

using json = nlohmann::json;

/// Calendar date (UTC, ISO-8601 rendering).
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;

    bool ok() const {
        using namespace std::chrono;
        return year_month_day{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                              std::chrono::day{static_cast<unsigned>(day)}}
            .ok();
    }

    std::string iso() const;
    static std::optional<Date> parse_iso(const std::string& s);
};

/// Current wall-clock time as an ISO-8601 UTC timestamp ("2026-01-01T00:00:00Z").
std::string iso_utc_now();

enum class NoteKind { admission, progress, other };
enum class ReceptorStatus { positive, negative, equivocal, unknown };
enum class TnmT { TX, Tis, T0, T1, T2, T3, T4 };
enum class TnmN { NX, N0, N1, N2, N3 };
enum class TnmM { MX, M0, M1 };
enum class Stage { S0, I, IA, IB, II, IIA, IIB, III, IIIA, IIIB, IIIC, IV };
enum class TumorKind { tumor, mass, lesion };

std::string to_string(NoteKind v);
std::string to_string(ReceptorStatus v);
std::string to_string(TnmT v);
std::string to_string(TnmN v);
std::string to_string(TnmM v);
std::string to_string(Stage v);
std::string to_string(TumorKind v);

std::optional<NoteKind> note_kind_from_string(const std::string& s);
std::optional<ReceptorStatus> receptor_from_string(const std::string& s);
std::optional<TnmT> tnm_t_from_string(const std::string& s);
std::optional<TnmN> tnm_n_from_string(const std::string& s);
std::optional<TnmM> tnm_m_from_string(const std::string& s);
std::optional<Stage> stage_from_string(const std::string& s);
std::optional<TumorKind> tumor_kind_from_string(const std::string& s);

/// One raw provider note. note_id is unique within a corpus; notes of one
/// patient are ordered by (visit_date, note_id).
struct ClinicalNote {
    std::string patient_id;
    std::string note_id;
    Date visit_date;
    NoteKind note_kind = NoteKind::other;
    std::string raw_text;
};

/// A note reduced to its differential text.
struct ProcessedNote {
    std::string note_id;
    std::string diff_text;
    std::vector<std::string> removed_sections;
    long token_count = 0;
};

struct Biomarkers {
    ReceptorStatus er = ReceptorStatus::unknown;
    ReceptorStatus pr = ReceptorStatus::unknown;
    ReceptorStatus her2 = ReceptorStatus::unknown;

    bool operator==(const Biomarkers&) const = default;
};

struct TNM {
    std::optional<TnmT> t;
    std::optional<TnmN> n;
    std::optional<TnmM> m;

    bool operator==(const TNM&) const = default;
};

struct GradePerformance {
    std::optional<int> grade;      // 1..3
    std::optional<int> ecog;       // 0..5
    std::optional<int> karnofsky;  // 0,10,...,100

    bool operator==(const GradePerformance&) const = default;
};

struct TumorFinding {
    std::optional<double> size_cm;  // normalized centimeters, >= 0
    TumorKind kind = TumorKind::tumor;
    std::optional<std::string> location;
    std::optional<Date> observed_date;

    bool operator==(const TumorFinding&) const = default;
};

/// The full extraction result for one note: the five phenotype groups of the
/// evaluation protocol plus the baseline-only metastasis flag.
struct PhenotypeRecord {
    std::string note_id;
    std::string extractor_id;  // model name or "baseline"
    Biomarkers biomarkers;
    GradePerformance grade_perf;
    std::optional<Stage> stage;
    TNM tnm;
    std::vector<TumorFinding> tumors;
    std::optional<bool> metastatic_breast_flag;  // populated by the baseline only
    std::string extracted_at;                    // ISO-8601 UTC timestamp
    std::vector<std::string> provenance;         // normalizer assumptions, audit trail

    bool operator==(const PhenotypeRecord&) const = default;
};

struct RecordViolation {
    std::string field;
    std::string rule;
};

/// Checks every type invariant of a record. Empty result means the record is
/// valid; violations are data, never exceptions.
std::vector<RecordViolation> validate_record(const PhenotypeRecord& rec);

// Canonical JSON: snake_case field names, explicit nulls, sorted keys.
void to_json(json& j, const Date& d);
void from_json(const json& j, Date& d);
void to_json(json& j, const ClinicalNote& n);
void from_json(const json& j, ClinicalNote& n);
void to_json(json& j, const ProcessedNote& n);
void from_json(const json& j, ProcessedNote& n);
void to_json(json& j, const Biomarkers& b);
void from_json(const json& j, Biomarkers& b);
void to_json(json& j, const TNM& t);
void from_json(const json& j, TNM& t);
void to_json(json& j, const GradePerformance& g);
void from_json(const json& j, GradePerformance& g);
void to_json(json& j, const TumorFinding& t);
void from_json(const json& j, TumorFinding& t);
void to_json(json& j, const PhenotypeRecord& r);
void from_json(const json& j, PhenotypeRecord& r);

}  // namespace pheno
