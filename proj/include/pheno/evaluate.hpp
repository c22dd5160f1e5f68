#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pheno/core.hpp"
#include "pheno/schema.hpp"

namespace pheno {

/// The five evaluated phenotype groups (tnm_staging yields two of them).
enum class Phenotype { biomarkers, grade_perf, stage, tnm, tumor };

std::string to_string(Phenotype p);
std::optional<Phenotype> phenotype_from_string(const std::string& s);
const std::vector<Phenotype>& all_phenotypes();

/// Phenotypes answered by one query kind.
std::vector<Phenotype> phenotypes_of_query(QueryKind kind);

/// One hand-annotated label. gold_value null means the phenotype is absent
/// from the note.
struct GoldLabel {
    std::string note_id;
    Phenotype phenotype = Phenotype::biomarkers;
    nlohmann::json gold_value;
};

void to_json(nlohmann::json& j, const GoldLabel& g);
void from_json(const nlohmann::json& j, GoldLabel& g);

enum class LabelOutcome { correct, missing, hallucination, no_response };

std::string to_string(LabelOutcome v);

/// One extractor's result for one note. A missing record is a whole-note
/// no-response; failed_queries mark per-query no-responses.
struct ExtractionRow {
    std::string note_id;
    std::string extractor_id;
    std::optional<PhenotypeRecord> record;
    std::set<QueryKind> failed_queries;
};

/// The canonical comparison value of one phenotype group of a record;
/// JSON null when the group is absent (all-null / empty).
nlohmann::json phenotype_value(const PhenotypeRecord& rec, Phenotype p);

/// Value equality per phenotype. Tumor lists compare as multisets of
/// (size_cm rounded to 0.1, kind); location and date only when the gold item
/// gives them.
bool values_equal(Phenotype p, const nlohmann::json& pred, const nlohmann::json& gold);

LabelOutcome classify_label(const std::optional<nlohmann::json>& pred, const GoldLabel& gold, bool responded);

struct ClassifiedLabel {
    std::optional<Phenotype> phenotype;
    LabelOutcome outcome = LabelOutcome::correct;
    bool gold_present = false;
};

struct PhenotypeCounts {
    long correct = 0;
    long incorrect = 0;
};

struct MetricsReport {
    long responded_labels = 0;
    long correct = 0;
    long incorrect = 0;
    long n_missing = 0;
    long n_hallucination = 0;
    long n_no_response = 0;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::map<Phenotype, PhenotypeCounts> per_phenotype;
};

/// Aggregates outcomes. Accuracy excludes no-responses from its denominator;
/// TP = correct with gold present, FP = hallucinations, FN = missing plus
/// no-responses with gold present; precision and recall are 1 on an empty
/// denominator. Throws std::invalid_argument on empty input.
MetricsReport compute_metrics(const std::vector<ClassifiedLabel>& labels);

/// Convenience overload: (outcome, gold_present) pairs without phenotype
/// attribution.
MetricsReport compute_metrics(const std::vector<std::pair<LabelOutcome, bool>>& outcomes);

/// Per-label classification of one extractor's rows against the gold set.
std::vector<ClassifiedLabel> classify_rows(const std::vector<ExtractionRow>& rows,
                                           const std::vector<GoldLabel>& gold);

struct ExtractorTable {
    std::string extractor_id;
    std::map<Phenotype, PhenotypeCounts> counts;
    long no_response_labels = 0;
    long responded_labels = 0;
};

/// Per-phenotype correct/incorrect counts per extractor (rows may mix
/// extractors; output follows first-appearance order). No-response labels are
/// counted separately, never as correct or incorrect.
std::vector<ExtractorTable> phenotype_table(const std::vector<ExtractionRow>& rows,
                                            const std::vector<GoldLabel>& gold);

struct EvalReport {
    std::vector<ExtractorTable> tables;
    std::vector<std::pair<std::string, MetricsReport>> metrics;  // extractor -> metrics
};

EvalReport evaluate_rows(const std::vector<ExtractionRow>& rows, const std::vector<GoldLabel>& gold);

/// Deterministic aligned-column text: the per-phenotype count table followed
/// by the accuracy-metrics table.
std::string render_report(const EvalReport& report);

}  // namespace pheno
