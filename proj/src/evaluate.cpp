#include "pheno/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace pheno {

using json = nlohmann::json;

std::string to_string(Phenotype p) {
    switch (p) {
        case Phenotype::biomarkers: return "biomarkers";
        case Phenotype::grade_perf: return "grade_perf";
        case Phenotype::stage: return "stage";
        case Phenotype::tnm: return "tnm";
        case Phenotype::tumor: return "tumor";
    }
    return "biomarkers";
}

std::optional<Phenotype> phenotype_from_string(const std::string& s) {
    for (Phenotype p : all_phenotypes())
        if (s == to_string(p)) return p;
    return std::nullopt;
}

const std::vector<Phenotype>& all_phenotypes() {
    static const std::vector<Phenotype> values = {Phenotype::biomarkers, Phenotype::grade_perf, Phenotype::stage,
                                                  Phenotype::tnm, Phenotype::tumor};
    return values;
}

std::vector<Phenotype> phenotypes_of_query(QueryKind kind) {
    switch (kind) {
        case QueryKind::tnm_staging: return {Phenotype::tnm, Phenotype::stage};
        case QueryKind::tumor_info: return {Phenotype::tumor};
        case QueryKind::grade_performance: return {Phenotype::grade_perf};
        case QueryKind::biomarkers: return {Phenotype::biomarkers};
    }
    return {};
}

void to_json(json& j, const GoldLabel& g) {
    j = json{{"note_id", g.note_id}, {"phenotype", to_string(g.phenotype)}, {"gold_value", g.gold_value}};
}

void from_json(const json& j, GoldLabel& g) {
    j.at("note_id").get_to(g.note_id);
    auto p = phenotype_from_string(j.at("phenotype").get<std::string>());
    if (!p) throw std::invalid_argument("unrecognized phenotype: " + j.at("phenotype").dump());
    g.phenotype = *p;
    g.gold_value = j.at("gold_value");
}

std::string to_string(LabelOutcome v) {
    switch (v) {
        case LabelOutcome::correct: return "correct";
        case LabelOutcome::missing: return "missing";
        case LabelOutcome::hallucination: return "hallucination";
        case LabelOutcome::no_response: return "no_response";
    }
    return "correct";
}

json phenotype_value(const PhenotypeRecord& rec, Phenotype p) {
    switch (p) {
        case Phenotype::biomarkers: {
            const Biomarkers& b = rec.biomarkers;
            if (b.er == ReceptorStatus::unknown && b.pr == ReceptorStatus::unknown &&
                b.her2 == ReceptorStatus::unknown)
                return nullptr;
            return json(b);
        }
        case Phenotype::grade_perf: {
            const GradePerformance& g = rec.grade_perf;
            if (!g.grade && !g.ecog && !g.karnofsky) return nullptr;
            return json(g);
        }
        case Phenotype::stage:
            return rec.stage ? json(to_string(*rec.stage)) : json(nullptr);
        case Phenotype::tnm: {
            const TNM& t = rec.tnm;
            if (!t.t && !t.n && !t.m) return nullptr;
            return json(t);
        }
        case Phenotype::tumor: {
            if (rec.tumors.empty()) return nullptr;
            return json(rec.tumors);
        }
    }
    return nullptr;
}

namespace {

std::optional<long> rounded_size(const json& item) {
    auto it = item.find("size_cm");
    if (it == item.end() || it->is_null()) return std::nullopt;
    return std::lround(it->get<double>() * 10.0);
}

bool tumor_item_matches(const json& pred, const json& gold) {
    if (rounded_size(pred) != rounded_size(gold)) return false;
    if (pred.value("kind", "") != gold.value("kind", "")) return false;
    if (gold.contains("location") && !gold["location"].is_null() &&
        pred.value("location", json(nullptr)) != gold["location"])
        return false;
    if (gold.contains("observed_date") && !gold["observed_date"].is_null() &&
        pred.value("observed_date", json(nullptr)) != gold["observed_date"])
        return false;
    return true;
}

bool match_all(const json& preds, const json& golds, std::vector<bool>& used, size_t g) {
    if (g == golds.size()) return true;
    for (size_t p = 0; p < preds.size(); ++p) {
        if (used[p] || !tumor_item_matches(preds[p], golds[g])) continue;
        used[p] = true;
        if (match_all(preds, golds, used, g + 1)) return true;
        used[p] = false;
    }
    return false;
}

bool tumor_lists_equal(const json& pred, const json& gold) {
    if (!pred.is_array() || !gold.is_array() || pred.size() != gold.size()) return false;
    std::vector<bool> used(pred.size(), false);
    return match_all(pred, gold, used, 0);
}

bool is_absent(const std::optional<json>& v) { return !v || v->is_null(); }

}  // namespace

bool values_equal(Phenotype p, const json& pred, const json& gold) {
    if (p == Phenotype::tumor) return tumor_lists_equal(pred, gold);
    return pred == gold;
}

LabelOutcome classify_label(const std::optional<json>& pred, const GoldLabel& gold, bool responded) {
    if (!responded) return LabelOutcome::no_response;
    bool gold_present = !gold.gold_value.is_null();
    bool pred_present = !is_absent(pred);
    if (!gold_present) return pred_present ? LabelOutcome::hallucination : LabelOutcome::correct;
    if (!pred_present) return LabelOutcome::missing;
    return values_equal(gold.phenotype, *pred, gold.gold_value) ? LabelOutcome::correct
                                                                : LabelOutcome::hallucination;
}

std::vector<ClassifiedLabel> classify_rows(const std::vector<ExtractionRow>& rows,
                                           const std::vector<GoldLabel>& gold) {
    std::map<std::string, const ExtractionRow*> by_note;
    for (const auto& row : rows) by_note[row.note_id] = &row;

    std::vector<ClassifiedLabel> out;
    out.reserve(gold.size());
    for (const auto& label : gold) {
        ClassifiedLabel cl;
        cl.phenotype = label.phenotype;
        cl.gold_present = !label.gold_value.is_null();

        auto it = by_note.find(label.note_id);
        if (it == by_note.end() || !it->second->record) {
            cl.outcome = classify_label(std::nullopt, label, false);
            out.push_back(cl);
            continue;
        }
        const ExtractionRow& row = *it->second;
        bool responded = true;
        for (QueryKind kind : row.failed_queries)
            for (Phenotype p : phenotypes_of_query(kind))
                if (p == label.phenotype) responded = false;
        if (!responded) {
            cl.outcome = LabelOutcome::no_response;
            out.push_back(cl);
            continue;
        }
        cl.outcome = classify_label(phenotype_value(*row.record, label.phenotype), label, true);
        out.push_back(cl);
    }
    return out;
}

MetricsReport compute_metrics(const std::vector<ClassifiedLabel>& labels) {
    if (labels.empty()) throw std::invalid_argument("compute_metrics: no outcomes");
    MetricsReport r;
    long tp = 0, fp = 0, fn = 0;
    for (const auto& label : labels) {
        switch (label.outcome) {
            case LabelOutcome::correct:
                ++r.correct;
                if (label.gold_present) ++tp;
                break;
            case LabelOutcome::missing:
                ++r.n_missing;
                if (label.gold_present) ++fn;
                break;
            case LabelOutcome::hallucination:
                ++r.n_hallucination;
                ++fp;
                break;
            case LabelOutcome::no_response:
                ++r.n_no_response;
                if (label.gold_present) ++fn;
                break;
        }
        if (label.outcome != LabelOutcome::no_response) {
            ++r.responded_labels;
            if (label.phenotype) {
                auto& counts = r.per_phenotype[*label.phenotype];
                label.outcome == LabelOutcome::correct ? ++counts.correct : ++counts.incorrect;
            }
        }
    }
    r.incorrect = r.responded_labels - r.correct;
    r.accuracy = r.responded_labels ? static_cast<double>(r.correct) / r.responded_labels : 0.0;
    r.precision = (tp + fp) ? static_cast<double>(tp) / (tp + fp) : 1.0;
    r.recall = (tp + fn) ? static_cast<double>(tp) / (tp + fn) : 1.0;
    r.f1 = (r.precision + r.recall) > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
    return r;
}

MetricsReport compute_metrics(const std::vector<std::pair<LabelOutcome, bool>>& outcomes) {
    std::vector<ClassifiedLabel> labels;
    labels.reserve(outcomes.size());
    for (const auto& [outcome, gold_present] : outcomes)
        labels.push_back(ClassifiedLabel{std::nullopt, outcome, gold_present});
    return compute_metrics(labels);
}

namespace {

std::vector<std::pair<std::string, std::vector<ExtractionRow>>> group_by_extractor(
    const std::vector<ExtractionRow>& rows) {
    std::vector<std::pair<std::string, std::vector<ExtractionRow>>> groups;
    for (const auto& row : rows) {
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& g) { return g.first == row.extractor_id; });
        if (it == groups.end()) {
            groups.push_back({row.extractor_id, {row}});
        } else {
            it->second.push_back(row);
        }
    }
    return groups;
}

}  // namespace

std::vector<ExtractorTable> phenotype_table(const std::vector<ExtractionRow>& rows,
                                            const std::vector<GoldLabel>& gold) {
    std::vector<ExtractorTable> tables;
    for (const auto& [extractor_id, extractor_rows] : group_by_extractor(rows)) {
        ExtractorTable table;
        table.extractor_id = extractor_id;
        for (Phenotype p : all_phenotypes()) table.counts[p] = {};
        for (const auto& label : classify_rows(extractor_rows, gold)) {
            if (label.outcome == LabelOutcome::no_response) {
                ++table.no_response_labels;
                continue;
            }
            ++table.responded_labels;
            auto& counts = table.counts[*label.phenotype];
            label.outcome == LabelOutcome::correct ? ++counts.correct : ++counts.incorrect;
        }
        tables.push_back(std::move(table));
    }
    return tables;
}

EvalReport evaluate_rows(const std::vector<ExtractionRow>& rows, const std::vector<GoldLabel>& gold) {
    EvalReport report;
    report.tables = phenotype_table(rows, gold);
    for (const auto& [extractor_id, extractor_rows] : group_by_extractor(rows))
        report.metrics.emplace_back(extractor_id, compute_metrics(classify_rows(extractor_rows, gold)));
    return report;
}

namespace {

std::string pad_right(const std::string& s, size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string pad_left(const std::string& s, size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f%%", v * 100.0);
    return buf;
}

}  // namespace

std::string render_report(const EvalReport& report) {
    static const char* phenotype_heads[] = {"Biomarkers", "Grade & Perf.", "Stage", "TNM", "Tumor"};

    size_t id_width = 10;
    for (const auto& table : report.tables) id_width = std::max(id_width, table.extractor_id.size() + 2);

    std::string out = "Phenotype results\n";
    out += pad_right("Extractor", id_width) + pad_right("Result", 11);
    for (const char* head : phenotype_heads) out += pad_left(head, std::string(head).size() + 3);
    out += "\n";

    for (const auto& table : report.tables) {
        std::string correct_row = pad_right(table.extractor_id, id_width) + pad_right("Correct", 11);
        std::string incorrect_row = pad_right("", id_width) + pad_right("Incorrect", 11);
        size_t head_index = 0;
        for (Phenotype p : all_phenotypes()) {
            size_t width = std::string(phenotype_heads[head_index]).size() + 3;
            const auto& counts = table.counts.at(p);
            correct_row += pad_left(std::to_string(counts.correct), width);
            incorrect_row += pad_left(std::to_string(counts.incorrect), width);
            ++head_index;
        }
        out += correct_row + "\n" + incorrect_row + "\n";
    }
    for (const auto& table : report.tables)
        if (table.no_response_labels > 0)
            out += "* " + table.extractor_id + ": " + std::to_string(table.no_response_labels) +
                   " labels had no response; responded labels total " + std::to_string(table.responded_labels) +
                   ".\n";

    out += "\nAccuracy metrics\n";
    out += pad_right("Extractor", id_width) + pad_left("Accuracy", 10) + pad_left("Precision", 12) +
           pad_left("Recall", 10) + pad_left("F-1 Score", 12) + "\n";
    for (const auto& [extractor_id, metrics] : report.metrics) {
        out += pad_right(extractor_id, id_width) + pad_left(percent(metrics.accuracy), 10) +
               pad_left(percent(metrics.precision), 12) + pad_left(percent(metrics.recall), 10) +
               pad_left(percent(metrics.f1), 12) + "\n";
    }
    return out;
}

}  // namespace pheno
