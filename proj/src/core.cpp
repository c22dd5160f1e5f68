#include "pheno/core.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <stdexcept>

namespace pheno {

std::string Date::iso() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

std::optional<Date> Date::parse_iso(const std::string& s) {
    int y = 0, m = 0, d = 0;
    char tail = 0;
    if (std::sscanf(s.c_str(), "%4d-%2d-%2d%c", &y, &m, &d, &tail) != 3) return std::nullopt;
    Date date{y, m, d};
    if (!date.ok()) return std::nullopt;
    return date;
}

std::string iso_utc_now() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string to_string(NoteKind v) {
    switch (v) {
        case NoteKind::admission: return "admission";
        case NoteKind::progress: return "progress";
        case NoteKind::other: return "other";
    }
    return "other";
}

std::string to_string(ReceptorStatus v) {
    switch (v) {
        case ReceptorStatus::positive: return "positive";
        case ReceptorStatus::negative: return "negative";
        case ReceptorStatus::equivocal: return "equivocal";
        case ReceptorStatus::unknown: return "unknown";
    }
    return "unknown";
}

std::string to_string(TnmT v) {
    switch (v) {
        case TnmT::TX: return "TX";
        case TnmT::Tis: return "Tis";
        case TnmT::T0: return "T0";
        case TnmT::T1: return "T1";
        case TnmT::T2: return "T2";
        case TnmT::T3: return "T3";
        case TnmT::T4: return "T4";
    }
    return "TX";
}

std::string to_string(TnmN v) {
    switch (v) {
        case TnmN::NX: return "NX";
        case TnmN::N0: return "N0";
        case TnmN::N1: return "N1";
        case TnmN::N2: return "N2";
        case TnmN::N3: return "N3";
    }
    return "NX";
}

std::string to_string(TnmM v) {
    switch (v) {
        case TnmM::MX: return "MX";
        case TnmM::M0: return "M0";
        case TnmM::M1: return "M1";
    }
    return "MX";
}

std::string to_string(Stage v) {
    switch (v) {
        case Stage::S0: return "0";
        case Stage::I: return "I";
        case Stage::IA: return "IA";
        case Stage::IB: return "IB";
        case Stage::II: return "II";
        case Stage::IIA: return "IIA";
        case Stage::IIB: return "IIB";
        case Stage::III: return "III";
        case Stage::IIIA: return "IIIA";
        case Stage::IIIB: return "IIIB";
        case Stage::IIIC: return "IIIC";
        case Stage::IV: return "IV";
    }
    return "0";
}

std::string to_string(TumorKind v) {
    switch (v) {
        case TumorKind::tumor: return "tumor";
        case TumorKind::mass: return "mass";
        case TumorKind::lesion: return "lesion";
    }
    return "tumor";
}

namespace {

template <typename Enum, typename List>
std::optional<Enum> lookup(const List& table, const std::string& s) {
    for (const auto& [name, value] : table)
        if (s == name) return value;
    return std::nullopt;
}

}  // namespace

std::optional<NoteKind> note_kind_from_string(const std::string& s) {
    static const std::pair<const char*, NoteKind> table[] = {
        {"admission", NoteKind::admission}, {"progress", NoteKind::progress}, {"other", NoteKind::other}};
    return lookup<NoteKind>(table, s);
}

std::optional<ReceptorStatus> receptor_from_string(const std::string& s) {
    static const std::pair<const char*, ReceptorStatus> table[] = {{"positive", ReceptorStatus::positive},
                                                                   {"negative", ReceptorStatus::negative},
                                                                   {"equivocal", ReceptorStatus::equivocal},
                                                                   {"unknown", ReceptorStatus::unknown}};
    return lookup<ReceptorStatus>(table, s);
}

std::optional<TnmT> tnm_t_from_string(const std::string& s) {
    static const std::pair<const char*, TnmT> table[] = {{"TX", TnmT::TX},   {"Tis", TnmT::Tis}, {"T0", TnmT::T0},
                                                         {"T1", TnmT::T1},   {"T2", TnmT::T2},   {"T3", TnmT::T3},
                                                         {"T4", TnmT::T4}};
    return lookup<TnmT>(table, s);
}

std::optional<TnmN> tnm_n_from_string(const std::string& s) {
    static const std::pair<const char*, TnmN> table[] = {
        {"NX", TnmN::NX}, {"N0", TnmN::N0}, {"N1", TnmN::N1}, {"N2", TnmN::N2}, {"N3", TnmN::N3}};
    return lookup<TnmN>(table, s);
}

std::optional<TnmM> tnm_m_from_string(const std::string& s) {
    static const std::pair<const char*, TnmM> table[] = {{"MX", TnmM::MX}, {"M0", TnmM::M0}, {"M1", TnmM::M1}};
    return lookup<TnmM>(table, s);
}

std::optional<Stage> stage_from_string(const std::string& s) {
    static const std::pair<const char*, Stage> table[] = {
        {"0", Stage::S0},    {"I", Stage::I},     {"IA", Stage::IA},     {"IB", Stage::IB},
        {"II", Stage::II},   {"IIA", Stage::IIA}, {"IIB", Stage::IIB},   {"III", Stage::III},
        {"IIIA", Stage::IIIA}, {"IIIB", Stage::IIIB}, {"IIIC", Stage::IIIC}, {"IV", Stage::IV}};
    return lookup<Stage>(table, s);
}

std::optional<TumorKind> tumor_kind_from_string(const std::string& s) {
    static const std::pair<const char*, TumorKind> table[] = {
        {"tumor", TumorKind::tumor}, {"mass", TumorKind::mass}, {"lesion", TumorKind::lesion}};
    return lookup<TumorKind>(table, s);
}

std::vector<RecordViolation> validate_record(const PhenotypeRecord& rec) {
    std::vector<RecordViolation> out;
    if (rec.note_id.empty()) out.push_back({"note_id", "must be non-empty"});
    if (rec.extractor_id.empty()) out.push_back({"extractor_id", "must be non-empty"});
    if (rec.grade_perf.grade && (*rec.grade_perf.grade < 1 || *rec.grade_perf.grade > 3))
        out.push_back({"grade_perf.grade", "out of range 1..3"});
    if (rec.grade_perf.ecog && (*rec.grade_perf.ecog < 0 || *rec.grade_perf.ecog > 5))
        out.push_back({"grade_perf.ecog", "out of range 0..5"});
    if (rec.grade_perf.karnofsky) {
        int k = *rec.grade_perf.karnofsky;
        if (k < 0 || k > 100) out.push_back({"grade_perf.karnofsky", "out of range 0..100"});
        else if (k % 10 != 0) out.push_back({"grade_perf.karnofsky", "not a multiple of 10"});
    }
    for (size_t i = 0; i < rec.tumors.size(); ++i) {
        const auto& t = rec.tumors[i];
        std::string field = "tumors[" + std::to_string(i) + "]";
        if (t.size_cm && (*t.size_cm < 0 || !std::isfinite(*t.size_cm)))
            out.push_back({field + ".size_cm", "must be finite and >= 0"});
        if (t.observed_date && !t.observed_date->ok())
            out.push_back({field + ".observed_date", "not a valid calendar date"});
    }
    return out;
}

namespace {

json opt_to_json(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

template <typename Enum>
json enum_opt_to_json(const std::optional<Enum>& v) {
    return v ? json(to_string(*v)) : json(nullptr);
}

std::optional<int> opt_int_from(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (v.is_null()) return std::nullopt;
    return v.get<int>();
}

template <typename Enum, typename Parser>
std::optional<Enum> enum_opt_from(const json& j, const char* key, Parser parse) {
    const auto& v = j.at(key);
    if (v.is_null()) return std::nullopt;
    auto parsed = parse(v.template get<std::string>());
    if (!parsed) throw std::invalid_argument("unrecognized enum value for " + std::string(key) + ": " + v.dump());
    return parsed;
}

}  // namespace

void to_json(json& j, const Date& d) { j = d.iso(); }

void from_json(const json& j, Date& d) {
    auto parsed = Date::parse_iso(j.get<std::string>());
    if (!parsed) throw std::invalid_argument("invalid ISO date: " + j.dump());
    d = *parsed;
}

void to_json(json& j, const ClinicalNote& n) {
    j = json{{"patient_id", n.patient_id},
             {"note_id", n.note_id},
             {"visit_date", n.visit_date},
             {"note_kind", to_string(n.note_kind)},
             {"raw_text", n.raw_text}};
}

void from_json(const json& j, ClinicalNote& n) {
    j.at("patient_id").get_to(n.patient_id);
    j.at("note_id").get_to(n.note_id);
    j.at("visit_date").get_to(n.visit_date);
    auto kind = note_kind_from_string(j.at("note_kind").get<std::string>());
    if (!kind) throw std::invalid_argument("unrecognized note_kind: " + j.at("note_kind").dump());
    n.note_kind = *kind;
    j.at("raw_text").get_to(n.raw_text);
    if (n.raw_text.empty()) throw std::invalid_argument("raw_text must be non-empty (note " + n.note_id + ")");
}

void to_json(json& j, const ProcessedNote& n) {
    j = json{{"note_id", n.note_id},
             {"diff_text", n.diff_text},
             {"removed_sections", n.removed_sections},
             {"token_count", n.token_count}};
}

void from_json(const json& j, ProcessedNote& n) {
    j.at("note_id").get_to(n.note_id);
    j.at("diff_text").get_to(n.diff_text);
    j.at("removed_sections").get_to(n.removed_sections);
    j.at("token_count").get_to(n.token_count);
}

void to_json(json& j, const Biomarkers& b) {
    j = json{{"er", to_string(b.er)}, {"pr", to_string(b.pr)}, {"her2", to_string(b.her2)}};
}

void from_json(const json& j, Biomarkers& b) {
    auto get = [&](const char* key) {
        auto parsed = receptor_from_string(j.at(key).get<std::string>());
        if (!parsed) throw std::invalid_argument("unrecognized receptor status: " + j.at(key).dump());
        return *parsed;
    };
    b.er = get("er");
    b.pr = get("pr");
    b.her2 = get("her2");
}

void to_json(json& j, const TNM& t) {
    j = json{{"t", enum_opt_to_json(t.t)}, {"n", enum_opt_to_json(t.n)}, {"m", enum_opt_to_json(t.m)}};
}

void from_json(const json& j, TNM& t) {
    t.t = enum_opt_from<TnmT>(j, "t", tnm_t_from_string);
    t.n = enum_opt_from<TnmN>(j, "n", tnm_n_from_string);
    t.m = enum_opt_from<TnmM>(j, "m", tnm_m_from_string);
}

void to_json(json& j, const GradePerformance& g) {
    j = json{{"grade", opt_to_json(g.grade)}, {"ecog", opt_to_json(g.ecog)}, {"karnofsky", opt_to_json(g.karnofsky)}};
}

void from_json(const json& j, GradePerformance& g) {
    g.grade = opt_int_from(j, "grade");
    g.ecog = opt_int_from(j, "ecog");
    g.karnofsky = opt_int_from(j, "karnofsky");
}

void to_json(json& j, const TumorFinding& t) {
    j = json{{"size_cm", t.size_cm ? json(*t.size_cm) : json(nullptr)},
             {"kind", to_string(t.kind)},
             {"location", t.location ? json(*t.location) : json(nullptr)},
             {"observed_date", t.observed_date ? json(t.observed_date->iso()) : json(nullptr)}};
}

void from_json(const json& j, TumorFinding& t) {
    const auto& size = j.at("size_cm");
    t.size_cm = size.is_null() ? std::nullopt : std::optional<double>(size.get<double>());
    auto kind = tumor_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) throw std::invalid_argument("unrecognized tumor kind: " + j.at("kind").dump());
    t.kind = *kind;
    const auto& loc = j.at("location");
    t.location = loc.is_null() ? std::nullopt : std::optional<std::string>(loc.get<std::string>());
    const auto& date = j.at("observed_date");
    if (date.is_null()) {
        t.observed_date = std::nullopt;
    } else {
        auto parsed = Date::parse_iso(date.get<std::string>());
        if (!parsed) throw std::invalid_argument("invalid observed_date: " + date.dump());
        t.observed_date = parsed;
    }
}

void to_json(json& j, const PhenotypeRecord& r) {
    j = json{{"note_id", r.note_id},
             {"extractor_id", r.extractor_id},
             {"biomarkers", r.biomarkers},
             {"grade_perf", r.grade_perf},
             {"stage", enum_opt_to_json(r.stage)},
             {"tnm", r.tnm},
             {"tumors", r.tumors},
             {"metastatic_breast_flag", r.metastatic_breast_flag ? json(*r.metastatic_breast_flag) : json(nullptr)},
             {"extracted_at", r.extracted_at},
             {"provenance", r.provenance}};
}

void from_json(const json& j, PhenotypeRecord& r) {
    j.at("note_id").get_to(r.note_id);
    j.at("extractor_id").get_to(r.extractor_id);
    j.at("biomarkers").get_to(r.biomarkers);
    j.at("grade_perf").get_to(r.grade_perf);
    r.stage = enum_opt_from<Stage>(j, "stage", stage_from_string);
    j.at("tnm").get_to(r.tnm);
    j.at("tumors").get_to(r.tumors);
    const auto& flag = j.at("metastatic_breast_flag");
    r.metastatic_breast_flag = flag.is_null() ? std::nullopt : std::optional<bool>(flag.get<bool>());
    j.at("extracted_at").get_to(r.extracted_at);
    j.at("provenance").get_to(r.provenance);
}

}  // namespace pheno
