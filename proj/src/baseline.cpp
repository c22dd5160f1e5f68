#include "pheno/baseline.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <regex>

#include "pheno/postprocess.hpp"
#include "pheno/tokenize.hpp"

namespace pheno {

namespace {

struct Tok {
    std::string folded;
    std::string raw;
    size_t begin = 0;
    size_t end = 0;
    int sentence = 0;
};

struct TokText {
    std::vector<Tok> tokens;
    std::vector<int> sentence_at;  // per char offset, size text.size()+1

    int sentence_of(size_t pos) const { return sentence_at[std::min(pos, sentence_at.size() - 1)]; }
};

TokText index_text(const std::string& text) {
    TokText out;
    out.sentence_at.resize(text.size() + 1);
    int sentence = 0;
    auto digit = [&](size_t i) { return i < text.size() && text[i] >= '0' && text[i] <= '9'; };
    for (size_t i = 0; i < text.size(); ++i) {
        out.sentence_at[i] = sentence;
        char c = text[i];
        bool decimal_point = c == '.' && i > 0 && digit(i - 1) && digit(i + 1);
        if ((c == '.' && !decimal_point) || c == '!' || c == '?' || c == '\n') ++sentence;
    }
    out.sentence_at[text.size()] = sentence;

    for (auto sv : tokenize(text)) {
        Tok tok;
        tok.begin = static_cast<size_t>(sv.data() - text.data());
        tok.end = tok.begin + sv.size();
        tok.raw = std::string(sv);
        tok.folded = fold_case(sv);
        tok.sentence = out.sentence_at[tok.begin];
        out.tokens.push_back(std::move(tok));
    }
    return out;
}

// All parseable date mentions with their char positions.
std::vector<std::pair<size_t, Date>> find_dates(const std::string& text) {
    static const std::regex patterns[] = {
        std::regex(R"(\d{1,4}[/-]\d{1,2}[/-]\d{1,4})"),
        std::regex(R"([A-Za-z]{3,9}\.?\s+\d{1,2},\s*\d{4})"),
        std::regex(R"(\d{1,2}\s+[A-Za-z]{3,9}\.?\s+\d{4})"),
    };
    std::vector<std::pair<size_t, Date>> out;
    for (const auto& re : patterns) {
        for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator(); ++it) {
            if (auto date = standardize_date(it->str()))
                out.emplace_back(static_cast<size_t>(it->position()), *date);
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

std::optional<Date> sentence_date(const TokText& tt, const std::vector<std::pair<size_t, Date>>& dates,
                                  int sentence) {
    for (const auto& [pos, date] : dates)
        if (tt.sentence_of(pos) == sentence) return date;
    return std::nullopt;
}

std::optional<ReceptorStatus> status_token(const std::string& folded) {
    if (folded == "positive" || folded == "pos" || folded == "+") return ReceptorStatus::positive;
    if (folded == "negative" || folded == "neg" || folded == "-") return ReceptorStatus::negative;
    if (folded == "equivocal") return ReceptorStatus::equivocal;
    return std::nullopt;
}

bool matches_at(const std::vector<Tok>& tokens, size_t i, const std::vector<const char*>& alias) {
    if (i + alias.size() > tokens.size()) return false;
    for (size_t k = 0; k < alias.size(); ++k)
        if (tokens[i + k].folded != alias[k]) return false;
    return true;
}

struct ReceptorMention {
    size_t position = 0;
    ReceptorStatus status = ReceptorStatus::unknown;
    std::optional<Date> date;
};

ReceptorStatus resolve_receptor(const TokText& tt, const std::vector<std::vector<const char*>>& aliases,
                                const std::vector<std::pair<size_t, Date>>& dates, int window) {
    std::vector<ReceptorMention> mentions;
    const auto& tokens = tt.tokens;
    for (size_t i = 0; i < tokens.size(); ++i) {
        size_t len = 0;
        for (const auto& alias : aliases) {  // aliases ordered longest first
            if (matches_at(tokens, i, alias)) {
                len = alias.size();
                break;
            }
        }
        if (!len) continue;
        for (size_t j = i + len; j < std::min(tokens.size(), i + len + static_cast<size_t>(window)); ++j) {
            if (auto status = status_token(tokens[j].folded)) {
                mentions.push_back(
                    {tokens[i].begin, *status, sentence_date(tt, dates, tokens[i].sentence)});
                break;
            }
        }
        i += len - 1;
    }
    if (mentions.empty()) return ReceptorStatus::unknown;

    std::vector<ReceptorMention> dated;
    for (const auto& m : mentions)
        if (m.date) dated.push_back(m);
    if (!dated.empty()) {
        auto best = std::max_element(dated.begin(), dated.end(), [](const auto& a, const auto& b) {
            return std::tie(*a.date, a.position) < std::tie(*b.date, b.position);
        });
        return best->status;
    }
    return mentions.back().status;
}

std::optional<int> parse_small_int(const std::string& folded, int lo, int hi) {
    if (folded.empty() || folded.size() > 3) return std::nullopt;
    for (char c : folded)
        if (c < '0' || c > '9') return std::nullopt;
    int v = std::stoi(folded);
    if (v < lo || v > hi) return std::nullopt;
    return v;
}

// first value within `window` tokens after any keyword; last keyword wins
template <typename Parse>
auto window_scan(const std::vector<Tok>& tokens, const std::vector<const char*>& keywords, int window, Parse parse)
    -> decltype(parse(size_t{})) {
    decltype(parse(size_t{})) result{};
    for (size_t i = 0; i < tokens.size(); ++i) {
        bool is_keyword = false;
        for (const char* kw : keywords)
            if (tokens[i].folded == kw) is_keyword = true;
        if (!is_keyword) continue;
        for (size_t j = i + 1; j < std::min(tokens.size(), i + 1 + static_cast<size_t>(window)); ++j) {
            if (auto v = parse(j)) {
                result = v;
                break;
            }
        }
    }
    return result;
}

const std::regex& stage_value_re() {
    static const std::regex re("^(iv|i{1,3})([abc])?$");
    return re;
}

std::optional<Stage> parse_stage_at(const std::vector<Tok>& tokens, size_t j) {
    const std::string& tok = tokens[j].folded;
    if (tok == "0") return Stage::S0;
    std::smatch m;
    if (!std::regex_match(tok, m, stage_value_re())) return std::nullopt;
    std::string base = m[1];
    std::string letter = m[2];
    if (letter.empty() && j + 2 < tokens.size() && (tokens[j + 1].folded == "-" || tokens[j + 1].folded == "/")) {
        const std::string& next = tokens[j + 2].folded;
        if (next == "a" || next == "b" || next == "c") letter = next;
    }
    auto upper = [](std::string s) {
        for (char& c : s) c = static_cast<char>(c >= 'a' && c <= 'z' ? c - 'a' + 'A' : c);
        return s;
    };
    if (!letter.empty())
        if (auto combined = stage_from_string(upper(base + letter))) return combined;
    return stage_from_string(upper(base));
}

}  // namespace

Biomarkers extract_biomarkers(const std::string& text, const BaselineConfig& cfg) {
    TokText tt = index_text(text);
    auto dates = find_dates(text);

    static const std::vector<std::vector<const char*>> er_aliases = {{"estrogen", "receptor"}, {"er"}};
    static const std::vector<std::vector<const char*>> pr_aliases = {{"progesterone", "receptor"}, {"pr"}};
    static const std::vector<std::vector<const char*>> her2_aliases = {
        {"her", "-", "2", "/", "neu"}, {"her2", "/", "neu"}, {"her", "-", "2"}, {"her", "2"}, {"her2"}};

    Biomarkers out;
    out.er = resolve_receptor(tt, er_aliases, dates, cfg.window_tokens);
    out.pr = resolve_receptor(tt, pr_aliases, dates, cfg.window_tokens);
    out.her2 = resolve_receptor(tt, her2_aliases, dates, cfg.window_tokens);
    return out;
}

TNM extract_tnm(const std::string& text) {
    // clinical prefixes stack: pT2, ypT1c
    static const std::regex glued(
        "^[pcy]{0,2}T(X|is|[0-4][a-z]{0,3})[pcy]{0,2}N(X|[0-3][a-z]{0,3})[pcy]{0,2}M(X|[01][a-z]{0,3})$");
    static const std::regex t_re("^[pcy]{0,2}T(X|is|[0-4][a-z]{0,3})$");
    static const std::regex n_re("^[pcy]{0,2}N(X|[0-3][a-z]{0,3})$");
    static const std::regex m_re("^[pcy]{0,2}M(X|[01][a-z]{0,3})$");

    TNM out;
    std::smatch m;
    for (auto sv : tokenize(text)) {
        std::string tok(sv);
        if (std::regex_match(tok, m, glued)) {
            out.t = truncate_tnm_t("T" + m[1].str());
            out.n = truncate_tnm_n("N" + m[2].str());
            out.m = truncate_tnm_m("M" + m[3].str());
        } else if (std::regex_match(tok, m, t_re)) {
            if (auto v = truncate_tnm_t("T" + m[1].str())) out.t = v;
        } else if (std::regex_match(tok, m, n_re)) {
            if (auto v = truncate_tnm_n("N" + m[1].str())) out.n = v;
        } else if (std::regex_match(tok, m, m_re)) {
            if (auto v = truncate_tnm_m("M" + m[1].str())) out.m = v;
        }
    }
    return out;
}

std::optional<Stage> extract_stage(const std::string& text, const BaselineConfig& cfg) {
    TokText tt = index_text(text);
    std::optional<Stage> result;
    for (size_t i = 0; i < tt.tokens.size(); ++i) {
        if (tt.tokens[i].folded.rfind("stage", 0) != 0) continue;  // stage, staged, staging, stages
        for (size_t j = i + 1; j < std::min(tt.tokens.size(), i + 1 + static_cast<size_t>(cfg.window_tokens)); ++j) {
            if (auto v = parse_stage_at(tt.tokens, j)) {
                result = v;
                break;
            }
        }
    }
    return result;
}

GradePerformance extract_grade_perf(const std::string& text, const BaselineConfig& cfg) {
    TokText tt = index_text(text);
    const auto& tokens = tt.tokens;
    GradePerformance out;

    out.grade = window_scan(tokens, {"grade"}, cfg.window_tokens, [&](size_t j) -> std::optional<int> {
        const std::string& tok = tokens[j].folded;
        if (auto v = parse_small_int(tok, 1, 3)) return v;
        if (tok == "i") return 1;
        if (tok == "ii") return 2;
        if (tok == "iii") return 3;
        return std::nullopt;
    });
    out.ecog = window_scan(tokens, {"ecog"}, cfg.window_tokens,
                           [&](size_t j) { return parse_small_int(tokens[j].folded, 0, 5); });
    out.karnofsky = window_scan(tokens, {"karnofsky", "kps"}, cfg.window_tokens, [&](size_t j) -> std::optional<int> {
        auto v = parse_small_int(tokens[j].folded, 0, 100);
        if (v && *v % 10 == 0) return v;
        return std::nullopt;
    });
    return out;
}

std::vector<TumorFinding> extract_tumors(const std::string& text, const BaselineConfig& cfg) {
    static const std::regex size_re(R"(\b((?:\d+(?:\.\d+)?\s*x\s*)*\d+(?:\.\d+)?)\s*(cm|mm)\b)",
                                    std::regex::icase);
    static const std::pair<const char*, TumorKind> kind_words[] = {
        {"tumor", TumorKind::tumor},   {"tumors", TumorKind::tumor}, {"mass", TumorKind::mass},
        {"masses", TumorKind::mass},   {"lesion", TumorKind::lesion}, {"lesions", TumorKind::lesion}};

    TokText tt = index_text(text);
    auto dates = find_dates(text);
    const auto& tokens = tt.tokens;

    auto kind_of = [&](size_t ti) -> std::optional<TumorKind> {
        for (const auto& [word, kind] : kind_words)
            if (tokens[ti].folded == word) return kind;
        return std::nullopt;
    };

    std::vector<TumorFinding> out;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), size_re); it != std::sregex_iterator(); ++it) {
        size_t begin = static_cast<size_t>(it->position());
        size_t end = begin + it->length();

        // token span of the match
        size_t first = tokens.size(), last = 0;
        for (size_t ti = 0; ti < tokens.size(); ++ti) {
            if (tokens[ti].end <= begin || tokens[ti].begin >= end) continue;
            first = std::min(first, ti);
            last = std::max(last, ti);
        }
        if (first == tokens.size()) continue;

        // nearest tumor/mass/lesion keyword within the window, after then before
        std::optional<TumorKind> kind;
        for (int d = 1; d <= cfg.window_tokens && !kind; ++d) {
            if (last + d < tokens.size()) kind = kind_of(last + d);
            if (!kind && first >= static_cast<size_t>(d)) kind = kind_of(first - d);
        }
        if (!kind) continue;

        // dimensions like "2.1 x 1.5" keep the largest
        double value = 0.0;
        std::string dims = (*it)[1].str();
        for (char& c : dims)
            if (c == 'x' || c == 'X') c = ' ';
        size_t pos = 0;
        while (pos < dims.size()) {
            size_t consumed = 0;
            try {
                double d = std::stod(dims.substr(pos), &consumed);
                value = std::max(value, d);
                pos += consumed;
            } catch (const std::exception&) {
                ++pos;
            }
        }

        std::string unit = fold_case((*it)[2].str());
        TumorFinding finding;
        finding.kind = *kind;
        finding.size_cm = normalize_size(value, unit == "mm" ? SizeUnit::mm : SizeUnit::cm);

        int sentence = tt.sentence_of(begin);
        std::optional<Date> best;
        size_t best_distance = 0;
        for (const auto& [dpos, date] : dates) {
            if (tt.sentence_of(dpos) != sentence) continue;
            size_t distance = dpos > begin ? dpos - begin : begin - dpos;
            if (!best || distance < best_distance) {
                best = date;
                best_distance = distance;
            }
        }
        finding.observed_date = best;
        out.push_back(std::move(finding));
    }
    return out;
}

std::optional<bool> extract_metastasis_flag(const std::string& text) {
    static const char* met_words[] = {"metastatic", "metastasis", "metastases", "mets"};
    static const char* family_words[] = {"mother",      "father", "sister",   "brother", "daughter",
                                         "grandmother", "aunt",   "maternal", "paternal", "family"};
    static const char* negation_words[] = {"no", "without", "denies", "negative"};

    TokText tt = index_text(text);
    const auto& tokens = tt.tokens;
    auto in_list = [](const std::string& tok, auto& list) {
        for (const char* w : list)
            if (tok == w) return true;
        return false;
    };

    std::optional<bool> verdict;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (!in_list(tokens[i].folded, met_words)) continue;
        int sentence = tokens[i].sentence;

        bool family = false, negated = false, breast = false;
        for (size_t j = 0; j < tokens.size(); ++j) {
            if (tokens[j].sentence != sentence) continue;
            if (j < i && in_list(tokens[j].folded, family_words)) family = true;
            if (j < i && in_list(tokens[j].folded, negation_words)) negated = true;
            if (tokens[j].folded == "breast") breast = true;
        }
        if (family) continue;  // about a relative, not the patient
        if (negated)
            verdict = false;
        else if (breast)
            verdict = true;
    }
    return verdict;
}

std::optional<PhenotypeRecord> baseline_extract(const ProcessedNote& note, const BaselineConfig& cfg,
                                                const std::string& extracted_at, bool inject_fault) {
    if (inject_fault) return std::nullopt;
    PhenotypeRecord rec;
    rec.note_id = note.note_id;
    rec.extractor_id = "baseline";
    rec.extracted_at = extracted_at.empty() ? iso_utc_now() : extracted_at;
    rec.biomarkers = extract_biomarkers(note.diff_text, cfg);
    rec.tnm = extract_tnm(note.diff_text);
    rec.stage = extract_stage(note.diff_text, cfg);
    rec.grade_perf = extract_grade_perf(note.diff_text, cfg);
    rec.tumors = extract_tumors(note.diff_text, cfg);
    rec.metastatic_breast_flag = extract_metastasis_flag(note.diff_text);
    return rec;
}

std::vector<std::optional<PhenotypeRecord>> baseline_extract_corpus(const std::vector<ProcessedNote>& notes,
                                                                    const BaselineConfig& cfg,
                                                                    const std::string& extracted_at) {
    std::vector<bool> faulted(notes.size(), false);
    if (cfg.fault_numerator > 0 && cfg.fault_denominator > 0) {
        size_t k = static_cast<size_t>(static_cast<long>(notes.size()) * cfg.fault_numerator /
                                       cfg.fault_denominator);
        std::vector<size_t> order(notes.size());
        std::iota(order.begin(), order.end(), 0);
        std::mt19937_64 rng(cfg.fault_seed);
        std::shuffle(order.begin(), order.end(), rng);
        for (size_t i = 0; i < std::min(k, order.size()); ++i) faulted[order[i]] = true;
    }
    std::vector<std::optional<PhenotypeRecord>> out;
    out.reserve(notes.size());
    for (size_t i = 0; i < notes.size(); ++i)
        out.push_back(baseline_extract(notes[i], cfg, extracted_at, faulted[i]));
    return out;
}

}  // namespace pheno
