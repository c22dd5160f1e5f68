#include "pheno/store.hpp"

#include <stdexcept>

namespace pheno {

using json = nlohmann::json;

AnnotationStore::AnnotationStore(std::filesystem::path path) : path_(std::move(path)) {
    if (std::filesystem::exists(path_)) {
        Replay existing = replay(path_);  // seed revision counters; also validates the file
        for (const auto& row : existing.rows) {
            auto& rev = revs_[{row.note_id, row.extractor_id}];
            rev = std::max(rev, 1L);  // next append supersedes
        }
        // a crash can leave a partial final line without a newline; drop it so
        // the next append starts on a fresh line
        std::ifstream in(path_, std::ios::binary);
        std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        in.close();
        size_t last_newline = content.find_last_of('\n');
        size_t keep = last_newline == std::string::npos ? 0 : last_newline + 1;
        if (keep < content.size()) std::filesystem::resize_file(path_, keep);
    }
    out_.open(path_, std::ios::app);
    if (!out_) throw std::runtime_error("cannot open store for append: " + path_.string());
}

long AnnotationStore::next_rev(const std::string& note_id, const std::string& extractor_id) {
    return revs_[{note_id, extractor_id}]++;
}

void AnnotationStore::append_line(const std::string& line) {
    out_ << line << '\n';
    out_.flush();
    if (!out_) throw std::runtime_error("store write failed: " + path_.string());
}

void AnnotationStore::append_record(const PhenotypeRecord& rec, const std::vector<QueryKind>& failed_queries) {
    std::lock_guard lock(mutex_);
    json failed = json::array();
    for (QueryKind kind : failed_queries) failed.push_back(to_string(kind));
    json row{{"kind", "record"},
             {"note_id", rec.note_id},
             {"extractor_id", rec.extractor_id},
             {"rev", next_rev(rec.note_id, rec.extractor_id)},
             {"record", rec},
             {"failed_queries", failed}};
    append_line(row.dump());
}

void AnnotationStore::append_no_response(const std::string& note_id, const std::string& extractor_id) {
    std::lock_guard lock(mutex_);
    json row{{"kind", "no_response"},
             {"note_id", note_id},
             {"extractor_id", extractor_id},
             {"rev", next_rev(note_id, extractor_id)}};
    append_line(row.dump());
}

void AnnotationStore::append_audit(const AttemptAudit& audit, const std::string& extractor_id) {
    std::lock_guard lock(mutex_);
    json row{{"kind", "audit"},
             {"note_id", audit.note_id},
             {"extractor_id", extractor_id},
             {"query_kind", to_string(audit.query_kind)},
             {"attempt", audit.attempt},
             {"violation_count", audit.violation_count},
             {"latency_ms", audit.latency_ms},
             {"transport_failure", audit.transport_failure}};
    append_line(row.dump());
}

AnnotationStore::Replay AnnotationStore::replay(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open store: " + path.string());

    Replay result;
    struct Live {
        long rev = -1;
        ExtractionRow row;
        size_t first_seen = 0;  // rows keep the key's first-appearance order
    };
    std::map<std::pair<std::string, std::string>, Live> live;

    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);

    for (size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        json row = json::parse(lines[i], nullptr, false);
        if (row.is_discarded() || !row.is_object() || !row.contains("kind")) {
            if (i + 1 == lines.size()) {
                result.warnings.push_back("store: skipped truncated final line");
                break;
            }
            throw std::runtime_error("store corrupt at line " + std::to_string(i + 1) + ": " + path.string());
        }
        std::string kind = row["kind"].get<std::string>();
        if (kind == "audit") {
            ++result.audit_entries;
            continue;
        }
        std::string note_id = row.at("note_id").get<std::string>();
        std::string extractor_id = row.at("extractor_id").get<std::string>();
        long rev = row.at("rev").get<long>();

        ExtractionRow er;
        er.note_id = note_id;
        er.extractor_id = extractor_id;
        if (kind == "record") {
            er.record = row.at("record").get<PhenotypeRecord>();
            for (const auto& q : row.at("failed_queries")) {
                auto parsed = query_kind_from_string(q.get<std::string>());
                if (parsed) er.failed_queries.insert(*parsed);
            }
        } else if (kind != "no_response") {
            throw std::runtime_error("store: unknown row kind '" + kind + "' at line " + std::to_string(i + 1));
        }

        auto key = std::make_pair(note_id, extractor_id);
        auto it = live.find(key);
        if (it == live.end()) {
            live[key] = Live{rev, std::move(er), i};
        } else if (rev >= it->second.rev) {
            it->second.rev = rev;
            it->second.row = std::move(er);
        }
    }

    std::vector<const Live*> ordered;
    for (const auto& [key, value] : live) ordered.push_back(&value);
    std::sort(ordered.begin(), ordered.end(),
              [](const Live* a, const Live* b) { return a->first_seen < b->first_seen; });
    for (const Live* l : ordered) result.rows.push_back(l->row);
    return result;
}

}  // namespace pheno
