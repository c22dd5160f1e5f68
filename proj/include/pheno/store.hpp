#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "pheno/evaluate.hpp"
#include "pheno/llm.hpp"

namespace pheno {

/// Append-only JSON-lines annotation store. Rows carry a per-key revision
/// ("rev") as the supersede marker: replay keeps the highest revision per
/// (note_id, extractor_id). Appends are flushed per line and serialized, so
/// the file is valid JSON-lines at every commit point; a truncated final line
/// is skipped on read with a warning.
class AnnotationStore {
public:
    explicit AnnotationStore(std::filesystem::path path);

    void append_record(const PhenotypeRecord& rec, const std::vector<QueryKind>& failed_queries = {});
    void append_no_response(const std::string& note_id, const std::string& extractor_id);
    void append_audit(const AttemptAudit& audit, const std::string& extractor_id);

    const std::filesystem::path& path() const { return path_; }

    struct Replay {
        std::vector<ExtractionRow> rows;        // one live row per (note_id, extractor_id), file order
        long audit_entries = 0;
        std::vector<std::string> warnings;
    };

    /// Replays a store file, applying supersede markers. Throws on corruption
    /// anywhere except a truncated final line.
    static Replay replay(const std::filesystem::path& path);

private:
    long next_rev(const std::string& note_id, const std::string& extractor_id);
    void append_line(const std::string& line);

    std::filesystem::path path_;
    std::ofstream out_;
    std::mutex mutex_;
    std::map<std::pair<std::string, std::string>, long> revs_;
};

}  // namespace pheno
