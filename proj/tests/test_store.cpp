#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <thread>
#include <unistd.h>

#include "pheno/store.hpp"
#include "support/synth.hpp"

using namespace pheno;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("pheno_store_test_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

PhenotypeRecord make_record(const std::string& note_id, const std::string& extractor, std::optional<Stage> stage) {
    PhenotypeRecord rec;
    rec.note_id = note_id;
    rec.extractor_id = extractor;
    rec.extracted_at = "2026-01-01T00:00:00Z";
    rec.stage = stage;
    return rec;
}

}  // namespace

TEST_CASE("records round-trip through the store") {
    TempDir dir;
    fs::path path = dir.path / "store.jsonl";
    {
        AnnotationStore store(path);
        store.append_record(make_record("N1", "baseline", Stage::IIB), {QueryKind::tumor_info});
        store.append_no_response("N2", "baseline");
    }
    auto replay = AnnotationStore::replay(path);
    REQUIRE(replay.rows.size() == 2);
    CHECK(replay.rows[0].note_id == "N1");
    REQUIRE(replay.rows[0].record);
    CHECK(replay.rows[0].record->stage == Stage::IIB);
    CHECK(replay.rows[0].failed_queries == std::set<QueryKind>{QueryKind::tumor_info});
    CHECK(!replay.rows[1].record);
    CHECK(replay.warnings.empty());
}

TEST_CASE("re-running a note supersedes its earlier record") {
    TempDir dir;
    fs::path path = dir.path / "store.jsonl";
    {
        AnnotationStore store(path);
        store.append_record(make_record("N1", "baseline", Stage::I));
        store.append_record(make_record("N1", "baseline", Stage::IIB));
        store.append_record(make_record("N1", "mock-llm", Stage::IV));
    }
    auto replay = AnnotationStore::replay(path);
    REQUIRE(replay.rows.size() == 2);  // one live row per (note, extractor)
    CHECK(replay.rows[0].extractor_id == "baseline");
    CHECK(replay.rows[0].record->stage == Stage::IIB);
    CHECK(replay.rows[1].extractor_id == "mock-llm");

    // reopening continues the revision sequence
    {
        AnnotationStore store(path);
        store.append_record(make_record("N1", "baseline", Stage::IIIA));
    }
    auto replay2 = AnnotationStore::replay(path);
    REQUIRE(replay2.rows.size() == 2);
    CHECK(replay2.rows[0].record->stage == Stage::IIIA);
}

TEST_CASE("audit entries are stored but do not become rows") {
    TempDir dir;
    fs::path path = dir.path / "store.jsonl";
    {
        AnnotationStore store(path);
        AttemptAudit audit;
        audit.note_id = "N1";
        audit.query_kind = QueryKind::biomarkers;
        audit.attempt = 1;
        audit.violation_count = 2;
        audit.latency_ms = 3.5;
        store.append_audit(audit, "mock-llm");
        store.append_record(make_record("N1", "mock-llm", Stage::IIB));
    }
    auto replay = AnnotationStore::replay(path);
    CHECK(replay.audit_entries == 1);
    CHECK(replay.rows.size() == 1);
}

TEST_CASE("a truncated final line is skipped with a warning") {
    TempDir dir;
    fs::path path = dir.path / "store.jsonl";
    {
        AnnotationStore store(path);
        store.append_record(make_record("N1", "baseline", Stage::IIB));
        store.append_record(make_record("N2", "baseline", Stage::I));
    }
    {
        std::ofstream out(path, std::ios::app);
        out << "{\"kind\": \"record\", \"note_id\": \"N3\"";  // crash mid-write
    }
    auto replay = AnnotationStore::replay(path);
    REQUIRE(replay.rows.size() == 2);
    REQUIRE(replay.warnings.size() == 1);
    CHECK(replay.warnings[0].find("truncated") != std::string::npos);
}

TEST_CASE("appends after a crash start on a fresh line") {
    TempDir dir;
    fs::path path = dir.path / "store.jsonl";
    {
        AnnotationStore store(path);
        store.append_record(make_record("N1", "baseline", Stage::IIB));
    }
    {
        std::ofstream out(path, std::ios::app);
        out << "{\"kind\": \"record\", \"note_id\": \"N2\"";  // no trailing newline
    }
    {
        AnnotationStore store(path);  // must not glue onto the partial line
        store.append_record(make_record("N3", "baseline", Stage::I));
    }
    auto replay = AnnotationStore::replay(path);
    REQUIRE(replay.rows.size() == 2);
    CHECK(replay.rows[0].note_id == "N1");
    CHECK(replay.rows[1].note_id == "N3");
    CHECK(replay.warnings.empty());  // the partial line was truncated away on reopen
}

TEST_CASE("corruption before the final line is an error") {
    TempDir dir;
    fs::path path = dir.path / "store.jsonl";
    {
        AnnotationStore store(path);
        store.append_record(make_record("N1", "baseline", Stage::IIB));
    }
    {
        std::ofstream out(path, std::ios::app);
        out << "garbage line\n";
        out << nlohmann::json{{"kind", "no_response"}, {"note_id", "N2"}, {"extractor_id", "baseline"}, {"rev", 0}}
                   .dump()
            << "\n";
    }
    CHECK_THROWS_AS(AnnotationStore::replay(path), std::runtime_error);
}

TEST_CASE("concurrent appends keep the file valid") {
    TempDir dir;
    fs::path path = dir.path / "store.jsonl";
    {
        AnnotationStore store(path);
        std::vector<std::thread> threads;
        for (int t = 0; t < 4; ++t) {
            threads.emplace_back([&store, t] {
                for (int i = 0; i < 50; ++i)
                    store.append_record(make_record("N" + std::to_string(t) + "_" + std::to_string(i), "baseline",
                                                    Stage::IIB));
            });
        }
        for (auto& thread : threads) thread.join();
    }
    auto replay = AnnotationStore::replay(path);
    CHECK(replay.rows.size() == 200);
    CHECK(replay.warnings.empty());
}
