#include <doctest.h>

#include <random>

#include "pheno/core.hpp"
#include "support/synth.hpp"

using namespace pheno;

TEST_CASE("validate_record flags range violations by field and rule") {
    PhenotypeRecord rec;
    rec.note_id = "N1";
    rec.extractor_id = "baseline";
    rec.extracted_at = "2026-01-01T00:00:00Z";

    SUBCASE("grade out of 1..3") {
        rec.grade_perf.grade = 5;
        auto violations = validate_record(rec);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].field == "grade_perf.grade");
        CHECK(violations[0].rule.find("1..3") != std::string::npos);
    }
    SUBCASE("karnofsky not a multiple of 10") {
        rec.grade_perf.karnofsky = 85;
        auto violations = validate_record(rec);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].field == "grade_perf.karnofsky");
        CHECK(violations[0].rule.find("multiple of 10") != std::string::npos);
    }
    SUBCASE("fully-null phenotypes are valid") { CHECK(validate_record(rec).empty()); }
    SUBCASE("negative tumor size") {
        rec.tumors.push_back(TumorFinding{-1.0, TumorKind::mass, std::nullopt, std::nullopt});
        auto violations = validate_record(rec);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].field == "tumors[0].size_cm");
    }
}

TEST_CASE("canonical JSON round-trips any valid record") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 500; ++i) {
        PhenotypeRecord rec = synth::random_record(rng);
        json j = rec;
        PhenotypeRecord back = j.get<PhenotypeRecord>();
        CHECK(back == rec);
        CHECK(json(back).dump() == j.dump());
    }
}

TEST_CASE("record JSON uses snake_case fields with explicit nulls") {
    PhenotypeRecord rec;
    rec.note_id = "N1";
    rec.extractor_id = "baseline";
    rec.extracted_at = "2026-01-01T00:00:00Z";
    json j = rec;
    CHECK(j.contains("metastatic_breast_flag"));
    CHECK(j["metastatic_breast_flag"].is_null());
    CHECK(j["stage"].is_null());
    CHECK(j["biomarkers"]["er"] == "unknown");
    CHECK(j["tnm"]["t"].is_null());
}

TEST_CASE("dates parse and render ISO-8601") {
    auto d = Date::parse_iso("2021-03-14");
    REQUIRE(d);
    CHECK(d->iso() == "2021-03-14");
    CHECK(!Date::parse_iso("2021-02-30"));
    CHECK(!Date::parse_iso("not a date"));
    CHECK(Date{2021, 3, 1} < Date{2021, 3, 14});
}

TEST_CASE("clinical note JSON rejects empty raw_text") {
    json j{{"patient_id", "P1"},      {"note_id", "N1"}, {"visit_date", "2021-01-01"},
           {"note_kind", "progress"}, {"raw_text", ""}};
    CHECK_THROWS_AS(j.get<ClinicalNote>(), std::invalid_argument);
}
