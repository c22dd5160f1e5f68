#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "pheno/preprocess.hpp"
#include "pheno/tokenize.hpp"
#include "support/synth.hpp"

using namespace pheno;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    if (text.empty()) return out;
    std::string line;
    std::stringstream ss(text);
    while (std::getline(ss, line)) out.push_back(line);
    if (!text.empty() && text.back() == '\n') out.push_back("");
    return out;
}

ClinicalNote note(std::string patient, std::string id, Date date, std::string text) {
    return ClinicalNote{std::move(patient), std::move(id), date, NoteKind::progress, std::move(text)};
}

}  // namespace

TEST_CASE("strip_sections removes configured blocks up to the next header") {
    SectionFilterConfig cfg;
    std::string text = "HISTORY:\nbreast cancer 2019\nALLERGIES:\npenicillin\nsulfa drugs\nASSESSMENT:\nstable\n";
    auto result = strip_sections(text, cfg);
    CHECK(result.clean_text.find("penicillin") == std::string::npos);
    CHECK(result.clean_text.find("sulfa") == std::string::npos);
    CHECK(result.clean_text.find("ASSESSMENT:") != std::string::npos);
    CHECK(result.clean_text.find("stable") != std::string::npos);
    CHECK(result.clean_text.find("breast cancer 2019") != std::string::npos);
    REQUIRE(result.removed.size() == 1);
    CHECK(result.removed[0] == "allergies");
}

TEST_CASE("strip_sections is the identity without configured headers") {
    SectionFilterConfig cfg;
    std::string text = "ASSESSMENT:\nstable disease\nPLAN:\ncontinue therapy";
    auto result = strip_sections(text, cfg);
    CHECK(result.clean_text == text);
    CHECK(result.removed.empty());
}

TEST_CASE("strip_sections drops non-ASCII bytes") {
    SectionFilterConfig cfg;
    auto result = strip_sections("tumor 2cm \xE2\x88\x85", cfg);
    CHECK(result.clean_text == "tumor 2cm ");
}

TEST_CASE("strip_sections matches inline header form and mixed case") {
    SectionFilterConfig cfg;
    auto result = strip_sections("Allergies: penicillin\nPLAN:\nfollow up", cfg);
    CHECK(result.clean_text.find("penicillin") == std::string::npos);
    CHECK(result.clean_text.find("follow up") != std::string::npos);
    auto vitals = strip_sections("VITAL SIGNS:\nBP 120/80\n", cfg);
    CHECK(vitals.removed == std::vector<std::string>{"vital signs"});
}

TEST_CASE("rm_dups removes lines duplicated from the previous note") {
    CHECK(rm_dups("a\nb\nc", "b\nc\nd") == "d");
    CHECK(rm_dups("", "x\ny") == "x\ny");
    CHECK(rm_dups("x\ny", "x\ny") == "");
    CHECK(rm_dups("  a  \nb", "a\nc") == "c");  // trimmed comparison
}

TEST_CASE("rm_dups identity and annihilation laws hold on random text") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i) {
        std::string t = synth::filler_paragraphs(rng, 30);
        CHECK(rm_dups(t, t) == "");
        CHECK(rm_dups("", t) == t);
    }
}

TEST_CASE("process_differential keeps the first note of each patient whole") {
    SectionFilterConfig cfg;
    auto out = process_differential({note("P1", "N1", {2021, 1, 1}, "line one\nline two")}, cfg);
    REQUIRE(out.size() == 1);
    CHECK(out[0].diff_text == "line one\nline two");
    CHECK(out[0].token_count == count_tokens(out[0].diff_text));
}

TEST_CASE("process_differential empties fully duplicated successors") {
    SectionFilterConfig cfg;
    std::string text = "stable disease\ncontinue plan";
    auto out = process_differential({note("P1", "N1", {2021, 1, 1}, text), note("P1", "N2", {2021, 1, 2}, text),
                                     note("P1", "N3", {2021, 1, 3}, text)},
                                    cfg);
    REQUIRE(out.size() == 3);
    CHECK(out[0].diff_text == text);
    CHECK(out[1].diff_text == "");
    CHECK(out[2].diff_text == "");
}

TEST_CASE("process_differential falls back to the note two back") {
    // note2 shares nothing with note1; note3 duplicates note1's lines, so the
    // r-1 pass removes nothing and the r-2 pass must kick in
    SectionFilterConfig cfg;
    auto out = process_differential(
        {note("P1", "N1", {2021, 1, 1}, "alpha history\nbeta findings"),
         note("P1", "N2", {2021, 1, 2}, "gamma review\ndelta plan"),
         note("P1", "N3", {2021, 1, 3}, "alpha history\nepsilon update")},
        cfg);
    REQUIRE(out.size() == 3);
    CHECK(out[0].diff_text == "alpha history\nbeta findings");
    CHECK(out[1].diff_text == "gamma review\ndelta plan");
    CHECK(out[2].diff_text == "epsilon update");
}

TEST_CASE("the r-2 fallback never crosses a patient boundary") {
    SectionFilterConfig cfg;
    auto out = process_differential(
        {note("P1", "N1", {2021, 1, 1}, "shared line\nother"),
         note("P2", "N2", {2021, 1, 2}, "unrelated text"),
         note("P2", "N3", {2021, 1, 3}, "shared line\nnew for p2")},
        cfg);
    // N3's r-1 (N2) removes nothing; r-2 (N1) belongs to P1 and must not apply
    CHECK(out[2].diff_text == "shared line\nnew for p2");
}

TEST_CASE("process_differential rejects unsorted input") {
    SectionFilterConfig cfg;
    CHECK_THROWS_AS(process_differential({note("P2", "N1", {2021, 1, 1}, "x"), note("P1", "N2", {2021, 1, 2}, "y")},
                                         cfg),
                    std::invalid_argument);
    CHECK_THROWS_AS(process_differential({note("P1", "N1", {2021, 2, 1}, "x"), note("P1", "N2", {2021, 1, 2}, "y")},
                                         cfg),
                    std::invalid_argument);
}

TEST_CASE("per-patient results are independent of other patients") {
    SectionFilterConfig cfg;
    std::vector<ClinicalNote> p1 = {note("P1", "N1", {2021, 1, 1}, "a\nb"), note("P1", "N2", {2021, 1, 2}, "b\nc")};
    std::vector<ClinicalNote> both = p1;
    both.push_back(note("P2", "N3", {2021, 1, 1}, "a\nb"));
    both.push_back(note("P2", "N4", {2021, 1, 2}, "z"));

    auto alone = process_differential(p1, cfg);
    auto mixed = process_differential(both, cfg);
    CHECK(alone[0].diff_text == mixed[0].diff_text);
    CHECK(alone[1].diff_text == mixed[1].diff_text);
    CHECK(mixed[2].diff_text == "a\nb");  // first note of P2 is kept whole
}

TEST_CASE("diff lines are always a subsequence of the current note's lines") {
    std::mt19937_64 rng(11);
    SectionFilterConfig cfg;
    for (int i = 0; i < 1000; ++i) {
        std::string prev = synth::filler_paragraphs(rng, 40);
        std::string curr = synth::filler_paragraphs(rng, 40);
        // splice some shared lines in
        if (i % 2) curr = prev.substr(0, prev.size() / 2) + curr;
        std::string diff = rm_dups(prev, curr);

        auto diff_lines = lines_of(diff);
        auto curr_lines = lines_of(curr);
        size_t pos = 0;
        bool subsequence = true;
        for (const auto& line : diff_lines) {
            while (pos < curr_lines.size() && curr_lines[pos] != line) ++pos;
            if (pos == curr_lines.size()) {
                subsequence = false;
                break;
            }
            ++pos;
        }
        CHECK(subsequence);
    }
}
