#include "excellence/corpus.hpp"
#include "excellence/errors.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

using namespace excellence;

namespace {

LoadResult load_csv(const std::string& text, std::optional<YearWindow> window = YearWindow{2003, 2007}) {
    std::istringstream in(text);
    return load_corpus(in, LoadOptions{CorpusFormat::csv, window, "test"});
}

const std::string kHeader = "paper_id,year,subject_areas,citations,institutions\n";

}  // namespace

TEST_CASE("three valid rows load with no rejects") {
    auto r = load_csv(kHeader +
                      "P1,2003,Immunology,12,UCLA\n"
                      "P2,2005,Biochemistry|Immunology,0,Stanford|UCLA\n"
                      "P3,2007,Chemistry,7,Stanford\n");
    CHECK(r.corpus.size() == 3);
    CHECK(r.accepted == 3);
    CHECK(r.rejected.empty());
    CHECK(r.corpus.year_window() == YearWindow{2003, 2007});
}

TEST_CASE("negative citations reject only that record") {
    auto r = load_csv(kHeader +
                      "P1,2003,A,12,X\n"
                      "P2,2004,A,-1,X\n"
                      "P3,2005,A,3,Y\n");
    CHECK(r.corpus.size() == 2);
    REQUIRE(r.rejected.size() == 1);
    CHECK(r.rejected[0].line == 3);
    CHECK(r.rejected[0].paper_id == "P2");
    CHECK(r.rejected[0].reason == "negative citations");
}

TEST_CASE("duplicate paper_id is a hard failure naming the id and both lines") {
    try {
        (void)load_csv(kHeader + "P1,2003,A,1,X\nP2,2003,A,1,X\nP1,2004,B,2,Y\n");
        FAIL("expected DataError");
    } catch (const DataError& e) {
        std::string msg = e.what();
        CHECK(msg.find("'P1'") != std::string::npos);
        CHECK(msg.find("lines 2 and 4") != std::string::npos);
    }
}

TEST_CASE("record-level validation errors carry line numbers and reasons") {
    auto r = load_csv(kHeader +
                      "P1,2003,A,1,X\n"
                      "P2,2003,,1,X\n"           // empty subject areas
                      "P3,2003,A,1,\n"           // empty institutions
                      "P4,2003,A|A,1,X\n"        // duplicate label
                      "P5,2003,A,1.5,X\n"        // non-integer citations
                      "P6,20x3,A,1,X\n"          // malformed year
                      "P7,2003,A,1\n"            // missing field
                      "P8,2010,A,1,X\n"          // outside window
                      ",2003,A,1,X\n"            // missing id
                      "P9,2003,A||B,1,X\n");     // empty label
    CHECK(r.corpus.size() == 1);
    REQUIRE(r.rejected.size() == 9);
    CHECK(r.rejected[0].line == 3);
    CHECK(r.rejected[0].reason == "empty subject_areas");
    CHECK(r.rejected[1].reason == "empty institutions");
    CHECK(r.rejected[2].reason.find("duplicate label 'A'") != std::string::npos);
    CHECK(r.rejected[3].reason == "malformed citations");
    CHECK(r.rejected[4].reason == "malformed year");
    CHECK(r.rejected[5].reason == "expected 5 fields, found 4");
    CHECK(r.rejected[6].reason.find("outside window [2003,2007]") != std::string::npos);
    CHECK(r.rejected[7].reason == "missing paper_id");
    CHECK(r.rejected[8].reason == "empty label in subject_areas");
}

TEST_CASE("empty result set is a hard failure") {
    CHECK_THROWS_AS((void)load_csv(kHeader), DataError);
    CHECK_THROWS_AS((void)load_csv(kHeader + "P1,1999,A,1,X\n"), DataError);
}

TEST_CASE("wrong header is rejected") {
    CHECK_THROWS_AS((void)load_csv("id,year,areas,cites,inst\nP1,2003,A,1,X\n"), DataError);
}

TEST_CASE("missing file names the path") {
    try {
        (void)load_corpus("/nonexistent/corpus.csv", CorpusFormat::csv);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("/nonexistent/corpus.csv") != std::string::npos);
    }
}

TEST_CASE("window defaults to the span of accepted years") {
    auto r = load_csv(kHeader + "P1,1999,A,1,X\nP2,2012,A,1,X\n", std::nullopt);
    CHECK(r.corpus.year_window() == YearWindow{1999, 2012});
}

TEST_CASE("CRLF line endings and a UTF-8 BOM are accepted") {
    auto r = load_csv("\xEF\xBB\xBF" "paper_id,year,subject_areas,citations,institutions\r\nP1,2003,A,1,X\r\n");
    CHECK(r.corpus.size() == 1);
}

TEST_CASE("conformance fixtures load identically from CSV and JSONL") {
    const std::string dir = EXCELLENCE_FIXTURES;
    auto csv = load_corpus(dir + "/conformance.csv", CorpusFormat::csv, YearWindow{2003, 2007});
    auto jsonl = load_corpus(dir + "/conformance.jsonl", CorpusFormat::jsonl, YearWindow{2003, 2007});
    CHECK(csv.corpus == jsonl.corpus);
    CHECK(csv.corpus.size() == 3);
    auto idx = csv.corpus.find("P3,rev");
    REQUIRE(idx);
    CHECK(csv.corpus.papers()[*idx].subject_areas == std::vector<std::string>{"Chemistry \"organic\""});
}

TEST_CASE("JSONL record errors") {
    std::istringstream in(
        R"({"paper_id":"P1","year":2003,"subject_areas":["A"],"citations":1,"institutions":["X"]})"
        "\n"
        R"({"paper_id":"P2","year":2003,"subject_areas":["A"],"citations":-1,"institutions":["X"]})"
        "\n"
        R"({"paper_id":"P3","year":2003,"subject_areas":"A","citations":1,"institutions":["X"]})"
        "\n"
        R"({"paper_id":"P4","year":2003,"subject_areas":["A"],"institutions":["X"]})"
        "\n"
        "not json\n"
        R"({"paper_id":"P6","year":2003,"subject_areas":["A"],"citations":2.5,"institutions":["X"]})"
        "\n");
    auto r = load_corpus(in, LoadOptions{CorpusFormat::jsonl, std::nullopt, "test"});
    CHECK(r.corpus.size() == 1);
    REQUIRE(r.rejected.size() == 5);
    CHECK(r.rejected[0].reason == "negative citations");
    CHECK(r.rejected[1].reason.find("must be an array") != std::string::npos);
    CHECK(r.rejected[2].reason == "missing field 'citations'");
    CHECK(r.rejected[3].reason == "malformed JSON");
    CHECK(r.rejected[4].reason == "malformed citations");
}

TEST_CASE("corpus summary counts") {
    auto r = load_csv(kHeader +
                      "P1,2003,Immunology,12,UCLA\n"
                      "P2,2005,Biochemistry|Immunology,0,Stanford|UCLA\n"
                      "P3,2005,Chemistry,7,Stanford\n");
    auto s = corpus_summary(r.corpus);
    CHECK(s.papers == 3);
    CHECK(s.institutions == 2);
    CHECK(s.subject_areas == 3);
    CHECK(s.papers_per_year == std::map<int, std::size_t>{{2003, 1}, {2005, 2}});
    CHECK(s.citation_total == 19);

    auto one = load_csv(kHeader + "P1,2003,A|B,1,X\n");
    CHECK(corpus_summary(one.corpus).subject_areas == 2);
}

TEST_CASE("Corpus constructor enforces invariants") {
    PaperRecord ok{"P1", 2004, {"A"}, 3, {"X"}};
    CHECK_NOTHROW(Corpus({ok}, {2003, 2007}, ""));
    CHECK_THROWS_AS(Corpus({}, {2003, 2007}, ""), DataError);
    CHECK_THROWS_AS(Corpus({ok, ok}, {2003, 2007}, ""), DataError);
    CHECK_THROWS_AS(Corpus({ok}, {2005, 2007}, ""), DataError);
    auto bad = ok;
    bad.citations = -2;
    CHECK_THROWS_AS(Corpus({bad}, {2003, 2007}, ""), DataError);
}

TEST_CASE("property: loading is order-independent and write/load round-trips") {
    std::mt19937_64 rng(7);
    std::vector<std::string> rows;
    for (int i = 0; i < 200; ++i) {
        std::string areas = (i % 3 == 0) ? "B|A" : "A";
        std::string insts = (i % 5 == 0) ? "Y|X,Z" : "X";
        rows.push_back("P" + std::to_string(i) + "," + std::to_string(2003 + i % 5) + "," + areas + "," +
                       std::to_string(rng() % 50) + ",\"" + insts + "\"\n");
    }
    auto base = load_csv(kHeader + [&] {
        std::string s;
        for (auto& r : rows) s += r;
        return s;
    }());
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(rows.begin(), rows.end(), rng);
        std::string text = kHeader;
        for (auto& r : rows) text += r;
        auto permuted = load_csv(text);
        CHECK(permuted.corpus == base.corpus);
        CHECK(corpus_summary(permuted.corpus) == corpus_summary(base.corpus));
    }

    for (auto format : {CorpusFormat::csv, CorpusFormat::jsonl}) {
        std::stringstream buf;
        write_corpus(buf, base.corpus, format);
        auto again = load_corpus(buf, LoadOptions{format, base.corpus.year_window(), ""});
        CHECK(again.rejected.empty());
        CHECK(again.corpus == base.corpus);
    }
}
