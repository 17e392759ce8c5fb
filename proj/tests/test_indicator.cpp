#include "excellence/indicator.hpp"
#include "excellence/synth.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace excellence;

namespace {

InstitutionStats stats(std::string id, std::size_t n, std::size_t t, bool eligible = true) {
    return InstitutionStats{std::move(id), n, t, 100.0 * static_cast<double>(t) / static_cast<double>(n), eligible};
}

std::vector<std::string> order_of(const RankingReport& r) {
    std::vector<std::string> ids;
    for (const auto& row : r.ranked) ids.push_back(row.stats.institution_id);
    return ids;
}

}  // namespace

TEST_CASE("aggregate: ratios, zero share and full counting") {
    std::vector<PaperRecord> ps;
    // X: 10 papers, the two most cited are flagged in a 20-paper field.
    for (int i = 0; i < 10; ++i) ps.push_back({"X" + std::to_string(i), 2005, {"A"}, 100 + i, {"X"}});
    for (int i = 0; i < 8; ++i) ps.push_back({"Z" + std::to_string(i), 2005, {"A"}, i, {"Z"}});
    ps.push_back({"J1", 2005, {"A"}, 8, {"X", "Y"}});
    ps.push_back({"J2", 2005, {"B"}, 5, {"X", "Y"}});  // alone in B, so flagged
    Corpus corpus(ps, {2005, 2005}, "");
    auto flags = flag_papers(corpus, build_strata(corpus));
    auto out = aggregate(corpus, flags, EligibilityRule{1, false});
    REQUIRE(out.size() == 3);
    CHECK(out[0].institution_id == "X");
    CHECK(out[0].output_n == 12);
    CHECK(out[0].top_t == 3);  // X8, X9 in A plus J2 in B
    CHECK(out[0].excellence_pct == doctest::Approx(25.0));
    CHECK(out[1].institution_id == "Y");
    CHECK(out[1].output_n == 2);
    CHECK(out[1].top_t == 1);
    CHECK(out[2].institution_id == "Z");
    CHECK(out[2].top_t == 0);
    CHECK(out[2].excellence_pct == 0.0);

    // sum of top_t exceeds flagged papers by the multi-institution flagged paper
    std::size_t sum_t = 0;
    for (const auto& s : out) sum_t += s.top_t;
    CHECK(sum_t == flags.excellent_count() + 1);
}

TEST_CASE("aggregate: 10 papers with 2 flagged gives 20%") {
    std::vector<PaperRecord> ps;
    for (int i = 0; i < 10; ++i) ps.push_back({"P" + std::to_string(i), 2005, {i < 5 ? "A" : "B"}, i, {"X"}});
    Corpus corpus(ps, {2005, 2005}, "");
    auto out = aggregate(corpus, flag_papers(corpus, build_strata(corpus)), EligibilityRule{100, false});
    REQUIRE(out.size() == 1);
    CHECK(out[0].top_t == 2);
    CHECK(out[0].excellence_pct == doctest::Approx(20.0));
    CHECK_FALSE(out[0].eligible);
}

TEST_CASE("per-year eligibility requires the minimum in every year") {
    std::vector<PaperRecord> ps;
    for (int i = 0; i < 6; ++i) ps.push_back({"A" + std::to_string(i), 2004 + i % 2, {"F"}, i, {"Even"}});
    for (int i = 0; i < 6; ++i) ps.push_back({"B" + std::to_string(i), 2004 + (i < 5 ? 0 : 1), {"F"}, i, {"Skewed"}});
    Corpus corpus(ps, {2004, 2005}, "");
    auto flags = flag_papers(corpus, build_strata(corpus));
    auto window = aggregate(corpus, flags, EligibilityRule{3, false});
    CHECK(window[0].eligible);
    CHECK(window[1].eligible);
    auto yearly = aggregate(corpus, flags, EligibilityRule{3, true});
    CHECK(yearly[0].eligible);
    CHECK_FALSE(yearly[1].eligible);
}

TEST_CASE("rank ordering and tie-breaks") {
    SUBCASE("by percentage") {
        auto r = rank({stats("B", 1000, 289), stats("A", 1000, 291)});
        CHECK(order_of(r) == std::vector<std::string>{"A", "B"});
        CHECK(r.ranked[0].rank == 1);
        CHECK(r.ranked[1].rank == 2);
    }
    SUBCASE("equal percentage broken by output, then id") {
        auto r = rank({stats("B", 400, 80), stats("A", 500, 100), stats("C", 500, 100)});
        CHECK(order_of(r) == std::vector<std::string>{"A", "C", "B"});
    }
    SUBCASE("ineligible institutions go to the appendix") {
        auto r = rank({stats("A", 50, 10, false), stats("B", 200, 10)});
        CHECK(order_of(r) == std::vector<std::string>{"B"});
        REQUIRE(r.appendix.size() == 1);
        CHECK(r.appendix[0].institution_id == "A");
    }
    SUBCASE("output order puts the largest producers first") {
        auto r = rank({stats("A", 100, 50), stats("B", 300, 3)}, RankOrder::output);
        CHECK(order_of(r) == std::vector<std::string>{"B", "A"});
    }
}

TEST_CASE("property: ranking is a deterministic total order") {
    std::mt19937_64 rng(17);
    std::vector<InstitutionStats> base;
    for (int i = 0; i < 60; ++i) {
        const std::size_t n = 100 + rng() % 5;
        base.push_back(stats("I" + std::to_string(i), n, rng() % (n / 4), rng() % 7 != 0));
    }
    const auto expected = rank(base);
    for (int trial = 0; trial < 20; ++trial) {
        std::shuffle(base.begin(), base.end(), rng);
        auto r = rank(base);
        CHECK(order_of(r) == order_of(expected));
        REQUIRE(r.appendix.size() == expected.appendix.size());
        for (std::size_t i = 0; i < r.appendix.size(); ++i) {
            CHECK(r.appendix[i].institution_id == expected.appendix[i].institution_id);
        }
    }
}

TEST_CASE("display rounding is one decimal, half away from zero") {
    CHECK(display_pct(289, 1000) == "28.9");
    CHECK(display_pct(1, 8) == "12.5");
    CHECK(display_pct(1, 16) == "6.3");      // 6.25 rounds up
    CHECK(display_pct(1, 3) == "33.3");
    CHECK(display_pct(2, 3) == "66.7");
    CHECK(display_pct(0, 7) == "0.0");
    CHECK(display_pct(7, 7) == "100.0");
    CHECK(display_pct(10980, 37994) == "28.9");
    CHECK(display_pct(12.25) == "12.3");
    CHECK(display_pct(-0.04) == "0.0");
}

TEST_CASE("property: aggregate matches the brute-force pipeline and stays on scale") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SynthConfig cfg;
        cfg.n_institutions = 12;
        cfg.papers_per_institution = 60;
        cfg.fields_count = 3;
        cfg.citation_model = LogNormalModel{0.5, 1.0};
        cfg.seed = seed;
        auto corpus = generate(cfg);
        auto out = aggregate(corpus, flag_papers(corpus, build_strata(corpus)), EligibilityRule{1, false});
        auto expected = oracle::institution_counts(corpus);
        REQUIRE(out.size() == expected.size());
        for (const auto& s : out) {
            CHECK(s.output_n == expected.at(s.institution_id).n);
            CHECK(s.top_t == expected.at(s.institution_id).t);
            CHECK(s.excellence_pct >= 0.0);
            CHECK(s.excellence_pct <= 100.0);
        }
    }
}
