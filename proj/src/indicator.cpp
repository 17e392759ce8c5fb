#include "excellence/indicator.hpp"

#include "detail/text.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace excellence {

std::vector<InstitutionStats> aggregate(const Corpus& corpus, const ExcellenceFlagTable& flags,
                                        const EligibilityRule& rule) {
    struct Tally {
        std::size_t n = 0;
        std::size_t t = 0;
        std::map<int, std::size_t> per_year;
    };
    std::map<std::string, Tally> tallies;
    std::set<int> years;
    const auto& papers = corpus.papers();
    for (std::size_t i = 0; i < papers.size(); ++i) {
        const bool excellent = flags.excellent(i);
        years.insert(papers[i].year);
        for (const auto& inst : papers[i].institutions) {
            auto& tally = tallies[inst];
            ++tally.n;
            ++tally.per_year[papers[i].year];
            if (excellent) ++tally.t;
        }
    }

    std::vector<InstitutionStats> out;
    out.reserve(tallies.size());
    for (const auto& [id, tally] : tallies) {
        InstitutionStats s;
        s.institution_id = id;
        s.output_n = tally.n;
        s.top_t = tally.t;
        s.excellence_pct = 100.0 * static_cast<double>(tally.t) / static_cast<double>(tally.n);
        if (rule.per_year) {
            s.eligible = std::all_of(years.begin(), years.end(), [&](int y) {
                auto it = tally.per_year.find(y);
                return it != tally.per_year.end() && it->second >= rule.min_output;
            });
        } else {
            s.eligible = tally.n >= rule.min_output;
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::string display_pct(std::size_t top_t, std::size_t output_n) {
    if (output_n == 0) return "0.0";
    // tenths of a percent, rounded half up on the exact fraction 1000 t / n
    const std::uint64_t n = output_n;
    const std::uint64_t tenths = (2000 * static_cast<std::uint64_t>(top_t) + n) / (2 * n);
    return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

std::string display_pct(double pct) {
    double r = std::round(pct * 10.0) / 10.0;
    if (r == 0.0) r = 0.0;  // drop negative zero
    return detail::fixed(r, 1);
}

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::above: return "above";
        case Verdict::below: return "below";
        case Verdict::indistinguishable: return "indistinguishable";
        case Verdict::untested: return "untested";
    }
    return "untested";
}

namespace {

// Sign of t_a/n_a - t_b/n_b without floating point.
int compare_ratio(const InstitutionStats& a, const InstitutionStats& b) {
    const auto lhs = static_cast<std::uint64_t>(a.top_t) * b.output_n;
    const auto rhs = static_cast<std::uint64_t>(b.top_t) * a.output_n;
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

}  // namespace

RankingReport rank(std::vector<InstitutionStats> stats, RankOrder order) {
    RankingReport report;
    report.metadata.order = order;
    std::vector<InstitutionStats> eligible;
    for (auto& s : stats) {
        (s.eligible ? eligible : report.appendix).push_back(std::move(s));
    }

    auto by_excellence = [](const InstitutionStats& a, const InstitutionStats& b) {
        if (int c = compare_ratio(a, b); c != 0) return c > 0;
        if (a.output_n != b.output_n) return a.output_n > b.output_n;
        return a.institution_id < b.institution_id;
    };
    auto by_output = [](const InstitutionStats& a, const InstitutionStats& b) {
        if (a.output_n != b.output_n) return a.output_n > b.output_n;
        if (int c = compare_ratio(a, b); c != 0) return c > 0;
        return a.institution_id < b.institution_id;
    };
    if (order == RankOrder::excellence) {
        std::sort(eligible.begin(), eligible.end(), by_excellence);
    } else {
        std::sort(eligible.begin(), eligible.end(), by_output);
    }
    std::sort(report.appendix.begin(), report.appendix.end(),
              [](const InstitutionStats& a, const InstitutionStats& b) { return a.institution_id < b.institution_id; });

    report.ranked.reserve(eligible.size());
    for (std::size_t i = 0; i < eligible.size(); ++i) {
        report.ranked.push_back(RankedRow{i + 1, std::move(eligible[i]), Verdict::untested, std::nullopt});
    }
    return report;
}

}  // namespace excellence
