#include "excellence/sigtest.hpp"

#include "detail/text.hpp"
#include "excellence/errors.hpp"
#include "excellence/normal.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace excellence {

ProportionInput ProportionInput::from_percentages(std::size_t n1, double pct1, std::size_t n2, double pct2) {
    return ProportionInput{n1, pct1 / 100.0, n2, pct2 / 100.0};
}

std::optional<Correction> parse_correction(std::string_view name) {
    if (name == "none") return Correction::none;
    if (name == "bonferroni") return Correction::bonferroni;
    return std::nullopt;
}

std::string_view to_string(Correction c) noexcept {
    return c == Correction::bonferroni ? "bonferroni" : "none";
}

AdjustedLevel family_wise_adjust(double alpha, std::size_t m, Correction method) {
    if (m == 0) throw std::invalid_argument("family_wise_adjust: number of comparisons must be at least 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("family_wise_adjust: alpha must lie in (0, 1)");
    AdjustedLevel level;
    level.alpha_effective = method == Correction::bonferroni ? alpha / static_cast<double>(m) : alpha;
    level.critical = two_sided_critical(level.alpha_effective);
    return level;
}

namespace {

bool valid_proportion(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

}  // namespace

ProportionTestResult two_proportion_z(const ProportionInput& input, const TestLevels& levels) {
    if (input.n1 < 1 || input.n2 < 1) throw std::invalid_argument("two_proportion_z: sample sizes must be at least 1");
    if (!valid_proportion(input.p1) || !valid_proportion(input.p2)) {
        throw std::invalid_argument("two_proportion_z: proportions must lie in [0, 1]");
    }
    const auto primary = family_wise_adjust(levels.alpha, levels.comparisons, levels.correction);
    const auto secondary = family_wise_adjust(0.01, levels.comparisons, levels.correction);

    const double n1 = static_cast<double>(input.n1);
    const double n2 = static_cast<double>(input.n2);
    const double pooled = (input.t1() + input.t2()) / (n1 + n2);
    if (!(pooled > 0.0 && pooled < 1.0)) throw NoVariabilityError();

    ProportionTestResult r;
    r.input = input;
    r.pooled_p = pooled;
    r.z = (input.p1 - input.p2) / std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
    r.alpha_effective = primary.alpha_effective;
    r.critical_05 = primary.critical;
    r.critical_01 = secondary.critical;
    r.significant_05 = std::abs(r.z) > r.critical_05;
    r.significant_01 = std::abs(r.z) > r.critical_01;
    r.direction = (input.p1 > input.p2) - (input.p1 < input.p2);
    return r;
}

Verdict verdict_for(const ProportionTestResult& r) noexcept {
    if (r.z > r.critical_05) return Verdict::above;
    if (r.z < -r.critical_05) return Verdict::below;
    return Verdict::indistinguishable;
}

ExpectationResult observed_vs_expected(std::size_t n, double p_observed, double p_expected, const TestLevels& levels) {
    if (!(p_expected > 0.0 && p_expected < 1.0)) {
        throw std::invalid_argument("observed_vs_expected: expected share must lie in (0, 1)");
    }
    ExpectationResult out;
    out.test = two_proportion_z(ProportionInput{n, p_observed, n, p_expected}, levels);
    out.verdict = verdict_for(out.test);
    return out;
}

ComparisonSet compare_all(const std::vector<InstitutionStats>& stats, const ComparisonOptions& options) {
    std::vector<const InstitutionStats*> eligible;
    for (const auto& s : stats) {
        if (s.eligible) eligible.push_back(&s);
    }
    std::sort(eligible.begin(), eligible.end(),
              [](const InstitutionStats* a, const InstitutionStats* b) { return a->institution_id < b->institution_id; });

    ComparisonSet set;
    const std::size_t k = eligible.size();
    const std::size_t pairs = k >= 2 ? k * (k - 1) / 2 : 0;
    set.tests = pairs + k;
    const TestLevels levels{options.alpha, std::max<std::size_t>(set.tests, 1), options.correction};
    set.level = family_wise_adjust(levels.alpha, levels.comparisons, levels.correction);

    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            PairwiseResult pr{eligible[i]->institution_id, eligible[j]->institution_id, std::nullopt, {}};
            try {
                pr.result = two_proportion_z(ProportionInput{eligible[i]->output_n, eligible[i]->proportion(),
                                                             eligible[j]->output_n, eligible[j]->proportion()},
                                             levels);
            } catch (const NoVariabilityError& e) {
                pr.error = e.what();
            }
            set.pairwise.push_back(std::move(pr));
        }
    }
    for (const auto* s : eligible) {
        set.expectation.push_back(
            {s->institution_id, observed_vs_expected(s->output_n, s->proportion(), options.p_expected, levels)});
    }
    return set;
}

void attach_expectation_tests(RankingReport& report, const ComparisonOptions& options) {
    const TestLevels levels{options.alpha, std::max<std::size_t>(report.ranked.size(), 1), options.correction};
    const auto level = family_wise_adjust(levels.alpha, levels.comparisons, levels.correction);
    report.metadata.alpha = options.alpha;
    report.metadata.correction = std::string(to_string(options.correction));
    report.metadata.alpha_effective = level.alpha_effective;
    for (auto& row : report.ranked) {
        auto r = observed_vs_expected(row.stats.output_n, row.stats.proportion(), options.p_expected, levels);
        row.verdict = r.verdict;
        row.z_vs_expected = r.test.z;
    }
}

void write_pairwise_csv(std::ostream& out, const ComparisonSet& set) {
    out << "inst_a,inst_b,z,significant_05,significant_01,alpha_effective\n";
    for (const auto& p : set.pairwise) {
        out << detail::csv_escape(p.inst_a) << ',' << detail::csv_escape(p.inst_b) << ',';
        if (p.result) {
            out << detail::fixed(p.result->z, 6) << ',' << (p.result->significant_05 ? "true" : "false") << ','
                << (p.result->significant_01 ? "true" : "false") << ',' << detail::fixed(p.result->alpha_effective, 8);
        } else {
            out << "NA,false,false," << detail::fixed(set.level.alpha_effective, 8);
        }
        out << '\n';
    }
}

}  // namespace excellence
