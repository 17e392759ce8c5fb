#pragma once

#include "excellence/corpus.hpp"
#include "excellence/stratify.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace excellence {

struct InstitutionStats {
    std::string institution_id;
    std::size_t output_n = 0;  // papers in the window, full counting
    std::size_t top_t = 0;     // excellent papers among them
    double excellence_pct = 0.0;
    bool eligible = false;

    // Excellence Indicator as a fraction; what the significance tests consume.
    [[nodiscard]] double proportion() const noexcept { return excellence_pct / 100.0; }
    friend bool operator==(const InstitutionStats&, const InstitutionStats&) = default;
};

struct EligibilityRule {
    std::size_t min_output = 100;
    // Require min_output in every corpus year instead of over the whole window.
    bool per_year = false;
};

/// Per-institution counts, sorted by institution_id. A paper counts fully
/// toward every affiliated institution.
[[nodiscard]] std::vector<InstitutionStats> aggregate(const Corpus& corpus, const ExcellenceFlagTable& flags,
                                                      const EligibilityRule& rule = {});

/// Percentage on one decimal, round half away from zero, exact for integer counts.
[[nodiscard]] std::string display_pct(std::size_t top_t, std::size_t output_n);
/// Same rounding applied to an arbitrary percentage.
[[nodiscard]] std::string display_pct(double pct);

enum class Verdict { above, below, indistinguishable, untested };
[[nodiscard]] std::string_view to_string(Verdict v) noexcept;

enum class RankOrder { excellence, output };

struct RankedRow {
    std::size_t rank = 0;  // 1-based
    InstitutionStats stats;
    Verdict verdict = Verdict::untested;
    std::optional<double> z_vs_expected;
};

struct ReportMetadata {
    YearWindow window;
    std::string provenance;
    std::size_t min_output = 100;
    bool per_year_eligibility = false;
    RankOrder order = RankOrder::excellence;
    double alpha = 0.05;
    std::string correction = "none";
    double alpha_effective = 0.05;
    std::vector<std::string> warnings;
};

struct RankingReport {
    std::vector<RankedRow> ranked;
    std::vector<InstitutionStats> appendix;  // ineligible, by institution_id
    ReportMetadata metadata;
};

/**
 * Orders eligible institutions and sets ineligible ones aside.
 *
 * RankOrder::excellence sorts by excellence_pct descending, then output
 * descending, then institution_id ascending. RankOrder::output sorts by output
 * first, as in printed league tables. Percentages are compared
 * as exact fractions so equal ratios (2/10 and 4/20) tie.
 */
[[nodiscard]] RankingReport rank(std::vector<InstitutionStats> stats, RankOrder order = RankOrder::excellence);

}  // namespace excellence
