#pragma once

#include "excellence/indicator.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace excellence {

/// Expected share of top-10% papers in a randomly drawn set.
inline constexpr double kExpectedShare = 0.10;

/// Two proportions with their sample sizes. The top-10% counts are derived
/// as t = p * n and may be fractional; they are never rounded.
struct ProportionInput {
    std::size_t n1 = 0;
    double p1 = 0.0;
    std::size_t n2 = 0;
    double p2 = 0.0;

    [[nodiscard]] double t1() const noexcept { return p1 * static_cast<double>(n1); }
    [[nodiscard]] double t2() const noexcept { return p2 * static_cast<double>(n2); }

    /// Inputs as printed in a ranking table: output and Excellence Indicator in percent.
    [[nodiscard]] static ProportionInput from_percentages(std::size_t n1, double pct1, std::size_t n2, double pct2);
};

enum class Correction { none, bonferroni };
[[nodiscard]] std::optional<Correction> parse_correction(std::string_view name);
[[nodiscard]] std::string_view to_string(Correction c) noexcept;

struct AdjustedLevel {
    double alpha_effective = 0.05;
    double critical = 1.96;
};

/// Per-test alpha and two-sided critical value for a family of m tests.
/// Throws std::invalid_argument for m == 0 or alpha outside (0, 1).
[[nodiscard]] AdjustedLevel family_wise_adjust(double alpha, std::size_t m, Correction method);

/// Significance levels applied to one test. The primary level is `alpha`
/// (5% by default); the secondary level is fixed at 1%. Both are divided
/// across `comparisons` under Bonferroni.
struct TestLevels {
    double alpha = 0.05;
    std::size_t comparisons = 1;
    Correction correction = Correction::none;
};

struct ProportionTestResult {
    ProportionInput input;
    double z = 0.0;
    double pooled_p = 0.0;
    bool significant_05 = false;
    bool significant_01 = false;
    double alpha_effective = 0.05;
    double critical_05 = 0.0;
    double critical_01 = 0.0;
    int direction = 0;  // sign of p1 - p2
};

/**
 * z-test for two independent proportions with a pooled variance estimate:
 *
 *     p = (t1 + t2) / (n1 + n2)
 *     z = (p1 - p2) / sqrt(p (1 - p) (1/n1 + 1/n2))
 *
 * Two-sided; a result is significant when |z| exceeds the critical value.
 * Throws std::invalid_argument on n < 1 or a proportion outside [0, 1], and
 * NoVariabilityError when the pooled proportion is 0 or 1.
 */
[[nodiscard]] ProportionTestResult two_proportion_z(const ProportionInput& input, const TestLevels& levels = {});

struct ExpectationResult {
    ProportionTestResult test;
    Verdict verdict = Verdict::indistinguishable;
};

/// Observed share against the random expectation, tested as two samples of the
/// same size n with the second proportion fixed at `p_expected`.
[[nodiscard]] ExpectationResult observed_vs_expected(std::size_t n, double p_observed,
                                                     double p_expected = kExpectedShare,
                                                     const TestLevels& levels = {});

[[nodiscard]] Verdict verdict_for(const ProportionTestResult& r) noexcept;

struct PairwiseResult {
    std::string inst_a;
    std::string inst_b;
    std::optional<ProportionTestResult> result;
    std::string error;  // set when the statistic is undefined
};

struct InstitutionExpectation {
    std::string institution_id;
    ExpectationResult result;
};

struct ComparisonSet {
    std::vector<PairwiseResult> pairwise;
    std::vector<InstitutionExpectation> expectation;
    std::size_t tests = 0;
    AdjustedLevel level;
};

struct ComparisonOptions {
    double alpha = 0.05;
    Correction correction = Correction::none;
    double p_expected = kExpectedShare;
};

/// Every pair of eligible institutions (in institution_id order) plus each
/// eligible institution against the expectation. Under Bonferroni the family
/// size is the total number of tests. With fewer than two eligible
/// institutions only the expectation tests are produced.
[[nodiscard]] ComparisonSet compare_all(const std::vector<InstitutionStats>& stats, const ComparisonOptions& options = {});

/// Fills verdict and z for each ranked row; the family is the ranked rows.
void attach_expectation_tests(RankingReport& report, const ComparisonOptions& options = {});

/// CSV `inst_a,inst_b,z,significant_05,significant_01,alpha_effective`.
void write_pairwise_csv(std::ostream& out, const ComparisonSet& set);

}  // namespace excellence
