#pragma once

#include "excellence/corpus.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <variant>
#include <vector>

namespace excellence {

/// floor(exp(mu + sigma * Z)), Z standard normal.
struct LogNormalModel {
    double mu = 1.0;
    double sigma = 1.2;
};

/// Negative binomial with r successes and success probability p (gamma-Poisson mixture).
struct NegBinomialModel {
    double r = 1.0;
    double p = 0.5;
};

using CitationModel = std::variant<LogNormalModel, NegBinomialModel>;

struct SynthConfig {
    std::size_t n_institutions = 20;
    std::size_t papers_per_institution = 200;
    std::size_t fields_count = 4;
    int first_year = 2003;
    int last_year = 2007;
    CitationModel citation_model = LogNormalModel{};
    std::uint64_t seed = 1;
};

/// Throws std::invalid_argument describing the first bad field.
void validate(const SynthConfig& config);

/**
 * Random source for the generator: std::mt19937_64 (fully specified by the
 * standard) with the variate transforms implemented here rather than taken
 * from <random>, whose distributions differ between standard libraries.
 */
class SynthRng {
public:
    explicit SynthRng(std::uint64_t seed) : engine_(seed) {}

    double uniform();            // [0, 1), 53 random bits
    double uniform_open();       // (0, 1)
    std::uint64_t below(std::uint64_t bound);  // uniform integer in [0, bound)
    double normal();             // Box-Muller
    double gamma(double shape);  // Marsaglia-Tsang, unit scale
    std::uint64_t poisson(double mean);

private:
    std::mt19937_64 engine_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// Seed for trial `index` of an experiment seeded with `seed` (SplitMix64 mixing).
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/**
 * Null-model corpus. Every institution gets exactly papers_per_institution
 * papers; subject area and year are uniform; citations are drawn i.i.d. from
 * the citation model, so each (field, year) stratum shares one distribution.
 * Institution labels are shuffled onto papers independently of citations.
 */
[[nodiscard]] Corpus generate(const SynthConfig& config);

struct NullExperimentResult {
    std::size_t trials = 0;
    std::size_t institution_tests = 0;
    double mean_excellence_share = 0.0;  // pooled over all institution-tests
    double mean_flagged_share = 0.0;     // flagged memberships / all memberships
    double type1_rate_05 = 0.0;
    double type1_rate_01 = 0.0;
    double tie_inflation = 0.0;  // (flagged - core) / memberships, over all strata and trials

    friend bool operator==(const NullExperimentResult&, const NullExperimentResult&) = default;
};

struct TrialTrace {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::size_t institutions = 0;
    std::size_t papers = 0;
    std::size_t memberships = 0;
    std::size_t core_total = 0;
    std::size_t flagged_total = 0;
    std::size_t top_total = 0;
    std::size_t output_total = 0;
    std::size_t rejections_05 = 0;
    std::size_t rejections_01 = 0;
};

/// Runs `trials` independent generate -> stratify -> flag -> aggregate -> test
/// cycles, each seeded by derive_seed(config.seed, trial). Statistics are
/// accumulated as integer totals, so the result does not depend on `threads`.
/// Throws std::invalid_argument for trials == 0 or an invalid config.
[[nodiscard]] NullExperimentResult run_null_experiment(const SynthConfig& config, std::size_t trials,
                                                       unsigned threads = 1, std::vector<TrialTrace>* trace = nullptr);

void write_experiment_json(std::ostream& out, const SynthConfig& config, const NullExperimentResult& result);
void write_trace_csv(std::ostream& out, const std::vector<TrialTrace>& trace);

}  // namespace excellence
