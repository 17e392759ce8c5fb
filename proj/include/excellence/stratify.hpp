#pragma once

#include "excellence/corpus.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace excellence {

/// Normalization unit: one subject area in one publication year.
struct StratumKey {
    std::string subject_area;
    int year = 0;

    friend auto operator<=>(const StratumKey&, const StratumKey&) = default;
    friend bool operator==(const StratumKey&, const StratumKey&) = default;
};

/// Top-10% core size for a reference set of n papers: ceil(n / 10), computed exactly.
[[nodiscard]] constexpr std::size_t core_size_for(std::size_t n) noexcept { return (n + 9) / 10; }

struct ThresholdResult {
    std::size_t core_size = 0;
    std::int64_t threshold = 0;
    // Positions into the input list, ascending.
    std::vector<std::size_t> flagged;
};

/**
 * Top-10% selection with inclusive ties.
 *
 * With the list ranked by descending citations, the core is the first
 * ceil(N/10) papers and the threshold is the citation count of the last core
 * paper. Every paper with at least that many citations is flagged, so papers
 * tied with the last core paper join the set. The result depends only on the
 * multiset of counts, never on input order.
 *
 * Throws std::invalid_argument for an empty list or a negative count.
 */
[[nodiscard]] ThresholdResult compute_threshold(std::span<const std::int64_t> citations);

struct Stratum {
    StratumKey key;
    std::vector<std::size_t> members;  // indices into Corpus::papers(), ascending
    std::size_t size = 0;
    std::size_t core_size = 0;
    std::int64_t threshold = 0;
    std::size_t flagged_count = 0;

    [[nodiscard]] double flagged_share() const noexcept {
        return size == 0 ? 0.0 : static_cast<double>(flagged_count) / static_cast<double>(size);
    }
};

/// Partitions (paper, subject area) memberships into strata ordered by key and
/// computes each stratum's threshold. `threads` > 1 splits the per-stratum work;
/// results are identical to the sequential run.
[[nodiscard]] std::vector<Stratum> build_strata(const Corpus& corpus, unsigned threads = 1);

/// Per-paper excellence flags, aligned with Corpus::papers().
class ExcellenceFlagTable {
public:
    ExcellenceFlagTable(const Corpus& corpus, std::vector<bool> flags);

    [[nodiscard]] std::size_t size() const noexcept { return flags_.size(); }
    [[nodiscard]] bool excellent(std::size_t paper_index) const { return flags_.at(paper_index); }
    /// Throws std::out_of_range for an unknown id.
    [[nodiscard]] bool excellent(std::string_view paper_id) const;
    [[nodiscard]] std::size_t excellent_count() const noexcept;
    [[nodiscard]] const Corpus& corpus() const noexcept { return *corpus_; }

private:
    const Corpus* corpus_;
    std::vector<bool> flags_;
};

/// A paper is excellent when it is flagged in at least one of its subject-area strata.
[[nodiscard]] ExcellenceFlagTable flag_papers(const Corpus& corpus, const std::vector<Stratum>& strata);

/// Human-readable notes for strata whose 10% semantics degenerate
/// (fewer than 10 papers, or every paper uncited).
[[nodiscard]] std::vector<std::string> stratum_warnings(const std::vector<Stratum>& strata);

/// CSV `paper_id,excellent` with excellent as 0/1.
void write_flag_table(std::ostream& out, const ExcellenceFlagTable& flags);
/// CSV `subject_area,year,n,core_size,threshold,flagged,flagged_share`.
void write_strata_diagnostics(std::ostream& out, const std::vector<Stratum>& strata);

}  // namespace excellence
