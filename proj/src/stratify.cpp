#include "excellence/stratify.hpp"

#include "detail/text.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace excellence {

ThresholdResult compute_threshold(std::span<const std::int64_t> citations) {
    if (citations.empty()) throw std::invalid_argument("compute_threshold: empty stratum");
    if (std::any_of(citations.begin(), citations.end(), [](std::int64_t c) { return c < 0; })) {
        throw std::invalid_argument("compute_threshold: negative citation count");
    }
    ThresholdResult r;
    r.core_size = core_size_for(citations.size());

    std::vector<std::int64_t> sorted(citations.begin(), citations.end());
    auto kth = sorted.begin() + static_cast<std::ptrdiff_t>(r.core_size - 1);
    std::nth_element(sorted.begin(), kth, sorted.end(), std::greater<>{});
    r.threshold = *kth;

    for (std::size_t i = 0; i < citations.size(); ++i) {
        if (citations[i] >= r.threshold) r.flagged.push_back(i);
    }
    return r;
}

namespace {

void fill_threshold(Stratum& s, const Corpus& corpus) {
    std::vector<std::int64_t> counts;
    counts.reserve(s.members.size());
    for (auto idx : s.members) counts.push_back(corpus.papers()[idx].citations);
    auto r = compute_threshold(counts);
    s.size = counts.size();
    s.core_size = r.core_size;
    s.threshold = r.threshold;
    s.flagged_count = r.flagged.size();
}

}  // namespace

std::vector<Stratum> build_strata(const Corpus& corpus, unsigned threads) {
    std::map<StratumKey, std::vector<std::size_t>> groups;
    const auto& papers = corpus.papers();
    for (std::size_t i = 0; i < papers.size(); ++i) {
        for (const auto& area : papers[i].subject_areas) {
            groups[StratumKey{area, papers[i].year}].push_back(i);
        }
    }

    std::vector<Stratum> strata;
    strata.reserve(groups.size());
    for (auto& [key, members] : groups) {
        Stratum s;
        s.key = key;
        s.members = std::move(members);
        strata.push_back(std::move(s));
    }

    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(strata.size())));
    if (threads == 1) {
        for (auto& s : strata) fill_threshold(s, corpus);
        return strata;
    }
    // Each worker owns a strided subset; strata are independent.
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < threads; ++w) {
        workers.emplace_back([&, w] {
            for (std::size_t i = w; i < strata.size(); i += threads) fill_threshold(strata[i], corpus);
        });
    }
    workers.clear();
    return strata;
}

ExcellenceFlagTable::ExcellenceFlagTable(const Corpus& corpus, std::vector<bool> flags)
    : corpus_(&corpus), flags_(std::move(flags)) {
    if (flags_.size() != corpus.size()) throw std::invalid_argument("flag table does not cover the corpus");
}

bool ExcellenceFlagTable::excellent(std::string_view paper_id) const {
    auto idx = corpus_->find(paper_id);
    if (!idx) throw std::out_of_range("unknown paper_id '" + std::string(paper_id) + "'");
    return flags_[*idx];
}

std::size_t ExcellenceFlagTable::excellent_count() const noexcept {
    return static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), true));
}

ExcellenceFlagTable flag_papers(const Corpus& corpus, const std::vector<Stratum>& strata) {
    std::vector<bool> flags(corpus.size(), false);
    for (const auto& s : strata) {
        for (auto idx : s.members) {
            if (corpus.papers()[idx].citations >= s.threshold) flags[idx] = true;
        }
    }
    return ExcellenceFlagTable(corpus, std::move(flags));
}

std::vector<std::string> stratum_warnings(const std::vector<Stratum>& strata) {
    std::vector<std::string> out;
    for (const auto& s : strata) {
        auto name = "stratum (" + s.key.subject_area + ", " + std::to_string(s.key.year) + ")";
        if (s.size < 10) {
            out.push_back(name + " has only " + std::to_string(s.size) +
                          " papers; the top-10% core degenerates to a single paper");
        }
        if (s.threshold == 0) {
            out.push_back(name + " has a zero citation threshold; " + std::to_string(s.flagged_count) + " of " +
                          std::to_string(s.size) + " papers flagged through ties");
        }
    }
    return out;
}

void write_flag_table(std::ostream& out, const ExcellenceFlagTable& flags) {
    out << "paper_id,excellent\n";
    const auto& papers = flags.corpus().papers();
    for (std::size_t i = 0; i < papers.size(); ++i) {
        out << detail::csv_escape(papers[i].paper_id) << ',' << (flags.excellent(i) ? 1 : 0) << '\n';
    }
}

void write_strata_diagnostics(std::ostream& out, const std::vector<Stratum>& strata) {
    out << "subject_area,year,n,core_size,threshold,flagged,flagged_share\n";
    for (const auto& s : strata) {
        out << detail::csv_escape(s.key.subject_area) << ',' << s.key.year << ',' << s.size << ',' << s.core_size << ',' << s.threshold
            << ',' << s.flagged_count << ',' << detail::fixed(s.flagged_share(), 6) << '\n';
    }
}

}  // namespace excellence
