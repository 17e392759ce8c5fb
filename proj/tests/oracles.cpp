#include "oracles.hpp"

#include <cmath>

namespace oracle {

std::vector<bool> top10_flags(const std::vector<std::int64_t>& citations) {
    const std::size_t n = citations.size();
    std::size_t k = 0;
    while (k * 10 < n) ++k;  // smallest k with 10k >= n
    std::vector<bool> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t higher = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (citations[j] > citations[i]) ++higher;
        }
        out[i] = higher < k;
    }
    return out;
}

long double pooled_z(long double n1, long double p1, long double n2, long double p2) {
    const long double t1 = p1 * n1;
    const long double t2 = p2 * n2;
    const long double total_t = t1 + t2;
    const long double total_n = n1 + n2;
    return (t1 * n2 - t2 * n1) * std::sqrt(total_n) / std::sqrt(total_t * (total_n - total_t) * n1 * n2);
}

std::map<std::string, InstitutionCounts> institution_counts(const excellence::Corpus& corpus) {
    const auto& papers = corpus.papers();
    std::map<std::pair<std::string, int>, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < papers.size(); ++i) {
        for (const auto& a : papers[i].subject_areas) strata[{a, papers[i].year}].push_back(i);
    }
    std::vector<bool> excellent(papers.size(), false);
    for (const auto& [key, members] : strata) {
        std::vector<std::int64_t> cites;
        for (auto i : members) cites.push_back(papers[i].citations);
        auto flags = top10_flags(cites);
        for (std::size_t j = 0; j < members.size(); ++j) {
            if (flags[j]) excellent[members[j]] = true;
        }
    }
    std::map<std::string, InstitutionCounts> out;
    for (std::size_t i = 0; i < papers.size(); ++i) {
        for (const auto& inst : papers[i].institutions) {
            ++out[inst].n;
            if (excellent[i]) ++out[inst].t;
        }
    }
    return out;
}

std::vector<std::int64_t> random_stratum(std::mt19937_64& rng, std::size_t max_n, std::int64_t max_citation) {
    std::uniform_int_distribution<std::size_t> size(1, max_n);
    std::uniform_int_distribution<std::int64_t> value(0, max_citation);
    std::vector<std::int64_t> v(size(rng));
    for (auto& c : v) c = value(rng);
    return v;
}

}  // namespace oracle
