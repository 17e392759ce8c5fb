#pragma once

// Test-only reference implementations. None of these call into the library
// code paths they are used to check.

#include "excellence/corpus.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace oracle {

/// Literal top-10% definition: a paper is in the set when fewer than
/// ceil(N/10) papers have strictly more citations. O(N^2).
std::vector<bool> top10_flags(const std::vector<std::int64_t>& citations);

/// Pooled two-proportion z from counts, in long double:
/// z = (t1 n2 - t2 n1) sqrt(N) / sqrt(T (N - T) n1 n2), T = t1 + t2, N = n1 + n2.
long double pooled_z(long double n1, long double p1, long double n2, long double p2);

struct InstitutionCounts {
    std::size_t n = 0;
    std::size_t t = 0;
};

/// Brute-force pipeline: strata by (area, year), literal flags, any-stratum rule, full counting.
std::map<std::string, InstitutionCounts> institution_counts(const excellence::Corpus& corpus);

/// Random stratum of citation counts with a tunable number of distinct values.
std::vector<std::int64_t> random_stratum(std::mt19937_64& rng, std::size_t max_n, std::int64_t max_citation);

}  // namespace oracle
