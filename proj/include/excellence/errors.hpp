#pragma once

#include <stdexcept>
#include <string>

namespace excellence {

// Input data that cannot be turned into a valid corpus or statistics table.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The pooled proportion is 0 or 1, so the z statistic has a zero denominator.
class NoVariabilityError : public std::domain_error {
public:
    NoVariabilityError()
        : std::domain_error("no variability: pooled proportion is 0 or 1, z statistic undefined") {}
};

}  // namespace excellence
