#pragma once

namespace excellence {

/// Standard normal CDF.
[[nodiscard]] double normal_cdf(double x) noexcept;

/// Inverse standard normal CDF for p in (0, 1); throws std::domain_error otherwise.
/// Rational approximation (Acklam) polished with one Halley step, absolute error well below 1e-9.
[[nodiscard]] double normal_quantile(double p);

/// Two-sided critical value: |z| beyond it has probability alpha under the null.
[[nodiscard]] double two_sided_critical(double alpha);

}  // namespace excellence
