#pragma once

#include <cstddef>
#include <span>

namespace hb::stats {

enum class Alternative { two_sided };
enum class UMethod { exact, normal_approx };

struct UTestResult {
  double u_a = 0.0;
  double u_b = 0.0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  double p_value = 1.0;
  UMethod method = UMethod::exact;
};

/// Combined sample size at or below which p-values come from full
/// enumeration of the permutation distribution.
inline constexpr std::size_t kExactCutoff = 16;

/// Default significance level for pairwise tests (two-sided, uncorrected).
inline constexpr double kDefaultAlpha = 0.05;

/// Mann-Whitney U. u_a counts pairs with a > b plus half the ties. The
/// two-sided p-value is exact (enumerating every split of the pooled
/// sample, ties included) when n_a + n_b <= kExactCutoff, otherwise the
/// tie-corrected normal approximation with continuity correction.
/// Throws ArgumentError on an empty sample.
UTestResult mann_whitney_u(std::span<const double> sample_a, std::span<const double> sample_b,
                           Alternative alternative = Alternative::two_sided);

/// Same test with the p-value method forced. Exact enumeration is refused
/// above 30 observations.
UTestResult mann_whitney_u(std::span<const double> sample_a, std::span<const double> sample_b,
                           UMethod method);

/// Divisor is the count (population convention).
double population_variance(std::span<const double> values);
double population_stddev(std::span<const double> values);
double mean(std::span<const double> values);
double median(std::span<const double> values);

/// Linear-interpolation quantile (the "type 7" convention), q in [0, 1].
double quantile(std::span<const double> values, double q);

struct Summary {
  std::size_t count = 0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

Summary describe(std::span<const double> values);

/// Upper tail of the standard normal.
double normal_sf(double z);

}  // namespace hb::stats
