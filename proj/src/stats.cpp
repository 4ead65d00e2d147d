#include "holisticbias/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "holisticbias/errors.hpp"

namespace hb::stats {

namespace {

void require_non_empty(std::span<const double> v, const char* what) {
  if (v.empty()) throw ArgumentError(std::string(what) + ": empty sample");
}

struct Ranked {
  // Twice the midrank of each pooled observation, so ranks stay integral.
  std::vector<std::int64_t> doubled_ranks;
  double tie_term = 0.0;  // sum over tie groups of (t^3 - t)
};

Ranked rank_pooled(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size() + b.size();
  std::vector<std::pair<double, std::size_t>> pooled;
  pooled.reserve(n);
  for (std::size_t i = 0; i < a.size(); ++i) pooled.emplace_back(a[i], i);
  for (std::size_t i = 0; i < b.size(); ++i) pooled.emplace_back(b[i], a.size() + i);
  std::sort(pooled.begin(), pooled.end());

  Ranked r;
  r.doubled_ranks.assign(n, 0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && pooled[j + 1].first == pooled[i].first) ++j;
    // ranks i+1 .. j+1, midrank (i + j + 2) / 2
    const auto doubled = static_cast<std::int64_t>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) r.doubled_ranks[pooled[k].second] = doubled;
    const double t = static_cast<double>(j - i + 1);
    r.tie_term += t * t * t - t;
    i = j + 1;
  }
  return r;
}

// Two-sided permutation p-value: fraction of size-n_a subsets of the pooled
// ranks whose U deviates from its mean at least as much as the observed one.
double exact_p_value(const Ranked& r, std::size_t n_a, std::int64_t observed_doubled_rank_sum) {
  const std::size_t n = r.doubled_ranks.size();
  // 2 * E[R_a] = n_a (n + 1); compare |2R - 2E| on integers.
  const auto doubled_mean = static_cast<std::int64_t>(n_a * (n + 1));
  const auto observed_dev = std::llabs(observed_doubled_rank_sum - doubled_mean);

  std::vector<std::size_t> idx(n_a);
  std::iota(idx.begin(), idx.end(), 0);
  std::uint64_t extreme = 0;
  std::uint64_t total = 0;
  while (true) {
    std::int64_t sum = 0;
    for (auto k : idx) sum += r.doubled_ranks[k];
    ++total;
    if (std::llabs(sum - doubled_mean) >= observed_dev) ++extreme;
    // next combination in lexicographic order
    std::size_t pos = n_a;
    while (pos > 0 && idx[pos - 1] == n - n_a + (pos - 1)) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t k = pos; k < n_a; ++k) idx[k] = idx[k - 1] + 1;
  }
  return static_cast<double>(extreme) / static_cast<double>(total);
}

double normal_p_value(double u_a, std::size_t n_a, std::size_t n_b, double tie_term) {
  const double na = static_cast<double>(n_a);
  const double nb = static_cast<double>(n_b);
  const double n = na + nb;
  const double mu = na * nb / 2.0;
  double var = na * nb / 12.0 * (n + 1.0);
  if (n > 1.0) var -= na * nb / 12.0 * tie_term / (n * (n - 1.0));
  if (var <= 0.0) return 1.0;
  const double dev = std::max(std::abs(u_a - mu) - 0.5, 0.0);
  return std::min(1.0, 2.0 * normal_sf(dev / std::sqrt(var)));
}

UTestResult run(std::span<const double> a, std::span<const double> b, UMethod method) {
  require_non_empty(a, "mann_whitney_u");
  require_non_empty(b, "mann_whitney_u");
  const auto ranked = rank_pooled(a, b);
  std::int64_t doubled_sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) doubled_sum += ranked.doubled_ranks[i];

  UTestResult r;
  r.n_a = a.size();
  r.n_b = b.size();
  const double na = static_cast<double>(r.n_a);
  r.u_a = static_cast<double>(doubled_sum) / 2.0 - na * (na + 1.0) / 2.0;
  r.u_b = na * static_cast<double>(r.n_b) - r.u_a;
  r.method = method;
  if (method == UMethod::exact) {
    if (r.n_a + r.n_b > 30) throw ArgumentError("exact Mann-Whitney p-value limited to n <= 30");
    r.p_value = exact_p_value(ranked, r.n_a, doubled_sum);
  } else {
    r.p_value = normal_p_value(r.u_a, r.n_a, r.n_b, ranked.tie_term);
  }
  return r;
}

}  // namespace

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

UTestResult mann_whitney_u(std::span<const double> sample_a, std::span<const double> sample_b,
                           Alternative) {
  const auto method = sample_a.size() + sample_b.size() <= kExactCutoff ? UMethod::exact
                                                                        : UMethod::normal_approx;
  return run(sample_a, sample_b, method);
}

UTestResult mann_whitney_u(std::span<const double> sample_a, std::span<const double> sample_b,
                           UMethod method) {
  return run(sample_a, sample_b, method);
}

double mean(std::span<const double> values) {
  require_non_empty(values, "mean");
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double population_variance(std::span<const double> values) {
  require_non_empty(values, "population_variance");
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return ss / static_cast<double>(values.size());
}

double population_stddev(std::span<const double> values) {
  return std::sqrt(population_variance(values));
}

double quantile(std::span<const double> values, double q) {
  require_non_empty(values, "quantile");
  if (q < 0.0 || q > 1.0) throw ArgumentError("quantile: q outside [0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double median(std::span<const double> values) {
  require_non_empty(values, "median");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = sorted.size();
  return n % 2 == 1 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
}

Summary describe(std::span<const double> values) {
  require_non_empty(values, "describe");
  Summary s;
  s.count = values.size();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  s.q1 = quantile(values, 0.25);
  s.median = median(values);
  s.q3 = quantile(values, 0.75);
  s.mean = mean(values);
  return s;
}

}  // namespace hb::stats
