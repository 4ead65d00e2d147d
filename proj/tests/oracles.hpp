#pragma once

// Brute-force reference implementations, written directly from the
// definitions and sharing no code with the library.

#include <cmath>
#include <cstddef>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "holisticbias/generation_bias.hpp"

namespace oracle {

// u_a = #{a > b} + 0.5 #{a == b}, by direct pair counting.
inline double u_pairs(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0;
  for (double x : a)
    for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
  return u;
}

// Two-sided permutation p-value: the share of all C(n, n_a) relabelings of the
// pooled sample whose u is at least as far from n_a n_b / 2 as the observed one.
inline double exact_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size(), na = a.size();
  const double centre = static_cast<double>(a.size() * b.size()) / 2.0;
  const double observed = std::abs(u_pairs(a, b) - centre);
  std::size_t hits = 0, total = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != na) continue;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < n; ++i) (mask >> i & 1u ? x : y).push_back(pooled[i]);
    ++total;
    if (std::abs(u_pairs(x, y) - centre) >= observed - 1e-9) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

// grid[t][d][i][s]
using RawGrid = std::vector<std::vector<std::vector<std::vector<double>>>>;

inline double var_pop(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double acc = 0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / static_cast<double>(v.size());
}

inline double cell_mean(const std::vector<std::vector<double>>& cell, std::size_t s) {
  double m = 0;
  for (const auto& p : cell) m += p[s];
  return m / static_cast<double>(cell.size());
}

// (1/T) sum_t sum_{s in styles} Var_d( mean_i p_tdis )
inline double pgb(const RawGrid& g, const std::vector<std::size_t>& styles) {
  double total = 0;
  for (const auto& by_d : g) {
    for (std::size_t s : styles) {
      std::vector<double> means;
      for (const auto& cell : by_d) means.push_back(cell_mean(cell, s));
      total += var_pop(means);
    }
  }
  return total / static_cast<double>(g.size());
}

inline double fgb(const RawGrid& g) {
  std::vector<std::size_t> all(g[0][0][0].size());
  for (std::size_t s = 0; s < all.size(); ++s) all[s] = s;
  return pgb(g, all);
}

// (1/T) sum_t Var_d( sum_{s in C} mean_i p_tdis )
inline double scgb(const RawGrid& g, const std::vector<std::size_t>& styles) {
  double total = 0;
  for (const auto& by_d : g) {
    std::vector<double> sums;
    for (const auto& cell : by_d) {
      double acc = 0;
      for (std::size_t s : styles) acc += cell_mean(cell, s);
      sums.push_back(acc);
    }
    total += var_pop(sums);
  }
  return total / static_cast<double>(g.size());
}

inline std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t S) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(S);
  double sum = 0;
  for (auto& x : p) sum += (x = e(rng));
  for (auto& x : p) x /= sum;
  return p;
}

inline std::string style_name(std::size_t s) { return "style" + std::to_string(s); }
inline std::string descriptor_name(std::size_t d) { return "desc" + std::to_string(d); }
inline std::string template_name(std::size_t t) { return "tmpl" + std::to_string(t); }

struct RandomGrid {
  RawGrid raw;
  hb::StyleGrid grid;
};

// Complete grid with every cell populated; T, S, D, N drawn within the bounds.
inline RandomGrid random_grid(std::mt19937_64& rng, std::size_t max_t = 3, std::size_t max_s = 5,
                              std::size_t max_d = 10, std::size_t max_n = 4,
                              std::size_t min_s = 1) {
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  const std::size_t T = pick(1, max_t), S = pick(min_s, max_s), D = pick(1, max_d);
  std::vector<std::string> names;
  for (std::size_t s = 0; s < S; ++s) names.push_back(style_name(s));
  RandomGrid out{RawGrid(T, std::vector<std::vector<std::vector<double>>>(D)),
                 hb::StyleGrid(hb::StyleManifest(names))};
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t d = 0; d < D; ++d) {
      const std::size_t N = pick(1, max_n);
      for (std::size_t i = 0; i < N; ++i) {
        auto p = random_simplex(rng, S);
        out.raw[t][d].push_back(p);
        out.grid.add(template_name(t), descriptor_name(d), d % 2 ? "age" : "ability",
                     {template_name(t) + "/" + descriptor_name(d) + "/" + std::to_string(i), p});
      }
    }
  return out;
}

struct OffenseRow {
  std::string descriptor, template_id;
  double p;
};

// template -> (mean over descriptors of per-descriptor means, population std)
inline std::map<std::string, std::pair<double, double>> offense_two_stage(
    const std::vector<OffenseRow>& rows) {
  std::map<std::string, std::map<std::string, std::pair<double, std::size_t>>> acc;
  for (const auto& r : rows) {
    auto& cell = acc[r.template_id][r.descriptor];
    cell.first += r.p;
    cell.second += 1;
  }
  std::map<std::string, std::pair<double, double>> out;
  for (const auto& [t, by_d] : acc) {
    std::vector<double> means;
    for (const auto& [d, c] : by_d) means.push_back(c.first / static_cast<double>(c.second));
    double m = 0;
    for (double x : means) m += x;
    m /= static_cast<double>(means.size());
    out[t] = {m, std::sqrt(var_pop(means))};
  }
  return out;
}

inline double fraction_at_least(const std::vector<OffenseRow>& rows, double threshold) {
  std::size_t k = 0;
  for (const auto& r : rows) k += r.p >= threshold;
  return static_cast<double>(k) / static_cast<double>(rows.size());
}

}  // namespace oracle
