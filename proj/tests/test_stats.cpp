#include <doctest.h>

#include <algorithm>
#include <random>

#include "holisticbias/errors.hpp"
#include "holisticbias/stats.hpp"
#include "oracles.hpp"

using namespace hb;
using namespace hb::stats;

TEST_CASE("U statistic on small examples") {
  std::vector<double> a{1, 2}, b{3, 4};
  auto r = mann_whitney_u(a, b);
  CHECK(r.u_a == 0);
  CHECK(r.u_b == 4);
  CHECK(r.method == UMethod::exact);

  std::vector<double> c{1, 2, 3};
  r = mann_whitney_u(c, c);
  CHECK(r.u_a == 4.5);
  CHECK(r.u_b == 4.5);
  CHECK(r.p_value == doctest::Approx(1.0));

  std::vector<double> empty;
  CHECK_THROWS_AS(mann_whitney_u(empty, a), ArgumentError);
  CHECK_THROWS_AS(mann_whitney_u(a, empty), ArgumentError);
}

TEST_CASE("U matches pair counting and enumeration oracles") {
  std::mt19937_64 rng(11);
  for (std::size_t na = 1; na <= 8; ++na)
    for (std::size_t nb = 1; nb <= 8; ++nb)
      for (int rep = 0; rep < 3; ++rep) {
        // Integer draws from a small range force ties.
        std::uniform_int_distribution<int> pick(0, rep == 0 ? 100 : 4);
        std::vector<double> a(na), b(nb);
        for (auto& x : a) x = pick(rng);
        for (auto& x : b) x = pick(rng);
        const auto r = mann_whitney_u(a, b);
        CHECK(r.u_a == oracle::u_pairs(a, b));
        CHECK(r.u_a + r.u_b == static_cast<double>(na * nb));
        CHECK(r.p_value == doctest::Approx(oracle::exact_p(a, b)).epsilon(1e-12));
      }
}

TEST_CASE("U symmetry and shift invariance") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z;
  for (std::size_t n : {3u, 7u, 20u}) {
    std::vector<double> a(n), b(n + 2);
    for (auto& x : a) x = z(rng);
    for (auto& x : b) x = z(rng) + 0.5;
    const auto ab = mann_whitney_u(a, b), ba = mann_whitney_u(b, a);
    CHECK(ab.u_a == ba.u_b);
    CHECK(ab.u_b == ba.u_a);
    CHECK(ab.p_value == ba.p_value);
    auto shifted_a = a, shifted_b = b;
    for (auto& x : shifted_a) x += 17.25;
    for (auto& x : shifted_b) x += 17.25;
    const auto shifted = mann_whitney_u(shifted_a, shifted_b);
    CHECK(shifted.u_a == ab.u_a);
    CHECK(shifted.p_value == ab.p_value);
  }
}

TEST_CASE("method selection follows the combined-size cutoff") {
  std::vector<double> a(8), b(8), c(9);
  for (std::size_t i = 0; i < 8; ++i) a[i] = i, b[i] = i + 0.5;
  for (std::size_t i = 0; i < 9; ++i) c[i] = i + 0.25;
  CHECK(mann_whitney_u(a, b).method == UMethod::exact);
  CHECK(mann_whitney_u(a, c).method == UMethod::normal_approx);
  std::vector<double> big(31, 1.0);
  CHECK_THROWS_AS(mann_whitney_u(big, a, UMethod::exact), ArgumentError);
}

// The normal approximation is only a sanity band. Below five observations
// per side its error exceeds 0.02 for some configurations, so the check
// covers the sizes where the band holds.
TEST_CASE("normal approximation stays near the exact p-value") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  const std::vector<std::pair<std::size_t, std::size_t>> sizes = {
      {5, 5}, {5, 6}, {5, 7}, {6, 6}, {4, 7}, {4, 8}, {6, 5}, {7, 5}, {7, 4}, {8, 4}};
  for (auto [na, nb] : sizes)
    for (int rep = 0; rep < 40; ++rep) {
      std::vector<double> a(na), b(nb);
      for (auto& x : a) x = z(rng);
      for (auto& x : b) x = z(rng) + (rep % 4) * 0.5;
      const auto exact = mann_whitney_u(a, b, UMethod::exact);
      const auto approx = mann_whitney_u(a, b, UMethod::normal_approx);
      CHECK(std::abs(exact.p_value - approx.p_value) <= 0.02);
    }
}

TEST_CASE("normal approximation on large separated samples") {
  std::vector<double> a(30), b(30);
  for (std::size_t i = 0; i < 30; ++i) a[i] = i, b[i] = i + 100;
  const auto r = mann_whitney_u(a, b);
  CHECK(r.u_a == 0);
  CHECK(r.p_value < 1e-9);
  CHECK(r.p_value >= 0);
}

TEST_CASE("variance, median, quantiles") {
  CHECK(population_variance(std::vector<double>{0.8, 0.6}) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(population_variance(std::vector<double>{2.5, 2.5, 2.5}) == 0.0);
  CHECK(population_variance(std::vector<double>{0, 1}) == 0.25);
  CHECK(population_stddev(std::vector<double>{0, 1}) == 0.5);

  CHECK(median(std::vector<double>{3, 1, 2}) == 2);
  CHECK(median(std::vector<double>{1, 2, 3, 4}) == 2.5);
  CHECK(median(std::vector<double>{5}) == 5);

  std::vector<double> empty;
  CHECK_THROWS_AS(population_variance(empty), ArgumentError);
  CHECK_THROWS_AS(median(empty), ArgumentError);

  CHECK(quantile(std::vector<double>{1, 2, 3, 4}, 0.25) == doctest::Approx(1.75));
  const auto s = describe(std::vector<double>{7, 7, 7});
  CHECK(s.count == 3);
  CHECK(s.min == 7);
  CHECK(s.q1 == 7);
  CHECK(s.q3 == 7);
  CHECK(s.max == 7);
}

TEST_CASE("variance is shift invariant") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  for (double c : {-1000.0, -3.5, 0.0, 42.0, 1000.0}) {
    std::vector<double> x(25), y(25);
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = (x[i] = u(rng)) + c;
    CHECK(std::abs(population_variance(x) - population_variance(y)) <= 1e-12);
  }
}
