#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "holisticbias/errors.hpp"
#include "holisticbias/mitigation.hpp"
#include "oracles.hpp"

using namespace hb;

TEST_CASE("mask_descriptor examples") {
  CHECK(mask_descriptor("I like mustachioed guys.", "mustachioed") == "I like left-handed guys.");
  CHECK(mask_descriptor("What is BIPOC? I am not familiar with that term.", "BIPOC") ==
        "What is left-handed? I am not familiar with that term.");
  CHECK(mask_descriptor("Nothing to mask here.", "Deaf") == "Nothing to mask here.");
}

TEST_CASE("mask_descriptor matching rules") {
  CHECK(mask_descriptor("DEAF, deaf and Deaf.", "Deaf") == "left-handed, left-handed and left-handed.");
  CHECK(mask_descriptor("blindness is not blind", "blind") == "blindness is not left-handed");
  CHECK(mask_descriptor("a well off guy and a well-off gal", "well-off") ==
        "a left-handed guy and a left-handed gal");
  CHECK(mask_descriptor("the friend who is deaf says hi", "who is deaf") ==
        "the friend left-handed says hi");
  // Non-ASCII bytes count as word characters.
  CHECK(mask_descriptor("caf\xc3\xa9gay gay", "gay") == "caf\xc3\xa9gay left-handed");
  CHECK_THROWS_AS(mask_descriptor("x", ""), ArgumentError);
}

TEST_CASE("mask_descriptor is idempotent") {
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"Being Deaf is fine, deaf folks rock", "Deaf"},
      {"left-handed and left handed", "left-handed"},
      {"queer queer-ish queer", "queer"},
  };
  for (const auto& [text, d] : cases) {
    const auto once = mask_descriptor(text, d);
    CHECK(mask_descriptor(once, d) == once);
  }
}

TEST_CASE("word occurrences") {
  CHECK(find_word_occurrences("Blind blind-ish BLIND", "blind") == std::vector<std::size_t>{0, 6, 16});
  CHECK(find_word_occurrences("unblinded", "blind").empty());
  CHECK(find_word_occurrences("", "blind").empty());
}

TEST_CASE("unsafe token stripping") {
  CHECK(strip_unsafe_token("Sure! _POTENTIALLY_UNSAFE__") == "Sure!");
  CHECK(strip_unsafe_token("Plain  text, untouched ") == "Plain  text, untouched ");
  CHECK(strip_unsafe_token("_POTENTIALLY_UNSAFE__ Hi _POTENTIALLY_UNSAFE__ there") == "Hi there");

  // Oracle: erase every occurrence, then collapse whitespace runs.
  auto oracle_strip = [](std::string s) {
    const std::string tok(kUnsafeToken);
    for (auto p = s.find(tok); p != std::string::npos; p = s.find(tok)) s.erase(p, tok.size());
    std::string out;
    for (char c : s) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!out.empty() && out.back() != ' ') out.push_back(' ');
      } else {
        out.push_back(c);
      }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
  };
  for (const auto* s : {"a _POTENTIALLY_UNSAFE__b", "_POTENTIALLY_UNSAFE___POTENTIALLY_UNSAFE__ x",
                        "x\t_POTENTIALLY_UNSAFE__\ny"})
    CHECK(strip_unsafe_token(s) == oracle_strip(s));
}

TEST_CASE("strip happens before masking") {
  CHECK(prepare_for_style_classification("_POTENTIALLY_UNSAFE__ I love Deaf people", "Deaf") ==
        "I love left-handed people");
  // A token splitting a descriptor hides it from masking unless stripped first.
  CHECK(prepare_for_style_classification("un_POTENTIALLY_UNSAFE__married", "unmarried") ==
        "left-handed");
  CHECK(strip_unsafe_token(mask_descriptor("un_POTENTIALLY_UNSAFE__married", "unmarried")) ==
        "unmarried");
}

TEST_CASE("bias_value") {
  const std::vector<double> mbar{0.5, 0.5}, md{0.6, 0.4}, p{0.7, 0.5};
  for (int a = 0; a <= 2; ++a) CHECK(bias_value(mbar, md, mbar, a) == 0.0);
  CHECK(std::abs(bias_value(md, md, mbar, 0) - 0.02) <= 1e-12);
  // p - mbar = [0.2, 0], m_d - mbar = [0.1, -0.1]
  CHECK(std::abs(bias_value(p, md, mbar, 0) - 0.02) <= 1e-12);
  CHECK(std::abs(bias_value(p, md, mbar, 1) - 0.02 / std::sqrt(0.02)) <= 1e-12);
  CHECK(std::abs(bias_value(p, md, mbar, 2) - 1.0) <= 1e-12);

  CHECK(bias_value(p, mbar, mbar, 0) == 0.0);
  CHECK_THROWS_AS(bias_value(p, mbar, mbar, 1), DegenerateError);
  CHECK_THROWS_AS(bias_value(std::vector<double>{1}, md, mbar, 0), ShapeError);
}

TEST_CASE("bias_value is linear in p") {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 50; ++rep) {
    const auto p1 = oracle::random_simplex(rng, 5), p2 = oracle::random_simplex(rng, 5);
    const auto md = oracle::random_simplex(rng, 5), mbar = oracle::random_simplex(rng, 5);
    const double lambda = std::uniform_real_distribution<double>(0, 1)(rng);
    std::vector<double> mix(5);
    for (std::size_t s = 0; s < 5; ++s) mix[s] = p1[s] + lambda * (p2[s] - p1[s]);
    for (int a = 0; a <= 2; ++a) {
      const double b1 = bias_value(p1, md, mbar, a), b2 = bias_value(p2, md, mbar, a);
      CHECK(std::abs(bias_value(mix, md, mbar, a) - (b1 + lambda * (b2 - b1))) <= 1e-12);
    }
  }
}

TEST_CASE("config validation and tags") {
  CHECK_THROWS_AS((BiasProjectionConfig{3, 0.1}.validate()), ConfigError);
  CHECK_THROWS_AS((BiasProjectionConfig{0, 0.0}.validate()), ConfigError);
  CHECK_NOTHROW((BiasProjectionConfig{2, kBetaDialoGptScale}.validate()));
  CHECK(append_tag("Hi! I'm a Deaf grandma.", BiasLabel::bias) == "Hi! I'm a Deaf grandma. bias");
  CHECK(append_tag("Hi! ", BiasLabel::no_bias) == "Hi! no_bias");
}

namespace {

struct Fixture {
  StyleGrid grid;
  std::vector<ResponseRecord> responses;
};

// Five descriptors near a shared profile; "target" is displaced along style 0.
Fixture displaced_grid(std::uint64_t seed, double displacement, std::size_t n = 40) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0, 0.01);
  Fixture f{StyleGrid(StyleManifest({"a", "b", "c", "d"})), {}};
  for (const auto* d : {"target", "d1", "d2", "d3", "d4"})
    for (const auto* t : {"t1", "t2"})
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> p{0.25, 0.25, 0.25, 0.25};
        for (auto& x : p) x = std::max(0.0, x + noise(rng));
        if (std::string(d) == "target") p[0] += displacement;
        double sum = 0;
        for (double x : p) sum += x;
        for (auto& x : p) x /= sum;
        const std::string id = std::string(d) + "/" + t + "/" + std::to_string(i);
        f.grid.add(t, d, "ability", {id, p});
        f.responses.push_back({id, "s", "reply " + id, std::string("context for ") + d});
      }
  return f;
}

}  // namespace

TEST_CASE("tag_pairs labels and ordering") {
  auto f = displaced_grid(1, 0.2);
  const auto pairs = tag_pairs(f.grid, f.responses, {0, kBetaBlenderBotScale});
  CHECK(pairs.size() == f.grid.response_count());
  std::map<std::string, std::pair<std::size_t, std::size_t>> per_descriptor;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    CHECK((p.label == BiasLabel::bias) == (p.bias_value > kBetaBlenderBotScale));
    const auto tag = std::string(" ") + std::string(to_string(p.label));
    CHECK(p.context.substr(p.context.size() - tag.size()) == tag);
    auto& c = per_descriptor[p.descriptor];
    c.first += p.label == BiasLabel::bias;
    c.second += 1;
    if (i > 0) {
      const auto& q = pairs[i - 1];
      CHECK(std::tie(q.template_id, q.descriptor) <= std::tie(p.template_id, p.descriptor));
    }
  }
  const auto frac = [&](const std::string& d) {
    return double(per_descriptor[d].first) / double(per_descriptor[d].second);
  };
  for (const auto* d : {"d1", "d2", "d3", "d4"}) CHECK(frac("target") > frac(d));

  const double inf = std::numeric_limits<double>::infinity();
  for (const auto& p : tag_pairs(f.grid, f.responses, {0, inf})) CHECK(p.label == BiasLabel::no_bias);

  std::size_t previous = pairs.size() + 1;
  for (double beta : {1e-6, 1e-4, 1e-3, 3e-3, 1e-2, 0.1}) {
    std::size_t biased = 0;
    for (const auto& p : tag_pairs(f.grid, f.responses, {0, beta})) biased += p.label == BiasLabel::bias;
    CHECK(biased <= previous);
    previous = biased;
  }

  auto missing = f.responses;
  missing.pop_back();
  CHECK_THROWS_AS(tag_pairs(f.grid, missing, {0, 0.003}), JoinError);
}

TEST_CASE("single-descriptor grid is all no_bias") {
  StyleGrid g{StyleManifest({"a", "b"})};
  std::vector<ResponseRecord> rs;
  for (int i = 0; i < 5; ++i) {
    const auto id = "r" + std::to_string(i);
    g.add("t", "only", "age", {id, {0.1 * i, 1 - 0.1 * i}});
    rs.push_back({id, "s", "x", "ctx"});
  }
  for (const auto& p : tag_pairs(g, rs, {0, 1e-9})) {
    CHECK(p.bias_value == 0.0);
    CHECK(p.label == BiasLabel::no_bias);
  }
  Warnings w;
  CHECK(tag_pairs(g, rs, {1, 1e-9}, &w).empty());
  CHECK_FALSE(w.empty());
}

TEST_CASE("mean bias value per descriptor equals the squared direction norm") {
  auto f = displaced_grid(2, 0.05, 6);
  const auto prof = mean_style_profiles(f.grid);
  std::map<std::string, std::pair<double, std::size_t>> acc;
  for (const auto& p : tag_pairs(f.grid, f.responses, {0, 1.0})) {
    acc[p.descriptor].first += p.bias_value;
    acc[p.descriptor].second += 1;
  }
  for (const auto& [d, a] : acc) {
    const auto& md = prof.descriptor_means.at(d);
    double norm2 = 0;
    for (std::size_t s = 0; s < md.size(); ++s)
      norm2 += (md[s] - prof.global_mean[s]) * (md[s] - prof.global_mean[s]);
    CHECK(std::abs(a.first / double(a.second) - norm2) <= 1e-9);
  }
}

TEST_CASE("alpha comparison") {
  // m_bar = c; A sits 10x further from it than B.
  StyleGrid g{StyleManifest({"a", "b"})};
  g.add("t", "A", "age", {"ra", {0.6, 0.4}});
  g.add("t", "B", "age", {"rb", {0.51, 0.49}});
  g.add("t", "C", "age", {"rc", {0.39, 0.61}});
  const auto rows = alpha_comparison(g, {"ra"}, {"rb"});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].ratio == doctest::Approx(100.0));
  CHECK(rows[2].ratio == doctest::Approx(1.0));
  CHECK(rows[0].ratio / rows[2].ratio == doctest::Approx(100.0));

  for (const auto& r : alpha_comparison(g, {"ra", "rc"}, {"ra", "rc"})) CHECK(r.ratio == 1.0);
  CHECK_THROWS_AS(alpha_comparison(g, {}, {"ra"}), ArgumentError);
  CHECK_THROWS_AS(alpha_comparison(g, {"zz"}, {"ra"}), LookupError);
}
