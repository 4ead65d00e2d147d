#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "holisticbias/errors.hpp"
#include "holisticbias/harness.hpp"
#include "holisticbias/likelihood_bias.hpp"
#include "test_util.hpp"

using namespace hb;

namespace {

SentenceRecord record(const std::string& axis, const std::string& d, std::size_t i,
                      const std::string& t = "i_love_plural") {
  SentenceRecord s;
  s.axis = axis;
  s.descriptor_text = d;
  s.noun_singular = "n" + std::to_string(i);
  s.template_id = t;
  s.id = make_sentence_id(axis, d, s.noun_singular, t, VariantSet{});
  s.text = d + " " + s.noun_singular;
  return s;
}

// Builds a table from descriptor -> perplexity samples under one axis/template.
PerplexityTable table_of(const std::map<std::string, std::vector<double>>& samples,
                         const std::string& axis = "ability",
                         const std::string& t = "i_love_plural") {
  std::vector<SentenceRecord> records;
  std::vector<ScoreRecord> scores;
  for (const auto& [d, values] : samples)
    for (std::size_t i = 0; i < values.size(); ++i) {
      records.push_back(record(axis, d, i, t));
      scores.push_back({records.back().id, values[i]});
    }
  return build_perplexity_table(scores, SentenceIndex(records));
}

}  // namespace

TEST_CASE("perplexity join errors") {
  const SentenceIndex dataset({record("ability", "blind", 0), record("ability", "blind", 1)});
  const auto ok = build_perplexity_table({{dataset.records()[0].id, 12.0}}, dataset);
  CHECK(ok.entries.size() == 1);
  CHECK(ok.unscored == 1);
  CHECK(ok.entries[0].descriptor == "blind");

  try {
    build_perplexity_table({{"x|y|z", 3.0}}, dataset);
    FAIL("expected JoinError");
  } catch (const JoinError& e) {
    REQUIRE(e.offenders().size() == 1);
    CHECK(e.offenders()[0] == "x|y|z");
    CHECK(std::string(e.what()).find("x|y|z") != std::string::npos);
  }
  CHECK_THROWS_AS(build_perplexity_table({{dataset.records()[0].id, -1.0}}, dataset), ValueError);
  CHECK_THROWS_AS(build_perplexity_table({{dataset.records()[0].id, 0.0}}, dataset), ValueError);
  CHECK_THROWS_AS(build_perplexity_table({{dataset.records()[0].id, 2.0}, {dataset.records()[0].id, 3.0}},
                                         dataset),
                  UniquenessError);
}

TEST_CASE("distribution summary per axis and template") {
  std::vector<SentenceRecord> records;
  std::vector<ScoreRecord> scores;
  for (const auto* axis : {"ability", "age"})
    for (const auto* t : {"im", "i_love_plural"})
      for (std::size_t i = 0; i < 10; ++i) {
        records.push_back(record(axis, std::string(axis) + "_d", i, t));
        scores.push_back({records.back().id, 5.0});
      }
  const auto table = build_perplexity_table(scores, SentenceIndex(records));
  const auto summaries = distribution_summary(table);
  REQUIRE(summaries.size() == 4);
  for (const auto& s : summaries) {
    CHECK(s.summary.count == 10);
    CHECK(s.summary.q1 == 5.0);
    CHECK(s.summary.median == 5.0);
    CHECK(s.summary.q3 == 5.0);
  }
}

TEST_CASE("nonce axis has the highest median under an inflated mock scorer") {
  const auto& reg = hbt::shipped_registry();
  const auto rules = ArticleRules::load_from_dir(hbt::data_dir());
  MockProfile profile;
  profile.seed = 99;
  profile.nonce_ppl_multiplier = 4.0;
  std::vector<ScoreRecord> scores;
  std::vector<SentenceRecord> records;
  compile_dataset(reg, rules, VariationPolicy::none(), [&](const SentenceRecord& s) {
    if (s.template_id != "i_love_plural" && s.template_id != "im") return;
    records.push_back(s);
    scores.push_back({s.id, mock_perplexity(s, profile)});
  });
  const auto table = build_perplexity_table(scores, SentenceIndex(records));
  for (const auto* t : {"im", "i_love_plural"}) {
    std::string best;
    double best_median = 0;
    for (const auto& s : distribution_summary(table))
      if (s.template_id == t && s.summary.median > best_median) {
        best_median = s.summary.median;
        best = s.axis;
      }
    CHECK(best == "nonce");
  }
}

TEST_CASE("descriptor length counts code points") {
  CHECK(descriptor_length("bi") == 2);
  CHECK(descriptor_length("left-handed") == 11);
  CHECK(descriptor_length("with low vision") == 15);
  CHECK(descriptor_length("caf\xc3\xa9") == 4);
}

TEST_CASE("pairwise significance on constructed samples") {
  std::map<std::string, std::vector<double>> samples;
  for (std::size_t k = 0; k < 5; ++k) {
    auto& v = samples["descriptor" + std::string(1, static_cast<char>('a' + k))];
    for (std::size_t i = 0; i < 12; ++i) v.push_back(10.0 + 100.0 * k + i);
  }
  samples["bi"] = {1, 2, 3};  // too short for the 6-19 filter
  const auto table = table_of(samples);
  const auto r = pairwise_significance(table, "ability", "i_love_plural");
  CHECK(r.eligible_descriptors.size() == 5);
  CHECK(std::find(r.eligible_descriptors.begin(), r.eligible_descriptors.end(), "bi") ==
        r.eligible_descriptors.end());
  CHECK(r.pair_count == 10);
  CHECK(r.significant_pairs == 10);
  CHECK(r.percent_significant == 100.0);
  CHECK(r.low_ppl_descriptors == std::vector<std::string>{"descriptora", "descriptorb", "descriptorc"});
  CHECK(r.high_ppl_descriptors == std::vector<std::string>{"descriptore", "descriptord", "descriptorc"});
}

TEST_CASE("pairwise significance is rank based") {
  std::mt19937_64 rng(1);
  std::lognormal_distribution<double> ln(3.0, 0.5);
  std::map<std::string, std::vector<double>> samples, scaled;
  for (std::size_t k = 0; k < 8; ++k) {
    const std::string d = "descriptor" + std::to_string(k);
    for (std::size_t i = 0; i < 20; ++i) {
      const double v = ln(rng) * (1.0 + 0.1 * static_cast<double>(k));
      samples[d].push_back(v);
      scaled[d].push_back(v * 7.5);
    }
  }
  const auto a = pairwise_significance(table_of(samples), "ability", "i_love_plural");
  const auto b = pairwise_significance(table_of(scaled), "ability", "i_love_plural");
  CHECK(a.pair_count == 8 * 7 / 2);
  CHECK(a.significant_pairs == b.significant_pairs);
  CHECK(a.low_ppl_descriptors == b.low_ppl_descriptors);
  CHECK(a.high_ppl_descriptors == b.high_ppl_descriptors);
}

TEST_CASE("pairwise significance preconditions") {
  const auto table = table_of({{"descriptor1", {1, 2, 3}}, {"bi", {4, 5}}});
  CHECK_THROWS_AS(pairwise_significance(table, "ability", "i_love_plural"), InsufficientDataError);
  CHECK_THROWS_AS(pairwise_significance(table, "ability", "i_hate_plural"), LookupError);
}

TEST_CASE("ppl file ingestion") {
  hbt::TempDir dir("ppl");
  const SentenceIndex dataset({record("ability", "blind", 0)});
  hbt::write_file(dir / "ppl.jsonl", "{\"sentence_id\": \"" + dataset.records()[0].id +
                                         "\", \"perplexity\": 9.5, \"schema_version\": 1}\n");
  const auto table = ingest_perplexities(dir / "ppl.jsonl", dataset);
  REQUIRE(table.entries.size() == 1);
  CHECK(table.entries[0].perplexity == 9.5);

  hbt::write_file(dir / "bad.jsonl", "{\"sentence_id\": 5, \"perplexity\": 9.5}\n");
  CHECK_THROWS_AS(ingest_perplexities(dir / "bad.jsonl", dataset), SchemaError);
}
