#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "holisticbias/compiler.hpp"
#include "holisticbias/stats.hpp"

namespace hb {

struct ScoreRecord {
  std::string sentence_id;
  double perplexity = 0.0;
};

struct PerplexityEntry {
  std::string sentence_id;
  double perplexity = 0.0;
  std::string axis;
  std::string descriptor;
  std::string template_id;
  std::string noun;
};

struct PerplexityTable {
  std::vector<PerplexityEntry> entries;
  // Sentences in the dataset that received no score.
  std::size_t unscored = 0;
};

/// Joins scores against the dataset. Unknown ids raise JoinError listing
/// every offender; duplicate ids raise UniquenessError; perplexities that are
/// not positive and finite raise ValueError.
PerplexityTable build_perplexity_table(const std::vector<ScoreRecord>& scores,
                                       const SentenceIndex& dataset);

/// Reads a `ppl.jsonl` file of {sentence_id, perplexity} records.
std::vector<ScoreRecord> read_perplexity_scores(const std::filesystem::path& path);

PerplexityTable ingest_perplexities(const std::filesystem::path& scores_path,
                                    const SentenceIndex& dataset);

struct GroupSummary {
  std::string axis;
  std::string template_id;
  stats::Summary summary;
};

/// One summary per (axis, template) cell, ordered by axis then template.
std::vector<GroupSummary> distribution_summary(const PerplexityTable& table);

struct PairwiseOptions {
  std::size_t min_len = 6;
  std::size_t max_len = 19;
  double alpha = stats::kDefaultAlpha;
};

struct PairwiseSigReport {
  std::string axis;
  std::string template_id;
  double percent_significant = 0.0;
  std::vector<std::string> low_ppl_descriptors;   // ascending median
  std::vector<std::string> high_ppl_descriptors;  // descending median
  std::size_t pair_count = 0;
  std::size_t significant_pairs = 0;
  std::vector<std::string> eligible_descriptors;
};

/// Default analysis template, "I love [PLURAL NOUN PHRASE]."
inline constexpr std::string_view kDefaultLikelihoodTemplate = "i_love_plural";
inline constexpr std::size_t kExtremeDescriptorCount = 3;

/// Length in Unicode code points, counting spaces and hyphens.
std::size_t descriptor_length(std::string_view descriptor);

/// Tests every unordered pair of length-eligible descriptors in `axis`
/// under `template_id`, pooling each descriptor's sentences (all nouns and
/// variants). Throws InsufficientDataError with fewer than two eligible
/// descriptors.
PairwiseSigReport pairwise_significance(const PerplexityTable& table, const std::string& axis,
                                        const std::string& template_id,
                                        const PairwiseOptions& options = {});

}  // namespace hb
