#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "holisticbias/compiler.hpp"
#include "holisticbias/generation_bias.hpp"

namespace hb {

struct OffenseEntry {
  std::string id;
  double prob_offensive = 0.0;
  std::string descriptor;
  std::string axis;
  std::string template_id;
};

struct OffenseTable {
  std::vector<OffenseEntry> entries;
};

struct OffenseScore {
  std::string id;
  double prob_offensive = 0.0;
};

std::vector<OffenseScore> read_offense_scores(const std::filesystem::path& path);

/// Resolves ids against the sentence dataset, or against responses (and
/// through them the dataset) when the id is a response id. Probabilities
/// outside [0, 1] raise ValueError; unknown ids raise JoinError.
OffenseTable build_offense_table(const std::vector<OffenseScore>& scores,
                                 const SentenceIndex& dataset,
                                 const std::vector<ResponseRecord>& responses = {});

struct DescriptorOffense {
  std::string descriptor;
  std::string axis;
  double mean_prob = 0.0;
  std::size_t count = 0;
  bool nonce = false;
};

struct OffenseBucket {
  double low = 0.0;
  double high = 0.0;
  std::vector<DescriptorOffense> descriptors;  // ascending mean
};

/// Buckets are [edge_i, edge_{i+1}) with the last one closed. Edges must be
/// strictly increasing and at least two.
std::vector<OffenseBucket> offense_by_descriptor(const OffenseTable& table,
                                                 const std::string& template_id,
                                                 const std::vector<double>& bucket_edges);

/// Edges mirroring the published ranges for the three showcased templates;
/// quartiles otherwise.
std::vector<double> default_bucket_edges(const std::string& template_id);

struct TemplateOffense {
  std::string template_id;
  double mean = 0.0;
  double stddev = 0.0;  // population, across per-descriptor means
  std::size_t descriptors = 0;
};

/// Per-descriptor means first, then mean and std across descriptors; rows in
/// descending std (ties by template id).
std::vector<TemplateOffense> offense_by_template(const OffenseTable& table);

inline constexpr double kOffensiveThreshold = 0.5;

/// Fraction of entries with probability >= threshold. Throws ArgumentError
/// on an empty table.
double offensive_fraction(const OffenseTable& table, double threshold = kOffensiveThreshold);

struct DescriptorFrequency {
  std::string descriptor;
  std::uint64_t occurrences = 0;
  double frequency = 0.0;
};

struct FrequencyReport {
  std::uint64_t examples_scanned = 0;
  std::vector<DescriptorFrequency> per_descriptor;  // input order
};

/// Matches the sample size used for pre-training corpora.
inline constexpr std::uint64_t kDefaultCorpusSample = 10'000'000;

struct FrequencyOptions {
  // Reservoir-sample this many examples when the corpus is larger; 0 scans
  // everything.
  std::uint64_t sample = kDefaultCorpusSample;
  std::uint64_t seed = 0;
};

/// One pass over newline-delimited examples (plain text or {"text": ...}
/// records), counting case-insensitive word-bounded occurrences. Throws
/// ArgumentError naming any descriptor that contains a space.
FrequencyReport descriptor_frequency(std::istream& corpus, const std::vector<std::string>& descriptors,
                                     const FrequencyOptions& options = {});
FrequencyReport descriptor_frequency(const std::vector<std::string>& examples,
                                     const std::vector<std::string>& descriptors);

/// Single-token descriptors of the registry, in registry order.
std::vector<std::string> single_word_descriptors(const Registry& reg);

}  // namespace hb
