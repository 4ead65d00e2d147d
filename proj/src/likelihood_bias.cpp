#include "holisticbias/likelihood_bias.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

#include "holisticbias/errors.hpp"

namespace hb {

PerplexityTable build_perplexity_table(const std::vector<ScoreRecord>& scores,
                                       const SentenceIndex& dataset) {
  PerplexityTable table;
  std::vector<std::string> unknown;
  std::unordered_set<std::string> seen;
  table.entries.reserve(scores.size());
  for (const auto& s : scores) {
    if (!(s.perplexity > 0.0) || !std::isfinite(s.perplexity))
      throw ValueError("perplexity for '" + s.sentence_id + "' must be positive and finite");
    if (!seen.insert(s.sentence_id).second) throw UniquenessError(s.sentence_id);
    const auto* rec = dataset.find(s.sentence_id);
    if (rec == nullptr) {
      unknown.push_back(s.sentence_id);
      continue;
    }
    table.entries.push_back({s.sentence_id, s.perplexity, rec->axis, rec->descriptor_text,
                             rec->template_id, rec->noun_singular});
  }
  if (!unknown.empty()) {
    std::string msg = "score ids not in dataset:";
    for (std::size_t i = 0; i < unknown.size() && i < 10; ++i) msg += " '" + unknown[i] + "'";
    if (unknown.size() > 10) msg += " (+" + std::to_string(unknown.size() - 10) + " more)";
    throw JoinError(msg, std::move(unknown));
  }
  table.unscored = dataset.size() - table.entries.size();
  return table;
}

std::vector<ScoreRecord> read_perplexity_scores(const std::filesystem::path& path) {
  std::vector<ScoreRecord> out;
  const auto src = path.string();
  for_each_jsonl(path, [&](const Json& j, std::size_t line) {
    check_schema_version(j, src, line);
    out.push_back({require_string(j, "sentence_id", src, line),
                   require_number(j, "perplexity", src, line)});
  });
  return out;
}

PerplexityTable ingest_perplexities(const std::filesystem::path& scores_path,
                                    const SentenceIndex& dataset) {
  return build_perplexity_table(read_perplexity_scores(scores_path), dataset);
}

std::vector<GroupSummary> distribution_summary(const PerplexityTable& table) {
  std::map<std::pair<std::string, std::string>, std::vector<double>> cells;
  for (const auto& e : table.entries) cells[{e.axis, e.template_id}].push_back(e.perplexity);
  std::vector<GroupSummary> out;
  out.reserve(cells.size());
  for (const auto& [key, values] : cells)
    out.push_back({key.first, key.second, stats::describe(values)});
  return out;
}

std::size_t descriptor_length(std::string_view descriptor) {
  std::size_t n = 0;
  for (unsigned char c : descriptor)
    if ((c & 0xC0) != 0x80) ++n;
  return n;
}

PairwiseSigReport pairwise_significance(const PerplexityTable& table, const std::string& axis,
                                        const std::string& template_id,
                                        const PairwiseOptions& options) {
  std::map<std::string, std::vector<double>> samples;  // ordered by descriptor text
  bool template_seen = false;
  for (const auto& e : table.entries) {
    if (e.template_id != template_id) continue;
    template_seen = true;
    if (e.axis != axis) continue;
    const auto len = descriptor_length(e.descriptor);
    if (len < options.min_len || len > options.max_len) continue;
    samples[e.descriptor].push_back(e.perplexity);
  }
  if (!template_seen) throw LookupError("no scored sentences for template '" + template_id + "'");
  if (samples.size() < 2)
    throw InsufficientDataError("axis '" + axis + "' has fewer than 2 eligible descriptors under '" +
                                template_id + "'");

  PairwiseSigReport r;
  r.axis = axis;
  r.template_id = template_id;
  std::vector<std::pair<std::string, const std::vector<double>*>> items;
  for (const auto& [d, v] : samples) {
    items.emplace_back(d, &v);
    r.eligible_descriptors.push_back(d);
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = i + 1; j < items.size(); ++j) {
      const auto u = stats::mann_whitney_u(*items[i].second, *items[j].second);
      ++r.pair_count;
      if (u.p_value < options.alpha) ++r.significant_pairs;
    }
  }
  r.percent_significant =
      100.0 * static_cast<double>(r.significant_pairs) / static_cast<double>(r.pair_count);

  std::vector<std::pair<double, std::string>> medians;
  for (const auto& [d, v] : samples) medians.emplace_back(stats::median(v), d);
  std::sort(medians.begin(), medians.end());
  const auto k = std::min(kExtremeDescriptorCount, medians.size());
  for (std::size_t i = 0; i < k; ++i) r.low_ppl_descriptors.push_back(medians[i].second);
  // Descending median; equal medians keep descriptor-text order.
  std::stable_sort(medians.begin(), medians.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; i < k; ++i) r.high_ppl_descriptors.push_back(medians[i].second);
  return r;
}

}  // namespace hb
