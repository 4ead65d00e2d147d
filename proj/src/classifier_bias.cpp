#include "holisticbias/classifier_bias.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <unordered_map>

#include "holisticbias/errors.hpp"
#include "holisticbias/mitigation.hpp"
#include "holisticbias/stats.hpp"

namespace hb {

std::vector<OffenseScore> read_offense_scores(const std::filesystem::path& path) {
  std::vector<OffenseScore> out;
  const auto src = path.string();
  for_each_jsonl(path, [&](const Json& j, std::size_t line) {
    check_schema_version(j, src, line);
    out.push_back({require_string(j, "id", src, line), require_number(j, "prob_offensive", src, line)});
  });
  return out;
}

OffenseTable build_offense_table(const std::vector<OffenseScore>& scores,
                                 const SentenceIndex& dataset,
                                 const std::vector<ResponseRecord>& responses) {
  std::unordered_map<std::string, const ResponseRecord*> response_by_id;
  for (const auto& r : responses) response_by_id.emplace(r.response_id, &r);

  OffenseTable table;
  std::vector<std::string> unknown;
  for (const auto& s : scores) {
    if (!std::isfinite(s.prob_offensive) || s.prob_offensive < 0.0 || s.prob_offensive > 1.0)
      throw ValueError("offensiveness for '" + s.id + "' outside [0, 1]");
    const SentenceRecord* rec = dataset.find(s.id);
    if (rec == nullptr) {
      if (auto r = response_by_id.find(s.id); r != response_by_id.end())
        rec = dataset.find(r->second->sentence_id);
    }
    if (rec == nullptr) {
      unknown.push_back(s.id);
      continue;
    }
    table.entries.push_back({s.id, s.prob_offensive, rec->descriptor_text, rec->axis, rec->template_id});
  }
  if (!unknown.empty()) {
    // Message first: argument evaluation order is unspecified.
    auto msg = "offense ids not in dataset: '" + unknown.front() + "'";
    if (unknown.size() > 1) msg += " (+" + std::to_string(unknown.size() - 1) + " more)";
    throw JoinError(msg, std::move(unknown));
  }
  return table;
}

namespace {

// descriptor -> (axis, probabilities) for one template, ordered by descriptor.
std::map<std::string, std::pair<std::string, std::vector<double>>> slice(
    const OffenseTable& table, const std::string& template_id) {
  std::map<std::string, std::pair<std::string, std::vector<double>>> out;
  for (const auto& e : table.entries) {
    if (e.template_id != template_id) continue;
    auto& cell = out[e.descriptor];
    cell.first = e.axis;
    cell.second.push_back(e.prob_offensive);
  }
  return out;
}

}  // namespace

std::vector<OffenseBucket> offense_by_descriptor(const OffenseTable& table,
                                                 const std::string& template_id,
                                                 const std::vector<double>& bucket_edges) {
  if (bucket_edges.size() < 2) throw ArgumentError("need at least two bucket edges");
  for (std::size_t i = 1; i < bucket_edges.size(); ++i)
    if (!(bucket_edges[i] > bucket_edges[i - 1]))
      throw ArgumentError("bucket edges must be strictly increasing");

  const auto cells = slice(table, template_id);
  if (cells.empty())
    throw InsufficientDataError("no offensiveness scores for template '" + template_id + "'");

  std::vector<OffenseBucket> buckets;
  for (std::size_t i = 0; i + 1 < bucket_edges.size(); ++i)
    buckets.push_back({bucket_edges[i], bucket_edges[i + 1], {}});

  for (const auto& [d, cell] : cells) {
    DescriptorOffense row{d, cell.first, stats::mean(cell.second), cell.second.size(),
                          cell.first == "nonce"};
    const auto last = buckets.size() - 1;
    for (std::size_t b = 0; b < buckets.size(); ++b) {
      const bool upper_ok = b == last ? row.mean_prob <= buckets[b].high : row.mean_prob < buckets[b].high;
      if (row.mean_prob >= buckets[b].low && upper_ok) {
        buckets[b].descriptors.push_back(row);
        break;
      }
    }
  }
  for (auto& b : buckets)
    std::stable_sort(b.descriptors.begin(), b.descriptors.end(),
                     [](const auto& x, const auto& y) { return x.mean_prob < y.mean_prob; });
  return buckets;
}

std::vector<double> default_bucket_edges(const std::string& template_id) {
  if (template_id == "im") return {0.0, 0.00023, 0.03, 0.04, 0.20, 0.30, 0.50, 0.72, 1.0};
  if (template_id == "i_love_plural")
    return {0.0, 0.025, 0.24, 0.26, 0.49, 0.51, 0.74, 0.76, 0.99, 1.0};
  if (template_id == "i_hate_plural") return {0.0, 0.85, 0.97, 0.999, 1.0};
  return {0.0, 0.25, 0.5, 0.75, 1.0};
}

std::vector<TemplateOffense> offense_by_template(const OffenseTable& table) {
  std::map<std::string, std::map<std::string, std::vector<double>>> grouped;
  for (const auto& e : table.entries) grouped[e.template_id][e.descriptor].push_back(e.prob_offensive);
  std::vector<TemplateOffense> out;
  for (const auto& [t, by_descriptor] : grouped) {
    std::vector<double> means;
    for (const auto& [d, probs] : by_descriptor) means.push_back(stats::mean(probs));
    out.push_back({t, stats::mean(means), stats::population_stddev(means), means.size()});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.stddev > b.stddev; });
  return out;
}

double offensive_fraction(const OffenseTable& table, double threshold) {
  if (table.entries.empty()) throw ArgumentError("offensive_fraction: empty table");
  std::size_t hits = 0;
  for (const auto& e : table.entries)
    if (e.prob_offensive >= threshold) ++hits;
  return static_cast<double>(hits) / static_cast<double>(table.entries.size());
}

namespace {

void require_single_words(const std::vector<std::string>& descriptors) {
  for (const auto& d : descriptors) {
    if (d.empty() || d.find_first_of(" \t") != std::string::npos)
      throw ArgumentError("descriptor '" + d + "' is not a single word");
  }
}

std::string example_text(const std::string& line) {
  if (!line.empty() && line.front() == '{') {
    const auto j = Json::parse(line, nullptr, false);
    if (!j.is_discarded() && j.is_object() && j.contains("text") && j["text"].is_string())
      return j["text"].get<std::string>();
  }
  return line;
}

using SparseCounts = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

SparseCounts count_example(const std::string& text, const std::vector<std::string>& descriptors) {
  SparseCounts counts;
  for (std::uint32_t i = 0; i < descriptors.size(); ++i) {
    const auto n = find_word_occurrences(text, descriptors[i]).size();
    if (n > 0) counts.emplace_back(i, static_cast<std::uint32_t>(n));
  }
  return counts;
}

FrequencyReport finish(const std::vector<std::string>& descriptors,
                       const std::vector<std::uint64_t>& totals, std::uint64_t examples) {
  FrequencyReport r;
  r.examples_scanned = examples;
  for (std::size_t i = 0; i < descriptors.size(); ++i) {
    r.per_descriptor.push_back(
        {descriptors[i], totals[i],
         examples == 0 ? 0.0 : static_cast<double>(totals[i]) / static_cast<double>(examples)});
  }
  return r;
}

}  // namespace

FrequencyReport descriptor_frequency(std::istream& corpus, const std::vector<std::string>& descriptors,
                                     const FrequencyOptions& options) {
  require_single_words(descriptors);
  std::vector<std::uint64_t> totals(descriptors.size(), 0);
  std::uint64_t seen = 0;
  std::string line;

  if (options.sample == 0) {
    while (std::getline(corpus, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      for (const auto& [i, n] : count_example(example_text(line), descriptors)) totals[i] += n;
      ++seen;
    }
    return finish(descriptors, totals, seen);
  }

  // Reservoir of per-example counts; slots holding no matches are omitted.
  std::unordered_map<std::uint64_t, SparseCounts> reservoir;
  std::mt19937_64 rng(options.seed);
  while (std::getline(corpus, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::uint64_t slot = seen;
    if (seen >= options.sample) {
      slot = std::uniform_int_distribution<std::uint64_t>(0, seen)(rng);
      if (slot >= options.sample) {
        ++seen;
        continue;
      }
    }
    ++seen;
    auto counts = count_example(example_text(line), descriptors);
    if (counts.empty()) reservoir.erase(slot);
    else reservoir[slot] = std::move(counts);
  }
  for (const auto& [slot, counts] : reservoir)
    for (const auto& [i, n] : counts) totals[i] += n;
  return finish(descriptors, totals, std::min(seen, options.sample));
}

FrequencyReport descriptor_frequency(const std::vector<std::string>& examples,
                                     const std::vector<std::string>& descriptors) {
  std::ostringstream joined;
  for (const auto& e : examples) joined << e << '\n';
  std::istringstream in(joined.str());
  return descriptor_frequency(in, descriptors);
}

std::vector<std::string> single_word_descriptors(const Registry& reg) {
  std::vector<std::string> out;
  for (const auto& d : reg.descriptors())
    if (d.text.find(' ') == std::string::npos) out.push_back(d.text);
  return out;
}

}  // namespace hb
