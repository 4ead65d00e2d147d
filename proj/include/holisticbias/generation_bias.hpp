#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "holisticbias/compiler.hpp"
#include "holisticbias/errors.hpp"

namespace hb {

using StyleVector = std::vector<double>;

/// Tolerance on the sum of an ingested probability vector.
inline constexpr double kStyleSumTolerance = 1e-4;
/// Reported metrics are multiplied by this factor.
inline constexpr double kReportScale = 1000.0;

/// Ordered style names; defines the dimension S of every style vector.
class StyleManifest {
 public:
  StyleManifest() = default;
  explicit StyleManifest(std::vector<std::string> names);

  static StyleManifest load(const std::filesystem::path& path);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  std::optional<std::size_t> index_of(std::string_view name) const;

 private:
  std::vector<std::string> names_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Checks entries in [0, 1] and the sum within tolerance, then rescales the
/// vector to sum to exactly 1. Throws ShapeError or ValueError.
StyleVector validate_style_vector(std::span<const double> probs, std::size_t style_count,
                                  double tolerance = kStyleSumTolerance);

struct GridEntry {
  std::string response_id;
  StyleVector probs;
};

/// Style vectors keyed by (template, descriptor) of the originating prompt.
class StyleGrid {
 public:
  using Cells = std::map<std::string, std::map<std::string, std::vector<GridEntry>>>;

  StyleGrid() = default;
  explicit StyleGrid(StyleManifest manifest) : manifest_(std::move(manifest)) {}

  /// Validates and renormalizes `entry.probs` before storing it.
  void add(const std::string& template_id, const std::string& descriptor, const std::string& axis,
           GridEntry entry);

  const StyleManifest& manifest() const { return manifest_; }
  std::size_t style_count() const { return manifest_.size(); }
  /// template -> descriptor -> responses in insertion order.
  const Cells& cells() const { return cells_; }
  const std::string& axis_of(std::string_view descriptor) const;
  std::vector<std::string> descriptors() const;
  std::vector<std::string> templates() const;
  std::size_t response_count() const { return response_count_; }
  bool empty() const { return response_count_ == 0; }

 private:
  StyleManifest manifest_;
  Cells cells_;
  std::map<std::string, std::string, std::less<>> axis_;
  std::size_t response_count_ = 0;
};

struct ResponseRecord {
  std::string response_id;
  std::string sentence_id;
  std::string text;
  std::string context;
};

std::vector<ResponseRecord> read_responses(const std::filesystem::path& path);
Json to_json(const ResponseRecord& r);

/// Builds a grid from styles.jsonl ({response_id, probs}) joined through
/// responses.jsonl to the sentence dataset. Cells are ordered by response id.
StyleGrid ingest_style_vectors(const std::filesystem::path& styles_path,
                               const std::vector<ResponseRecord>& responses,
                               const SentenceIndex& dataset, const StyleManifest& manifest);

struct StyleProfiles {
  std::map<std::pair<std::string, std::string>, StyleVector> cell_means;  // (template, descriptor)
  std::map<std::string, StyleVector> descriptor_means;
  StyleVector global_mean;
};

/// Unweighted means: over responses per cell, over templates per descriptor,
/// over descriptors globally. Throws ArgumentError on an empty grid.
StyleProfiles mean_style_profiles(const StyleGrid& grid);

struct ClusterSpec {
  std::string name;
  std::vector<std::string> member_styles;
};

std::vector<ClusterSpec> load_clusters(const std::filesystem::path& path);

/// Resolves member names to manifest indices; throws LookupError on unknown
/// styles and ValidationError on duplicates or overlapping clusters.
std::vector<std::vector<std::size_t>> resolve_clusters(const std::vector<ClusterSpec>& clusters,
                                                       const StyleManifest& manifest);

// The metrics below return raw (unscaled) values.

/// Per template, population variance across descriptors of each style's
/// mean probability, summed over styles, averaged over templates.
double full_gen_bias(const StyleGrid& grid, Warnings* warnings = nullptr);
/// As full_gen_bias with the style sum restricted to the cluster.
double partial_gen_bias(const StyleGrid& grid, const ClusterSpec& cluster,
                        Warnings* warnings = nullptr);
/// Sums the cluster's probabilities per (template, descriptor) before
/// taking the variance across descriptors.
double summed_cluster_gen_bias(const StyleGrid& grid, const ClusterSpec& cluster,
                               Warnings* warnings = nullptr);
/// full_gen_bias over the descriptors of one axis.
double axis_filtered_fgb(const StyleGrid& grid, std::string_view axis,
                         Warnings* warnings = nullptr);

struct ClusterBias {
  std::string name;
  double pgb_x1000 = 0.0;
  double scgb_x1000 = 0.0;
};

struct GenBiasReport {
  double fgb_x1000 = 0.0;
  std::vector<ClusterBias> per_cluster;
  std::optional<std::string> axis_filter;
  Warnings warnings;
};

GenBiasReport gen_bias_report(const StyleGrid& grid, const std::vector<ClusterSpec>& clusters,
                              std::optional<std::string> axis = std::nullopt);

enum class Linkage { average };
enum class StyleDistance { pearson };

struct Merge {
  std::size_t left = 0;
  std::size_t right = 0;
  double height = 0.0;
  std::size_t size = 0;
};

/// Leaves are node ids [0, leaves.size()); merge k creates node
/// leaves.size() + k. Constant styles have no defined correlation and are
/// kept out of the tree in `isolated`.
struct Dendrogram {
  std::vector<std::string> leaves;
  std::vector<Merge> merges;
  std::vector<std::string> isolated;

  std::vector<std::string> members(std::size_t node) const;
};

/// Average-linkage agglomerative clustering of style dimensions under
/// 1 - Pearson correlation across every response in the grid.
Dendrogram cluster_styles(const StyleGrid& grid, Linkage linkage = Linkage::average,
                          StyleDistance distance = StyleDistance::pearson,
                          Warnings* warnings = nullptr);

/// Same clustering over explicit per-response series (rows = responses).
Dendrogram cluster_series(const std::vector<std::string>& names,
                          const std::vector<StyleVector>& rows, Warnings* warnings = nullptr);

/// Largest subtree containing `style` whose merge height is <= height.
std::vector<std::string> cluster_around(const Dendrogram& tree, std::string_view style,
                                        double height);

/// Flat clusters obtained by cutting the tree at `height`.
std::vector<std::vector<std::string>> cut_dendrogram(const Dendrogram& tree, double height);

}  // namespace hb
