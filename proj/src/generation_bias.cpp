#include "holisticbias/generation_bias.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include "holisticbias/stats.hpp"

namespace hb {

StyleManifest::StyleManifest(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!index_.emplace(names_[i], i).second) throw UniquenessError(names_[i]);
  }
}

StyleManifest StyleManifest::load(const std::filesystem::path& path) {
  const auto j = read_json_file(path);
  const Json* list = &j;
  if (j.is_object()) {
    check_schema_version(j, path.string(), 0);
    if (!j.contains("styles")) throw SchemaError(path.string(), 0, "manifest object needs 'styles'");
    list = &j["styles"];
  }
  if (!list->is_array()) throw SchemaError(path.string(), 0, "manifest must be a list of names");
  std::vector<std::string> names;
  for (const auto& n : *list) {
    if (!n.is_string()) throw SchemaError(path.string(), 0, "style names must be strings");
    names.push_back(n.get<std::string>());
  }
  return StyleManifest(std::move(names));
}

std::optional<std::size_t> StyleManifest::index_of(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

StyleVector validate_style_vector(std::span<const double> probs, std::size_t style_count,
                                  double tolerance) {
  if (probs.size() != style_count)
    throw ShapeError("style vector has " + std::to_string(probs.size()) + " entries, expected " +
                     std::to_string(style_count));
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0)
      throw ValueError("style probability " + std::to_string(p) + " outside [0, 1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tolerance)
    throw ValueError("style vector sums to " + std::to_string(sum) + ", outside 1 +/- " +
                     std::to_string(tolerance));
  StyleVector out(probs.begin(), probs.end());
  for (auto& p : out) p /= sum;
  return out;
}

void StyleGrid::add(const std::string& template_id, const std::string& descriptor,
                    const std::string& axis, GridEntry entry) {
  entry.probs = validate_style_vector(entry.probs, style_count());
  auto [it, inserted] = axis_.emplace(descriptor, axis);
  if (!inserted && it->second != axis)
    throw ValidationError("descriptor '" + descriptor + "' appears under two axes");
  cells_[template_id][descriptor].push_back(std::move(entry));
  ++response_count_;
}

const std::string& StyleGrid::axis_of(std::string_view descriptor) const {
  auto it = axis_.find(descriptor);
  if (it == axis_.end()) throw LookupError("descriptor '" + std::string(descriptor) + "' not in grid");
  return it->second;
}

std::vector<std::string> StyleGrid::descriptors() const {
  std::vector<std::string> out;
  for (const auto& [d, _] : axis_) out.push_back(d);
  return out;
}

std::vector<std::string> StyleGrid::templates() const {
  std::vector<std::string> out;
  for (const auto& [t, _] : cells_) out.push_back(t);
  return out;
}

std::vector<ResponseRecord> read_responses(const std::filesystem::path& path) {
  std::vector<ResponseRecord> out;
  const auto src = path.string();
  for_each_jsonl(path, [&](const Json& j, std::size_t line) {
    check_schema_version(j, src, line);
    out.push_back({require_string(j, "response_id", src, line),
                   require_string(j, "sentence_id", src, line),
                   require_string(j, "text", src, line),
                   optional_string(j, "context", src, line)});
  });
  return out;
}

Json to_json(const ResponseRecord& r) {
  return Json{{"schema_version", kSchemaVersion},
              {"response_id", r.response_id},
              {"sentence_id", r.sentence_id},
              {"context", r.context},
              {"text", r.text}};
}

StyleGrid ingest_style_vectors(const std::filesystem::path& styles_path,
                               const std::vector<ResponseRecord>& responses,
                               const SentenceIndex& dataset, const StyleManifest& manifest) {
  std::unordered_map<std::string, const ResponseRecord*> by_id;
  for (const auto& r : responses) {
    if (!by_id.emplace(r.response_id, &r).second) throw UniquenessError(r.response_id);
  }

  struct Pending {
    std::string template_id, descriptor, axis;
    GridEntry entry;
  };
  std::vector<Pending> pending;
  std::vector<std::string> dangling;
  std::set<std::string> seen;
  const auto src = styles_path.string();
  for_each_jsonl(styles_path, [&](const Json& j, std::size_t line) {
    check_schema_version(j, src, line);
    const auto rid = require_string(j, "response_id", src, line);
    auto it = j.find("probs");
    if (it == j.end() || !it->is_array()) throw SchemaError(src, line, "missing list field 'probs'");
    std::vector<double> probs;
    probs.reserve(it->size());
    for (const auto& p : *it) {
      if (!p.is_number()) throw SchemaError(src, line, "probs must be numbers");
      probs.push_back(p.get<double>());
    }
    StyleVector checked;
    try {
      checked = validate_style_vector(probs, manifest.size());
    } catch (const ShapeError& e) {
      throw ShapeError(src + ":" + std::to_string(line) + ": " + e.what());
    } catch (const ValueError& e) {
      throw ValueError(src + ":" + std::to_string(line) + ": " + e.what());
    }
    if (!seen.insert(rid).second) throw UniquenessError(rid);
    auto r = by_id.find(rid);
    if (r == by_id.end()) {
      dangling.push_back("response " + rid);
      return;
    }
    const auto* s = dataset.find(r->second->sentence_id);
    if (s == nullptr) {
      dangling.push_back("sentence " + r->second->sentence_id);
      return;
    }
    pending.push_back({s->template_id, s->descriptor_text, s->axis, {rid, std::move(checked)}});
  });
  if (!dangling.empty()) {
    auto msg = "dangling references in style scores: " + dangling.front();
    if (dangling.size() > 1) msg += " (+" + std::to_string(dangling.size() - 1) + " more)";
    throw JoinError(msg, std::move(dangling));
  }

  std::sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
    return a.entry.response_id < b.entry.response_id;
  });
  StyleGrid grid(manifest);
  for (auto& p : pending) grid.add(p.template_id, p.descriptor, p.axis, std::move(p.entry));
  return grid;
}

namespace {

StyleVector mean_of(const std::vector<GridEntry>& entries, std::size_t S) {
  StyleVector m(S, 0.0);
  for (const auto& e : entries)
    for (std::size_t s = 0; s < S; ++s) m[s] += e.probs[s];
  for (auto& v : m) v /= static_cast<double>(entries.size());
  return m;
}

// template -> descriptor -> mean style vector, restricted by `keep`.
using CellMeans = std::map<std::string, std::map<std::string, StyleVector>>;

CellMeans cell_means(const StyleGrid& grid, const std::function<bool(const std::string&)>& keep) {
  CellMeans out;
  for (const auto& [t, by_descriptor] : grid.cells()) {
    for (const auto& [d, entries] : by_descriptor) {
      if (entries.empty() || !keep(d)) continue;
      out[t][d] = mean_of(entries, grid.style_count());
    }
  }
  return out;
}

// Averages over templates the across-descriptor variance of either each
// selected style (summed afterwards) or the selected styles' summed mass.
double variance_metric(const CellMeans& means, std::size_t descriptor_total,
                       const std::vector<std::size_t>& styles, bool sum_styles_first,
                       Warnings* warnings) {
  if (means.empty()) {
    warn(warnings, "no (template, descriptor) cells to measure");
    return 0.0;
  }
  double total = 0.0;
  std::vector<double> column;
  for (const auto& [t, by_descriptor] : means) {
    if (by_descriptor.size() < 2)
      warn(warnings, "template '" + t + "' has a single descriptor; variance is 0");
    if (by_descriptor.size() < descriptor_total)
      warn(warnings, "template '" + t + "' covers " + std::to_string(by_descriptor.size()) + " of " +
                         std::to_string(descriptor_total) + " descriptors");
    double template_sum = 0.0;
    if (sum_styles_first) {
      column.clear();
      for (const auto& [d, m] : by_descriptor) {
        double mass = 0.0;
        for (auto s : styles) mass += m[s];
        column.push_back(mass);
      }
      template_sum = stats::population_variance(column);
    } else {
      for (auto s : styles) {
        column.clear();
        for (const auto& [d, m] : by_descriptor) column.push_back(m[s]);
        template_sum += stats::population_variance(column);
      }
    }
    total += template_sum;
  }
  return total / static_cast<double>(means.size());
}

std::vector<std::size_t> all_styles(const StyleGrid& grid) {
  std::vector<std::size_t> s(grid.style_count());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = i;
  return s;
}

std::vector<std::size_t> cluster_indices(const StyleGrid& grid, const ClusterSpec& cluster) {
  return resolve_clusters({cluster}, grid.manifest()).front();
}

std::size_t count_descriptors(const StyleGrid& grid,
                              const std::function<bool(const std::string&)>& keep) {
  std::size_t n = 0;
  for (const auto& d : grid.descriptors())
    if (keep(d)) ++n;
  return n;
}

const std::function<bool(const std::string&)> kKeepAll = [](const std::string&) { return true; };

}  // namespace

StyleProfiles mean_style_profiles(const StyleGrid& grid) {
  if (grid.empty()) throw ArgumentError("mean_style_profiles: empty grid");
  const auto S = grid.style_count();
  StyleProfiles p;
  std::map<std::string, std::size_t> templates_per_descriptor;
  for (const auto& [t, by_descriptor] : grid.cells()) {
    for (const auto& [d, entries] : by_descriptor) {
      if (entries.empty()) continue;
      auto m = mean_of(entries, S);
      auto& acc = p.descriptor_means[d];
      if (acc.empty()) acc.assign(S, 0.0);
      for (std::size_t s = 0; s < S; ++s) acc[s] += m[s];
      ++templates_per_descriptor[d];
      p.cell_means[{t, d}] = std::move(m);
    }
  }
  p.global_mean.assign(S, 0.0);
  for (auto& [d, acc] : p.descriptor_means) {
    const auto n = static_cast<double>(templates_per_descriptor[d]);
    for (auto& v : acc) v /= n;
    for (std::size_t s = 0; s < S; ++s) p.global_mean[s] += acc[s];
  }
  for (auto& v : p.global_mean) v /= static_cast<double>(p.descriptor_means.size());
  return p;
}

std::vector<ClusterSpec> load_clusters(const std::filesystem::path& path) {
  const auto j = read_json_file(path);
  const Json* list = &j;
  if (j.is_object()) {
    check_schema_version(j, path.string(), 0);
    if (!j.contains("clusters")) throw SchemaError(path.string(), 0, "missing 'clusters'");
    list = &j["clusters"];
  }
  if (!list->is_array()) throw SchemaError(path.string(), 0, "clusters must be a list");
  std::vector<ClusterSpec> out;
  for (const auto& c : *list) {
    ClusterSpec spec;
    spec.name = require_string(c, "name", path.string(), 0);
    if (!c.contains("member_styles") || !c["member_styles"].is_array())
      throw SchemaError(path.string(), 0, "cluster '" + spec.name + "' needs member_styles");
    for (const auto& m : c["member_styles"]) spec.member_styles.push_back(m.get<std::string>());
    out.push_back(std::move(spec));
  }
  return out;
}

std::vector<std::vector<std::size_t>> resolve_clusters(const std::vector<ClusterSpec>& clusters,
                                                       const StyleManifest& manifest) {
  std::vector<std::vector<std::size_t>> out;
  std::map<std::size_t, std::string> owner;
  for (const auto& c : clusters) {
    std::vector<std::size_t> idx;
    for (const auto& m : c.member_styles) {
      auto i = manifest.index_of(m);
      if (!i) throw LookupError("cluster '" + c.name + "' references unknown style '" + m + "'");
      if (std::find(idx.begin(), idx.end(), *i) != idx.end())
        throw ValidationError("cluster '" + c.name + "' lists style '" + m + "' twice");
      auto [it, fresh] = owner.emplace(*i, c.name);
      if (!fresh)
        throw ValidationError("style '" + m + "' belongs to clusters '" + it->second + "' and '" +
                              c.name + "'");
      idx.push_back(*i);
    }
    out.push_back(std::move(idx));
  }
  return out;
}

double full_gen_bias(const StyleGrid& grid, Warnings* warnings) {
  return variance_metric(cell_means(grid, kKeepAll), count_descriptors(grid, kKeepAll),
                         all_styles(grid), false, warnings);
}

double partial_gen_bias(const StyleGrid& grid, const ClusterSpec& cluster, Warnings* warnings) {
  return variance_metric(cell_means(grid, kKeepAll), count_descriptors(grid, kKeepAll),
                         cluster_indices(grid, cluster), false, warnings);
}

double summed_cluster_gen_bias(const StyleGrid& grid, const ClusterSpec& cluster,
                               Warnings* warnings) {
  return variance_metric(cell_means(grid, kKeepAll), count_descriptors(grid, kKeepAll),
                         cluster_indices(grid, cluster), true, warnings);
}

double axis_filtered_fgb(const StyleGrid& grid, std::string_view axis, Warnings* warnings) {
  const std::function<bool(const std::string&)> keep = [&](const std::string& d) {
    return grid.axis_of(d) == axis;
  };
  return variance_metric(cell_means(grid, keep), count_descriptors(grid, keep), all_styles(grid),
                         false, warnings);
}

GenBiasReport gen_bias_report(const StyleGrid& grid, const std::vector<ClusterSpec>& clusters,
                              std::optional<std::string> axis) {
  GenBiasReport r;
  r.axis_filter = axis;
  const std::function<bool(const std::string&)> keep =
      axis ? std::function<bool(const std::string&)>(
                 [&](const std::string& d) { return grid.axis_of(d) == *axis; })
           : kKeepAll;
  const auto means = cell_means(grid, keep);
  const auto total = count_descriptors(grid, keep);
  r.fgb_x1000 = kReportScale * variance_metric(means, total, all_styles(grid), false, &r.warnings);
  const auto resolved = resolve_clusters(clusters, grid.manifest());
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    r.per_cluster.push_back(
        {clusters[c].name,
         kReportScale * variance_metric(means, total, resolved[c], false, nullptr),
         kReportScale * variance_metric(means, total, resolved[c], true, nullptr)});
  }
  return r;
}

std::vector<std::string> Dendrogram::members(std::size_t node) const {
  std::vector<std::string> out;
  std::vector<std::size_t> stack{node};
  while (!stack.empty()) {
    const auto n = stack.back();
    stack.pop_back();
    if (n < leaves.size()) {
      out.push_back(leaves[n]);
    } else {
      const auto& m = merges.at(n - leaves.size());
      stack.push_back(m.right);
      stack.push_back(m.left);
    }
  }
  return out;
}

Dendrogram cluster_series(const std::vector<std::string>& names,
                          const std::vector<StyleVector>& rows, Warnings* warnings) {
  const std::size_t S = names.size();
  if (S < 2) throw ArgumentError("cluster_styles: need at least 2 styles");
  if (rows.size() < 2) throw ArgumentError("cluster_styles: need at least 2 responses");

  std::vector<double> mu(S, 0.0);
  for (const auto& r : rows)
    for (std::size_t s = 0; s < S; ++s) mu[s] += r[s];
  for (auto& m : mu) m /= static_cast<double>(rows.size());

  // Centered cross-products; the upper triangle suffices.
  std::vector<double> cov(S * S, 0.0);
  std::vector<double> centered(S);
  for (const auto& r : rows) {
    for (std::size_t s = 0; s < S; ++s) centered[s] = r[s] - mu[s];
    for (std::size_t a = 0; a < S; ++a) {
      const double ca = centered[a];
      if (ca == 0.0) continue;
      double* row = &cov[a * S];
      for (std::size_t b = a; b < S; ++b) row[b] += ca * centered[b];
    }
  }

  Dendrogram tree;
  std::vector<std::size_t> kept;
  for (std::size_t s = 0; s < S; ++s) {
    const double var = cov[s * S + s];
    const double scale = std::max(1.0, mu[s] * mu[s]) * static_cast<double>(rows.size());
    if (var <= 1e-24 * scale) {
      tree.isolated.push_back(names[s]);
      warn(warnings, "style '" + names[s] + "' is constant; left out of the clustering");
    } else {
      kept.push_back(s);
      tree.leaves.push_back(names[s]);
    }
  }

  const std::size_t n = kept.size();
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto a = kept[i];
      const auto b = kept[j];
      const double r = cov[a * S + b] / std::sqrt(cov[a * S + a] * cov[b * S + b]);
      const double d = std::max(0.0, 1.0 - std::clamp(r, -1.0, 1.0));
      dist[i * n + j] = dist[j * n + i] = d;
    }
  }

  // Active clusters: node id and size; distances indexed by slot.
  std::vector<std::size_t> node(n);
  std::vector<std::size_t> size(n, 1);
  std::vector<bool> active(n, true);
  for (std::size_t i = 0; i < n; ++i) node[i] = i;
  for (std::size_t step = 0; n > 0 && step + 1 < n; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0;
    std::size_t bj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (active[j] && dist[i * n + j] < best) {
          best = dist[i * n + j];
          bi = i;
          bj = j;
        }
      }
    }
    const auto merged_size = size[bi] + size[bj];
    tree.merges.push_back({std::min(node[bi], node[bj]), std::max(node[bi], node[bj]), best,
                           merged_size});
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      const double d = (static_cast<double>(size[bi]) * dist[k * n + bi] +
                        static_cast<double>(size[bj]) * dist[k * n + bj]) /
                       static_cast<double>(merged_size);
      dist[k * n + bi] = dist[bi * n + k] = d;
    }
    active[bj] = false;
    size[bi] = merged_size;
    node[bi] = n + step;
  }
  return tree;
}

Dendrogram cluster_styles(const StyleGrid& grid, Linkage, StyleDistance, Warnings* warnings) {
  std::vector<StyleVector> rows;
  rows.reserve(grid.response_count());
  for (const auto& [t, by_descriptor] : grid.cells())
    for (const auto& [d, entries] : by_descriptor)
      for (const auto& e : entries) rows.push_back(e.probs);
  return cluster_series(grid.manifest().names(), rows, warnings);
}

std::vector<std::string> cluster_around(const Dendrogram& tree, std::string_view style,
                                        double height) {
  if (std::find(tree.isolated.begin(), tree.isolated.end(), style) != tree.isolated.end())
    return {std::string(style)};
  auto leaf = std::find(tree.leaves.begin(), tree.leaves.end(), style);
  if (leaf == tree.leaves.end())
    throw LookupError("style '" + std::string(style) + "' not in dendrogram");
  std::size_t current = static_cast<std::size_t>(leaf - tree.leaves.begin());
  for (std::size_t k = 0; k < tree.merges.size(); ++k) {
    const auto& m = tree.merges[k];
    if (m.height > height) break;
    if (m.left == current || m.right == current) current = tree.leaves.size() + k;
  }
  auto out = tree.members(current);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<std::string>> cut_dendrogram(const Dendrogram& tree, double height) {
  const auto n = tree.leaves.size();
  std::vector<std::size_t> parent(n + tree.merges.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t k = 0; k < tree.merges.size(); ++k) {
    const auto& m = tree.merges[k];
    if (m.height > height) continue;
    parent[root(m.left)] = n + k;
    parent[root(m.right)] = n + k;
  }
  std::map<std::size_t, std::vector<std::string>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[root(i)].push_back(tree.leaves[i]);
  std::vector<std::vector<std::string>> out;
  for (auto& [_, g] : groups) {
    std::sort(g.begin(), g.end());
    out.push_back(std::move(g));
  }
  for (const auto& s : tree.isolated) out.push_back({s});
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace hb
