#include "holisticbias/cli.hpp"

#include <algorithm>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "holisticbias/classifier_bias.hpp"
#include "holisticbias/compiler.hpp"
#include "holisticbias/errors.hpp"
#include "holisticbias/generation_bias.hpp"
#include "holisticbias/harness.hpp"
#include "holisticbias/likelihood_bias.hpp"
#include "holisticbias/mitigation.hpp"
#include "holisticbias/registry.hpp"

namespace hb {

namespace {

namespace fs = std::filesystem;

struct Globals {
  std::string data_dir = "data";
  std::string out;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

void print_warnings(const Warnings& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

void require_out(const Globals& g) {
  if (g.out.empty()) throw ArgumentError("--out is required");
}

// --- validate -------------------------------------------------------------

int cmd_validate(const Globals& g, std::ostream& out) {
  const auto reg = load_registry(fs::path(g.data_dir));
  const auto report = validate_registry(reg);
  out << "descriptors: " << report.descriptor_count << '\n'
      << "axes: " << report.axis_count << '\n'
      << "female_only_descriptors: " << report.female_only << '\n'
      << "male_only_descriptors: " << report.male_only << '\n'
      << "nouns (female/male/unspecified): " << report.female_nouns << '/' << report.male_nouns
      << '/' << report.unspecified_nouns << '\n'
      << "templates: " << report.template_count << '\n';
  for (const auto& w : report.warnings) out << "warning: " << w << '\n';
  for (const auto& v : report.violations) out << "violation: " << v << '\n';
  out << (report.ok() ? "OK" : "FAILED") << '\n';
  return report.ok() ? 0 : 1;
}

// --- compile --------------------------------------------------------------

int cmd_compile(const Globals& g, const std::string& variants, std::ostream& out) {
  require_out(g);
  VariationPolicy policy;
  if (variants == "none") policy = VariationPolicy::none();
  else if (variants == "all") policy = VariationPolicy::all();
  else if (variants == "sampled") policy = VariationPolicy::sampled(g.seed);
  else throw ArgumentError("--variants must be none, all or sampled");

  const auto reg = load_registry(fs::path(g.data_dir));
  const auto rules = ArticleRules::load_from_dir(g.data_dir);
  auto file = open_output(g.out);
  const auto n = compile_dataset(reg, rules, policy, [&](const SentenceRecord& s) {
    file << to_json(s).dump() << '\n';
  });
  out << "wrote " << n << " sentences to " << g.out << '\n';
  return 0;
}

// --- likelihood -----------------------------------------------------------

struct LikelihoodArgs {
  std::string sentences, scores, template_id{kDefaultLikelihoodTemplate}, summary;
  std::vector<std::string> axes;
  double alpha = stats::kDefaultAlpha;
  std::size_t min_len = 6, max_len = 19;
};

int cmd_likelihood(const Globals& g, const LikelihoodArgs& a, std::ostream& out,
                   std::ostream& err) {
  require_out(g);
  const auto dataset = SentenceIndex::load(a.sentences);
  const auto table = ingest_perplexities(a.scores, dataset);
  if (table.unscored > 0)
    err << "warning: " << table.unscored << " sentences have no perplexity score\n";

  std::vector<std::string> axes = a.axes;
  if (axes.empty())
    for (auto ax : kAxes) axes.emplace_back(ax);

  PairwiseOptions opts{a.min_len, a.max_len, a.alpha};
  auto file = open_output(g.out);
  file << "axis,template_id,eligible_descriptors,pairs,significant_pairs,percent_significant,"
          "low_ppl_descriptors,high_ppl_descriptors\n";
  std::size_t rows = 0;
  for (const auto& axis : axes) {
    try {
      const auto r = pairwise_significance(table, axis, a.template_id, opts);
      file << csv_field(r.axis) << ',' << csv_field(r.template_id) << ','
           << r.eligible_descriptors.size() << ',' << r.pair_count << ',' << r.significant_pairs
           << ',' << format_real(r.percent_significant, 4) << ','
           << csv_field(join(r.low_ppl_descriptors, "; ")) << ','
           << csv_field(join(r.high_ppl_descriptors, "; ")) << '\n';
      ++rows;
    } catch (const InsufficientDataError& e) {
      err << "warning: axis " << axis << ": " << e.what() << '\n';
    }
  }
  if (!a.summary.empty()) {
    auto s = open_output(a.summary);
    s << "axis,template_id,count,min,q1,median,q3,max,mean\n";
    for (const auto& row : distribution_summary(table)) {
      const auto& m = row.summary;
      s << csv_field(row.axis) << ',' << csv_field(row.template_id) << ',' << m.count << ','
        << format_real(m.min) << ',' << format_real(m.q1) << ',' << format_real(m.median) << ','
        << format_real(m.q3) << ',' << format_real(m.max) << ',' << format_real(m.mean) << '\n';
    }
  }
  out << "wrote " << rows << " axis rows to " << g.out << '\n';
  return 0;
}

// --- style-grid based commands -------------------------------------------

struct GridArgs {
  std::string sentences, responses, styles, manifest;
};

void add_grid_options(CLI::App* sub, GridArgs& a) {
  sub->add_option("--sentences", a.sentences, "sentences.jsonl")->required();
  sub->add_option("--responses", a.responses, "responses.jsonl")->required();
  sub->add_option("--styles", a.styles, "styles.jsonl")->required();
  sub->add_option("--manifest", a.manifest,
                  "style manifest (default: <data-dir>/mock_style_manifest.json)");
}

struct LoadedGrid {
  std::vector<ResponseRecord> responses;
  StyleGrid grid;
};

LoadedGrid load_grid(const Globals& g, const GridArgs& a) {
  const auto manifest = StyleManifest::load(
      a.manifest.empty() ? fs::path(g.data_dir) / "mock_style_manifest.json" : fs::path(a.manifest));
  const auto dataset = SentenceIndex::load(a.sentences);
  LoadedGrid out;
  out.responses = read_responses(a.responses);
  out.grid = ingest_style_vectors(a.styles, out.responses, dataset, manifest);
  return out;
}

int cmd_genbias(const Globals& g, const GridArgs& a, const std::string& clusters_path,
                const std::string& axis, const std::string& label, std::ostream& out,
                std::ostream& err) {
  require_out(g);
  const auto loaded = load_grid(g, a);
  const auto clusters = load_clusters(
      clusters_path.empty() ? fs::path(g.data_dir) / "clusters.json" : fs::path(clusters_path));
  resolve_clusters(clusters, loaded.grid.manifest());

  const auto report =
      gen_bias_report(loaded.grid, clusters, axis.empty() ? std::nullopt : std::optional(axis));
  print_warnings(report.warnings, err);

  const fs::path dir(g.out);
  {
    auto f = open_output(dir / "genbias.csv");
    f << "label,fgb";
    for (const auto& c : report.per_cluster) f << ',' << csv_field(c.name + "_pgb");
    for (const auto& c : report.per_cluster) f << ',' << csv_field(c.name + "_scgb");
    f << '\n' << csv_field(label) << ',' << format_real(report.fgb_x1000);
    for (const auto& c : report.per_cluster) f << ',' << format_real(c.pgb_x1000);
    for (const auto& c : report.per_cluster) f << ',' << format_real(c.scgb_x1000);
    f << '\n';
  }
  {
    std::set<std::string> present;
    for (const auto& d : loaded.grid.descriptors()) present.insert(loaded.grid.axis_of(d));
    auto f = open_output(dir / "genbias_by_axis.csv");
    f << "axis,descriptors,fgb\n";
    for (auto ax : kAxes) {
      if (!present.contains(std::string(ax))) continue;
      std::size_t n = 0;
      for (const auto& d : loaded.grid.descriptors())
        if (loaded.grid.axis_of(d) == ax) ++n;
      Warnings w;
      const double v = axis_filtered_fgb(loaded.grid, ax, &w) * kReportScale;
      f << ax << ',' << n << ',' << format_real(v) << '\n';
    }
  }
  out << "FGB x1000 = " << format_real(report.fgb_x1000, 4) << '\n';
  return 0;
}

int cmd_cluster_styles(const Globals& g, const GridArgs& a, double cut, std::ostream& out,
                       std::ostream& err) {
  require_out(g);
  const auto loaded = load_grid(g, a);
  Warnings warnings;
  const auto tree = cluster_styles(loaded.grid, Linkage::average, StyleDistance::pearson, &warnings);
  print_warnings(warnings, err);
  auto f = open_output(g.out);
  if (cut >= 0) {
    f << "cluster,styles\n";
    const auto flat = cut_dendrogram(tree, cut);
    for (std::size_t i = 0; i < flat.size(); ++i) f << i << ',' << csv_field(join(flat[i], "; ")) << '\n';
    out << flat.size() << " clusters at height " << format_real(cut, 4) << '\n';
    return 0;
  }
  f << "node,left,right,height,size,members\n";
  const auto n = tree.leaves.size();
  for (std::size_t k = 0; k < tree.merges.size(); ++k) {
    const auto& m = tree.merges[k];
    f << n + k << ',' << m.left << ',' << m.right << ',' << format_real(m.height) << ',' << m.size
      << ',' << csv_field(join(tree.members(n + k), "; ")) << '\n';
  }
  for (const auto& iso : tree.isolated) f << "isolated,,,,1," << csv_field(iso) << '\n';
  out << tree.merges.size() << " merges over " << n << " styles\n";
  return 0;
}

int cmd_tag_bias(const Globals& g, const GridArgs& a, int alpha, double beta,
                 const std::string& preset, std::ostream& out, std::ostream& err) {
  require_out(g);
  BiasProjectionConfig config{alpha, beta};
  if (preset == "dialogpt") config.beta = kBetaDialoGptScale;
  else if (preset == "blenderbot") config.beta = kBetaBlenderBotScale;
  else if (!preset.empty()) throw ArgumentError("--beta-preset must be dialogpt or blenderbot");
  config.validate();

  const auto loaded = load_grid(g, a);
  Warnings warnings;
  const auto pairs = tag_pairs(loaded.grid, loaded.responses, config, &warnings);
  print_warnings(warnings, err);
  auto f = open_output(g.out);
  std::size_t biased = 0;
  for (const auto& p : pairs) {
    if (p.label == BiasLabel::bias) ++biased;
    f << to_json(p).dump() << '\n';
  }
  out << "tagged " << pairs.size() << " pairs, " << biased << " labelled bias\n";
  return 0;
}

// --- offense / corpus-freq -------------------------------------------------

struct OffenseArgs {
  std::string sentences, scores, responses, edges;
  std::vector<std::string> templates;
  double threshold = kOffensiveThreshold;
};

std::vector<double> parse_edges(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ArgumentError("bad bucket edge '" + item + "'");
    }
  }
  return out;
}

int cmd_offense(const Globals& g, const OffenseArgs& a, std::ostream& out, std::ostream& err) {
  require_out(g);
  const auto dataset = SentenceIndex::load(a.sentences);
  std::vector<ResponseRecord> responses;
  if (!a.responses.empty()) responses = read_responses(a.responses);
  const auto table = build_offense_table(read_offense_scores(a.scores), dataset, responses);

  const fs::path dir(g.out);
  {
    auto f = open_output(dir / "offense_by_template.csv");
    f << "template_id,mean,std,descriptors\n";
    for (const auto& r : offense_by_template(table))
      f << csv_field(r.template_id) << ',' << format_real(r.mean) << ',' << format_real(r.stddev)
        << ',' << r.descriptors << '\n';
  }
  {
    std::vector<std::string> templates = a.templates;
    if (templates.empty()) {
      std::set<std::string> present;
      for (const auto& e : table.entries) present.insert(e.template_id);
      for (const auto* t : {"im", "i_love_plural", "i_hate_plural"})
        if (present.contains(t)) templates.emplace_back(t);
    }
    auto f = open_output(dir / "offense_by_descriptor.csv");
    f << "template_id,bucket_low,bucket_high,descriptor,axis,mean,count\n";
    for (const auto& t : templates) {
      const auto edges = a.edges.empty() ? default_bucket_edges(t) : parse_edges(a.edges);
      try {
        for (const auto& b : offense_by_descriptor(table, t, edges))
          for (const auto& d : b.descriptors)
            f << csv_field(t) << ',' << format_real(b.low, 5) << ',' << format_real(b.high, 5) << ','
              << csv_field(d.nonce ? d.descriptor + "*" : d.descriptor) << ',' << d.axis << ','
              << format_real(d.mean_prob) << ',' << d.count << '\n';
      } catch (const InsufficientDataError& e) {
        err << "warning: " << e.what() << '\n';
      }
    }
  }
  const double frac = offensive_fraction(table, a.threshold);
  {
    auto f = open_output(dir / "offensive_fraction.csv");
    f << "threshold,entries,fraction\n"
      << format_real(a.threshold, 4) << ',' << table.entries.size() << ',' << format_real(frac)
      << '\n';
  }
  out << "offensive fraction (>= " << format_real(a.threshold, 2) << "): " << format_real(frac, 4)
      << '\n';
  return 0;
}

int cmd_corpus_freq(const Globals& g, const std::string& corpus, std::uint64_t sample,
                    std::ostream& out) {
  require_out(g);
  const auto reg = load_registry(fs::path(g.data_dir));
  const auto descriptors = single_word_descriptors(reg);
  auto in = open_input(corpus);
  const auto report = descriptor_frequency(in, descriptors, {sample, g.seed});
  auto f = open_output(g.out);
  f << "descriptor,occurrences,examples_scanned,frequency\n";
  for (const auto& d : report.per_descriptor)
    f << csv_field(d.descriptor) << ',' << d.occurrences << ',' << report.examples_scanned << ','
      << format_real(d.frequency, 9) << '\n';
  out << "scanned " << report.examples_scanned << " examples for " << descriptors.size()
      << " descriptors\n";
  return 0;
}

// --- mock-score / mask-responses / validate-schema -------------------------

struct MockArgs {
  std::string sentences, profile, emit, responses, manifest;
  std::size_t per_sentence = 1;
};

int cmd_mock_score(const Globals& g, const MockArgs& a, std::ostream& out) {
  require_out(g);
  auto profile = MockProfile::load(a.profile);
  if (g.seed_given) profile.seed = g.seed;
  auto f = open_output(g.out);
  std::size_t written = 0;
  const auto src = a.sentences;

  auto each_sentence = [&](const std::function<void(const SentenceRecord&)>& fn) {
    for_each_jsonl(fs::path(a.sentences), [&](const Json& j, std::size_t line) {
      fn(sentence_from_json(j, src, line));
    });
  };

  if (a.emit == "ppl") {
    each_sentence([&](const SentenceRecord& s) {
      f << Json{{"schema_version", kSchemaVersion}, {"sentence_id", s.id},
                {"perplexity", mock_perplexity(s, profile)}}.dump()
        << '\n';
      ++written;
    });
  } else if (a.emit == "responses") {
    if (a.per_sentence == 0) throw ArgumentError("--per-sentence must be positive");
    each_sentence([&](const SentenceRecord& s) {
      for (std::size_t k = 0; k < a.per_sentence; ++k) {
        f << to_json(mock_response(s, profile, k)).dump() << '\n';
        ++written;
      }
    });
  } else if (a.emit == "styles") {
    if (a.responses.empty()) throw ArgumentError("--emit styles needs --responses");
    const auto manifest = StyleManifest::load(
        a.manifest.empty() ? fs::path(g.data_dir) / "mock_style_manifest.json" : fs::path(a.manifest));
    profile.validate(manifest.size());
    const auto dataset = SentenceIndex::load(a.sentences);
    for (const auto& r : read_responses(a.responses)) {
      const auto* s = dataset.find(r.sentence_id);
      if (s == nullptr) throw JoinError("response " + r.response_id + " references unknown sentence", {r.sentence_id});
      f << Json{{"schema_version", kSchemaVersion}, {"response_id", r.response_id},
                {"probs", mock_style_vector(*s, profile, manifest.size(), r.response_id)}}.dump()
        << '\n';
      ++written;
    }
  } else if (a.emit == "offense") {
    const auto reg = load_registry(fs::path(g.data_dir));
    auto stance_of = [&](const std::string& template_id) {
      const auto* t = reg.find_template(template_id);
      if (t == nullptr) throw LookupError("unknown template '" + template_id + "'");
      return t->stance;
    };
    auto emit = [&](const std::string& id, double p) {
      f << Json{{"schema_version", kSchemaVersion}, {"id", id}, {"prob_offensive", p}}.dump() << '\n';
      ++written;
    };
    if (a.responses.empty()) {
      each_sentence([&](const SentenceRecord& s) {
        emit(s.id, mock_offense(s, profile, stance_of(s.template_id)));
      });
    } else {
      const auto dataset = SentenceIndex::load(a.sentences);
      for (const auto& r : read_responses(a.responses)) {
        const auto* s = dataset.find(r.sentence_id);
        if (s == nullptr) throw JoinError("response " + r.response_id + " references unknown sentence", {r.sentence_id});
        emit(r.response_id, mock_offense(*s, profile, stance_of(s->template_id), r.response_id));
      }
    }
  } else {
    throw ArgumentError("--emit must be ppl, styles, offense or responses");
  }
  out << "wrote " << written << ' ' << a.emit << " records to " << g.out << '\n';
  return 0;
}

int cmd_mask_responses(const Globals& g, const std::string& sentences, const std::string& responses,
                       std::ostream& out) {
  require_out(g);
  const auto dataset = SentenceIndex::load(sentences);
  auto f = open_output(g.out);
  std::size_t n = 0;
  for (auto r : read_responses(responses)) {
    const auto* s = dataset.find(r.sentence_id);
    if (s == nullptr) throw JoinError("response " + r.response_id + " references unknown sentence", {r.sentence_id});
    r.text = prepare_for_style_classification(r.text, s->descriptor_text);
    f << to_json(r).dump() << '\n';
    ++n;
  }
  out << "masked " << n << " responses\n";
  return 0;
}

struct SchemaArgs {
  std::string kind, file, sentences, responses, manifest;
};

int cmd_validate_schema(const SchemaArgs& a, std::ostream& out) {
  const auto kind = parse_schema_kind(a.kind);
  if (!kind) throw ArgumentError("unknown --kind '" + a.kind + "'");
  SentenceIndex dataset;
  std::vector<ResponseRecord> responses;
  SchemaContext ctx;
  if (!a.sentences.empty()) {
    dataset = SentenceIndex::load(a.sentences);
    ctx.sentences = &dataset;
  }
  if (!a.responses.empty()) {
    responses = read_responses(a.responses);
    ctx.responses = &responses;
  }
  if (!a.manifest.empty()) ctx.style_count = StyleManifest::load(a.manifest).size();
  const auto report = validate_schema(fs::path(a.file), *kind, ctx);
  for (const auto& v : report.violations) out << "violation: " << v << '\n';
  out << report.records << " records, " << report.violations.size() << " violations\n";
  return report.ok() ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Descriptor-based demographic bias measurement toolkit", "hb"};
  app.fallthrough();
  app.require_subcommand(1);

  Globals g;
  app.add_option("--data-dir", g.data_dir, "registry data directory")->capture_default_str();
  app.add_option("--out", g.out, "output file or directory");
  auto* seed_opt = app.add_option("--seed", g.seed, "64-bit seed");

  auto* validate = app.add_subcommand("validate", "check the registry invariants");

  std::string variants = "none";
  auto* compile = app.add_subcommand("compile", "render the templated sentence dataset");
  compile->add_option("--variants", variants, "none|all|sampled")->capture_default_str();

  LikelihoodArgs la;
  auto* likelihood = app.add_subcommand("likelihood", "pairwise perplexity significance");
  likelihood->add_option("--sentences", la.sentences)->required();
  likelihood->add_option("--scores", la.scores, "ppl.jsonl")->required();
  likelihood->add_option("--template", la.template_id)->capture_default_str();
  likelihood->add_option("--alpha", la.alpha)->capture_default_str();
  likelihood->add_option("--axis", la.axes, "restrict to these axes");
  likelihood->add_option("--min-len", la.min_len)->capture_default_str();
  likelihood->add_option("--max-len", la.max_len)->capture_default_str();
  likelihood->add_option("--summary", la.summary, "per (axis, template) distribution CSV");

  GridArgs ga;
  std::string clusters_path, axis, label = "run";
  auto* genbias = app.add_subcommand("genbias", "style-variance generation bias");
  add_grid_options(genbias, ga);
  genbias->add_option("--clusters", clusters_path, "clusters.json (default: <data-dir>/clusters.json)");
  genbias->add_option("--axis", axis, "restrict to one axis");
  genbias->add_option("--label", label, "row label")->capture_default_str();

  double cut = -1;
  auto* cluster = app.add_subcommand("cluster-styles", "hierarchical clustering of styles");
  add_grid_options(cluster, ga);
  cluster->add_option("--cut", cut, "emit flat clusters cut at this height");

  int alpha = 0;
  double beta = kBetaBlenderBotScale;
  std::string preset;
  auto* tag = app.add_subcommand("tag-bias", "label responses with bias/no_bias tags");
  add_grid_options(tag, ga);
  tag->add_option("--alpha", alpha)->check(CLI::IsMember({0, 1, 2}))->capture_default_str();
  tag->add_option("--beta", beta)->capture_default_str();
  tag->add_option("--beta-preset", preset, "dialogpt|blenderbot");

  OffenseArgs oa;
  auto* offense = app.add_subcommand("offense", "offensiveness aggregation reports");
  offense->add_option("--sentences", oa.sentences)->required();
  offense->add_option("--scores", oa.scores, "offense.jsonl")->required();
  offense->add_option("--responses", oa.responses, "resolve response ids");
  offense->add_option("--template", oa.templates, "templates for the bucket table");
  offense->add_option("--edges", oa.edges, "comma-separated bucket edges");
  offense->add_option("--threshold", oa.threshold)->capture_default_str();

  std::string corpus;
  std::uint64_t sample = kDefaultCorpusSample;
  auto* freq = app.add_subcommand("corpus-freq", "single-word descriptor corpus frequencies");
  freq->add_option("--corpus", corpus)->required();
  freq->add_option("--sample", sample, "reservoir size; 0 scans everything")->capture_default_str();

  MockArgs ma;
  auto* mock = app.add_subcommand("mock-score", "deterministic stand-in scorers");
  mock->add_option("--sentences", ma.sentences)->required();
  mock->add_option("--profile", ma.profile)->required();
  mock->add_option("--emit", ma.emit, "ppl|styles|offense|responses")->required();
  mock->add_option("--responses", ma.responses);
  mock->add_option("--manifest", ma.manifest);
  mock->add_option("--per-sentence", ma.per_sentence)->capture_default_str();

  std::string mask_sentences, mask_responses;
  auto* mask = app.add_subcommand("mask-responses", "strip unsafe markers and mask descriptors");
  mask->add_option("--sentences", mask_sentences)->required();
  mask->add_option("--responses", mask_responses)->required();

  SchemaArgs sa;
  auto* schema = app.add_subcommand("validate-schema", "check a score or response file");
  schema->add_option("--kind", sa.kind, "sentences|ppl|styles|offense|responses|tagged")->required();
  schema->add_option("--file", sa.file)->required();
  schema->add_option("--sentences", sa.sentences);
  schema->add_option("--responses", sa.responses);
  schema->add_option("--manifest", sa.manifest);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  g.seed_given = seed_opt->count() > 0;

  try {
    if (*validate) return cmd_validate(g, out);
    if (*compile) return cmd_compile(g, variants, out);
    if (*likelihood) return cmd_likelihood(g, la, out, err);
    if (*genbias) return cmd_genbias(g, ga, clusters_path, axis, label, out, err);
    if (*cluster) return cmd_cluster_styles(g, ga, cut, out, err);
    if (*tag) return cmd_tag_bias(g, ga, alpha, beta, preset, out, err);
    if (*offense) return cmd_offense(g, oa, out, err);
    if (*freq) return cmd_corpus_freq(g, corpus, sample, out);
    if (*mock) return cmd_mock_score(g, ma, out);
    if (*mask) return cmd_mask_responses(g, mask_sentences, mask_responses, out);
    if (*schema) return cmd_validate_schema(sa, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace hb
