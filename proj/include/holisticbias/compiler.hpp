#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <initializer_list>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "holisticbias/jsonl.hpp"
#include "holisticbias/registry.hpp"

namespace hb {

enum class Article { a, an, none };
std::string_view to_string(Article a);

/// Curated a/an exceptions for words whose first letter misleads about the
/// first sound ("one-percenter", "FTM"). Matching is case-insensitive on the
/// whole head word.
class ArticleRules {
 public:
  ArticleRules() = default;
  ArticleRules(std::vector<std::string> force_a, std::vector<std::string> force_an);

  static ArticleRules load(const std::filesystem::path& path);
  /// Loads `article_exceptions.json` from a data directory, or returns empty
  /// rules when the file is absent.
  static ArticleRules load_from_dir(const std::filesystem::path& data_dir);

  Article select(std::string_view phrase_head) const;

 private:
  std::set<std::string, std::less<>> force_a_;
  std::set<std::string, std::less<>> force_an_;
};

/// Throws ArgumentError on an empty head.
Article select_article(std::string_view phrase_head, const ArticleRules& rules);

struct NounPhrase {
  std::string text;
  Plurality plurality = Plurality::singular;
  Article article = Article::none;
  // [begin, end) byte range of the rendered descriptor inside `text`.
  std::size_t descriptor_begin = 0;
  std::size_t descriptor_end = 0;
};

/// Plural rendering of an after-noun descriptor phrase ("who is deaf" ->
/// "who are deaf"); honours plural_override.
std::string pluralize_descriptor(const Descriptor& d);

NounPhrase build_noun_phrase(const Descriptor& d, const NounEntry& n, Plurality plurality,
                             const ArticleRules& rules);

/// Substitutes the template's single slot. Throws RenderError when the
/// phrase plurality does not match the slot.
std::string render_sentence(const Template& t, const NounPhrase& np);

enum class Variant : std::uint8_t {
  lowercase_descriptor = 1,
  dehyphenate = 2,
  decontract = 4,
  drop_final_period = 8,
};

inline constexpr std::array<Variant, 4> kVariantOrder = {
    Variant::lowercase_descriptor, Variant::dehyphenate, Variant::decontract,
    Variant::drop_final_period};

std::string_view to_string(Variant v);

class VariantSet {
 public:
  constexpr VariantSet() = default;
  constexpr explicit VariantSet(std::uint8_t bits) : bits_(bits & 0x0F) {}
  constexpr VariantSet(std::initializer_list<Variant> flags) {
    for (auto f : flags) bits_ |= static_cast<std::uint8_t>(f);
  }

  constexpr bool has(Variant v) const { return (bits_ & static_cast<std::uint8_t>(v)) != 0; }
  constexpr VariantSet with(VariantSet other) const { return VariantSet(bits_ | other.bits_); }
  constexpr std::uint8_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  std::vector<std::string> names() const;
  static VariantSet from_names(const std::vector<std::string>& names);

  constexpr bool operator==(const VariantSet&) const = default;

 private:
  std::uint8_t bits_ = 0;
};

struct SentenceRecord {
  std::string id;
  std::string text;
  std::string descriptor_text;
  std::string axis;
  std::string bucket;
  std::string noun_singular;
  GenderClass gender_class = GenderClass::unspecified;
  std::string template_id;
  VariantSet variants;
  // Position of the descriptor inside `text`; not serialized.
  std::size_t descriptor_begin = 0;
  std::size_t descriptor_end = 0;
};

/// "<axis>|<descriptor>|<noun>|<template_id>|<flagbits>" with flagbits a
/// single lowercase hex digit.
std::string make_sentence_id(std::string_view axis, std::string_view descriptor,
                             std::string_view noun, std::string_view template_id,
                             VariantSet variants);

/// Applies the flags in the fixed order lowercase, dehyphenate, decontract,
/// drop final period. Flags already present are recorded but not re-applied.
SentenceRecord apply_variations(const SentenceRecord& s, VariantSet flags);

/// Flags that would change the text of the given base record.
VariantSet applicable_variants(const SentenceRecord& base);

struct VariationPolicy {
  enum class Kind { none, all, sampled };
  Kind kind = Kind::none;
  std::uint64_t seed = 0;

  static VariationPolicy none() { return {Kind::none, 0}; }
  static VariationPolicy all() { return {Kind::all, 0}; }
  static VariationPolicy sampled(std::uint64_t seed) { return {Kind::sampled, seed}; }
};

SentenceRecord make_base_record(const Descriptor& d, const NounEntry& n, const Template& t,
                                const ArticleRules& rules);

/// Re-derives a record's text from its fields against the registry.
std::string reconstruct_text(const Registry& reg, const ArticleRules& rules,
                             const SentenceRecord& s);

/// Streams every compiled sentence in ascending id order. Refuses to run on a
/// registry with structural violations. Returns the number of records.
std::size_t compile_dataset(const Registry& reg, const ArticleRules& rules, VariationPolicy policy,
                            const std::function<void(const SentenceRecord&)>& sink);

std::vector<SentenceRecord> compile_to_vector(const Registry& reg, const ArticleRules& rules,
                                              VariationPolicy policy);

Json to_json(const SentenceRecord& s);
SentenceRecord sentence_from_json(const Json& j, const std::string& source, std::size_t line);

/// Id-keyed view over a sentences.jsonl file.
class SentenceIndex {
 public:
  SentenceIndex() = default;
  explicit SentenceIndex(std::vector<SentenceRecord> records);

  static SentenceIndex load(const std::filesystem::path& path);

  const SentenceRecord* find(std::string_view id) const;
  const std::vector<SentenceRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

 private:
  std::vector<SentenceRecord> records_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

}  // namespace hb
