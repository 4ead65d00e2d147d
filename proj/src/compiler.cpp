#include "holisticbias/compiler.hpp"

#include <algorithm>
#include <bit>
#include <cctype>

#include "holisticbias/errors.hpp"
#include "holisticbias/hash.hpp"

namespace hb {

namespace {

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool starts_with_vowel_letter(std::string_view word) {
  const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(word.front())));
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

constexpr std::string_view kContraction = "I'm";
constexpr std::string_view kExpanded = "I am";

// Index of the first "I'm" outside [begin, end), or npos.
std::size_t find_contraction(const std::string& text, std::size_t begin, std::size_t end,
                             std::size_t from = 0) {
  for (auto pos = text.find(kContraction, from); pos != std::string::npos;
       pos = text.find(kContraction, pos + 1)) {
    const bool overlaps = pos < end && pos + kContraction.size() > begin;
    if (!overlaps) return pos;
  }
  return std::string::npos;
}

struct BaseKey {
  std::string prefix;  // id without the flag digit
  std::uint32_t descriptor;
  std::uint32_t noun;
  std::uint32_t tmpl;
};

}  // namespace

std::string_view to_string(Article a) {
  switch (a) {
    case Article::a: return "a";
    case Article::an: return "an";
    case Article::none: return "";
  }
  return "";
}

ArticleRules::ArticleRules(std::vector<std::string> force_a, std::vector<std::string> force_an) {
  for (auto& w : force_a) force_a_.insert(ascii_lower(w));
  for (auto& w : force_an) force_an_.insert(ascii_lower(w));
}

ArticleRules ArticleRules::load(const std::filesystem::path& path) {
  const auto j = read_json_file(path);
  check_schema_version(j, path.string(), 0);
  auto list = [&](const char* key) {
    std::vector<std::string> out;
    if (!j.contains(key)) return out;
    if (!j[key].is_array()) throw SchemaError(path.string(), 0, std::string(key) + " must be a list");
    for (const auto& w : j[key]) out.push_back(w.get<std::string>());
    return out;
  };
  return ArticleRules(list("a"), list("an"));
}

ArticleRules ArticleRules::load_from_dir(const std::filesystem::path& data_dir) {
  const auto path = data_dir / "article_exceptions.json";
  if (!std::filesystem::exists(path)) return {};
  return load(path);
}

Article ArticleRules::select(std::string_view phrase_head) const {
  if (phrase_head.empty()) throw ArgumentError("select_article: empty phrase head");
  const auto word = ascii_lower(phrase_head.substr(0, phrase_head.find(' ')));
  if (force_a_.contains(word)) return Article::a;
  if (force_an_.contains(word)) return Article::an;
  return starts_with_vowel_letter(word) ? Article::an : Article::a;
}

Article select_article(std::string_view phrase_head, const ArticleRules& rules) {
  return rules.select(phrase_head);
}

std::string pluralize_descriptor(const Descriptor& d) {
  if (!d.plural_override.empty()) return d.plural_override;
  if (d.placement == Placement::before_noun) return d.text;
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 5> kRewrites{{
      {"who is ", "who are "},
      {"who's ", "who are "},
      {"who uses ", "who use "},
      {"who walks ", "who walk "},
      {"who stutters", "who stutter"},
  }};
  for (const auto& [from, to] : kRewrites) {
    if (d.text.starts_with(from)) return std::string(to) + d.text.substr(from.size());
  }
  // "who incurred ...", "with ...", "without ...", "in ...", "on ..." read the
  // same in the plural.
  return d.text;
}

NounPhrase build_noun_phrase(const Descriptor& d, const NounEntry& n, Plurality plurality,
                             const ArticleRules& rules) {
  if (!is_compatible(d, n))
    throw CompatibilityError("descriptor '" + d.text + "' cannot be used with noun '" +
                             n.singular + "'");
  const bool plural = plurality == Plurality::plural;
  const std::string& noun = plural ? n.plural : n.singular;
  const std::string descriptor = plural ? pluralize_descriptor(d) : d.text;

  NounPhrase np;
  np.plurality = plurality;
  if (d.placement == Placement::before_noun) {
    np.text = descriptor + " " + noun;
    np.descriptor_begin = 0;
  } else {
    np.text = noun + " " + descriptor;
    np.descriptor_begin = noun.size() + 1;
  }
  np.descriptor_end = np.descriptor_begin + descriptor.size();

  if (plural) {
    np.article = Article::none;
  } else {
    np.article = rules.select(np.text);
    const std::string prefix = std::string(to_string(np.article)) + " ";
    np.text.insert(0, prefix);
    np.descriptor_begin += prefix.size();
    np.descriptor_end += prefix.size();
  }
  return np;
}

namespace {

struct Rendered {
  std::string text;
  std::size_t descriptor_begin;
  std::size_t descriptor_end;
};

Rendered render_with_span(const Template& t, const NounPhrase& np) {
  if (t.slot_plurality != np.plurality)
    throw RenderError("template '" + t.id + "' expects a " + std::string(to_string(t.slot_plurality)) +
                      " noun phrase");
  const auto slot = t.slot_plurality == Plurality::plural ? kPluralSlot : kSingularSlot;
  const auto pos = t.pattern.find(slot);
  if (pos == std::string::npos || t.pattern.find(slot, pos + 1) != std::string::npos)
    throw RenderError("template '" + t.id + "' must contain exactly one slot");
  Rendered r;
  r.text = t.pattern.substr(0, pos) + np.text + t.pattern.substr(pos + slot.size());
  r.descriptor_begin = pos + np.descriptor_begin;
  r.descriptor_end = pos + np.descriptor_end;
  return r;
}

}  // namespace

std::string render_sentence(const Template& t, const NounPhrase& np) {
  return render_with_span(t, np).text;
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::lowercase_descriptor: return "lowercase_descriptor";
    case Variant::dehyphenate: return "dehyphenate";
    case Variant::decontract: return "decontract";
    case Variant::drop_final_period: return "drop_final_period";
  }
  return "?";
}

std::vector<std::string> VariantSet::names() const {
  std::vector<std::string> out;
  for (auto v : kVariantOrder)
    if (has(v)) out.emplace_back(to_string(v));
  return out;
}

VariantSet VariantSet::from_names(const std::vector<std::string>& names) {
  VariantSet s;
  for (const auto& name : names) {
    bool matched = false;
    for (auto v : kVariantOrder) {
      if (to_string(v) == name) {
        s = s.with(VariantSet{v});
        matched = true;
      }
    }
    if (!matched) throw ArgumentError("unknown variant flag '" + name + "'");
  }
  return s;
}

std::string make_sentence_id(std::string_view axis, std::string_view descriptor,
                             std::string_view noun, std::string_view template_id,
                             VariantSet variants) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id;
  id.reserve(axis.size() + descriptor.size() + noun.size() + template_id.size() + 6);
  id.append(axis).append("|").append(descriptor).append("|").append(noun).append("|");
  id.append(template_id).append("|");
  id.push_back(kHex[variants.bits()]);
  return id;
}

SentenceRecord apply_variations(const SentenceRecord& s, VariantSet flags) {
  SentenceRecord out = s;
  for (auto v : kVariantOrder) {
    if (!flags.has(v) || s.variants.has(v)) continue;
    switch (v) {
      case Variant::lowercase_descriptor:
        for (auto i = out.descriptor_begin; i < out.descriptor_end; ++i)
          out.text[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(out.text[i])));
        break;
      case Variant::dehyphenate:
        for (auto i = out.descriptor_begin; i < out.descriptor_end; ++i)
          if (out.text[i] == '-') out.text[i] = ' ';
        break;
      case Variant::decontract: {
        auto pos = find_contraction(out.text, out.descriptor_begin, out.descriptor_end);
        while (pos != std::string::npos) {
          out.text.replace(pos, kContraction.size(), kExpanded);
          if (pos < out.descriptor_begin) {
            const auto grow = kExpanded.size() - kContraction.size();
            out.descriptor_begin += grow;
            out.descriptor_end += grow;
          }
          pos = find_contraction(out.text, out.descriptor_begin, out.descriptor_end,
                                 pos + kExpanded.size());
        }
        break;
      }
      case Variant::drop_final_period:
        if (!out.text.empty() && out.text.back() == '.') {
          out.text.pop_back();
          out.descriptor_end = std::min(out.descriptor_end, out.text.size());
        }
        break;
    }
  }
  out.variants = s.variants.with(flags);
  out.id = make_sentence_id(out.axis, out.descriptor_text, out.noun_singular, out.template_id,
                            out.variants);
  return out;
}

VariantSet applicable_variants(const SentenceRecord& base) {
  VariantSet a;
  const std::string_view span(base.text.data() + base.descriptor_begin,
                              base.descriptor_end - base.descriptor_begin);
  if (std::any_of(span.begin(), span.end(),
                  [](char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }))
    a = a.with({Variant::lowercase_descriptor});
  if (span.find('-') != std::string_view::npos) a = a.with({Variant::dehyphenate});
  if (find_contraction(base.text, base.descriptor_begin, base.descriptor_end) != std::string::npos)
    a = a.with({Variant::decontract});
  if (!base.text.empty() && base.text.back() == '.') a = a.with({Variant::drop_final_period});
  return a;
}

SentenceRecord make_base_record(const Descriptor& d, const NounEntry& n, const Template& t,
                                const ArticleRules& rules) {
  const auto np = build_noun_phrase(d, n, t.slot_plurality, rules);
  auto rendered = render_with_span(t, np);
  SentenceRecord s;
  s.text = std::move(rendered.text);
  s.descriptor_begin = rendered.descriptor_begin;
  s.descriptor_end = rendered.descriptor_end;
  s.descriptor_text = d.text;
  s.axis = d.axis;
  s.bucket = d.bucket;
  s.noun_singular = n.singular;
  s.gender_class = n.gender_class;
  s.template_id = t.id;
  s.id = make_sentence_id(d.axis, d.text, n.singular, t.id, {});
  return s;
}

std::string reconstruct_text(const Registry& reg, const ArticleRules& rules,
                             const SentenceRecord& s) {
  const auto& d = reg.descriptor(s.descriptor_text);
  const auto* t = reg.find_template(s.template_id);
  if (t == nullptr) throw LookupError("template '" + s.template_id + "' is not in the registry");
  const auto& nouns = reg.nouns();
  const auto it = std::find_if(nouns.begin(), nouns.end(),
                               [&](const NounEntry& n) { return n.singular == s.noun_singular; });
  if (it == nouns.end()) throw LookupError("noun '" + s.noun_singular + "' is not in the registry");
  return apply_variations(make_base_record(d, *it, *t, rules), s.variants).text;
}

std::size_t compile_dataset(const Registry& reg, const ArticleRules& rules, VariationPolicy policy,
                            const std::function<void(const SentenceRecord&)>& sink) {
  const auto report = validate_registry(reg, ValidationScope::structural);
  if (!report.ok())
    throw ValidationError("refusing to compile an invalid registry: " + report.violations.front());

  const auto& descriptors = reg.descriptors();
  const auto& nouns = reg.nouns();
  const auto& templates = reg.templates();

  std::vector<BaseKey> keys;
  for (std::uint32_t di = 0; di < descriptors.size(); ++di) {
    const auto& d = descriptors[di];
    for (std::uint32_t ni = 0; ni < nouns.size(); ++ni) {
      if (!is_compatible(d, nouns[ni])) continue;
      for (std::uint32_t ti = 0; ti < templates.size(); ++ti) {
        auto id = make_sentence_id(d.axis, d.text, nouns[ni].singular, templates[ti].id, {});
        id.pop_back();
        keys.push_back({std::move(id), di, ni, ti});
      }
    }
  }
  // All ids of one base share "<prefix>" and differ only in the trailing
  // digit, so sorting prefixes and emitting flags ascending yields id order.
  std::sort(keys.begin(), keys.end(),
            [](const BaseKey& a, const BaseKey& b) { return a.prefix < b.prefix; });

  std::size_t emitted = 0;
  for (const auto& key : keys) {
    const auto base =
        make_base_record(descriptors[key.descriptor], nouns[key.noun], templates[key.tmpl], rules);
    sink(base);
    ++emitted;
    if (policy.kind == VariationPolicy::Kind::none) continue;

    const auto applicable = applicable_variants(base).bits();
    if (applicable == 0) continue;
    if (policy.kind == VariationPolicy::Kind::all) {
      for (unsigned bits = 1; bits < 16; ++bits) {
        if ((bits & ~applicable) != 0) continue;
        sink(apply_variations(base, VariantSet(static_cast<std::uint8_t>(bits))));
        ++emitted;
      }
    } else {
      const unsigned k = std::popcount(static_cast<unsigned>(applicable));
      const std::uint64_t subsets = (1ULL << k) - 1;
      const auto pick = stable_hash(base.id, policy.seed) % subsets + 1;
      // Deposit the chosen k-bit pattern onto the applicable flag positions.
      unsigned bits = 0;
      unsigned source_bit = 0;
      for (unsigned flag = 0; flag < 4; ++flag) {
        if ((applicable & (1u << flag)) == 0) continue;
        if ((pick >> source_bit) & 1u) bits |= 1u << flag;
        ++source_bit;
      }
      sink(apply_variations(base, VariantSet(static_cast<std::uint8_t>(bits))));
      ++emitted;
    }
  }
  return emitted;
}

std::vector<SentenceRecord> compile_to_vector(const Registry& reg, const ArticleRules& rules,
                                              VariationPolicy policy) {
  std::vector<SentenceRecord> out;
  compile_dataset(reg, rules, policy, [&](const SentenceRecord& s) { out.push_back(s); });
  return out;
}

Json to_json(const SentenceRecord& s) {
  return Json{{"schema_version", kSchemaVersion},
              {"id", s.id},
              {"text", s.text},
              {"descriptor_text", s.descriptor_text},
              {"axis", s.axis},
              {"bucket", s.bucket},
              {"noun_singular", s.noun_singular},
              {"gender_class", std::string(to_string(s.gender_class))},
              {"template_id", s.template_id},
              {"variants", s.variants.names()}};
}

SentenceRecord sentence_from_json(const Json& j, const std::string& source, std::size_t line) {
  check_schema_version(j, source, line);
  SentenceRecord s;
  s.id = require_string(j, "id", source, line);
  s.text = require_string(j, "text", source, line);
  s.descriptor_text = require_string(j, "descriptor_text", source, line);
  s.axis = require_string(j, "axis", source, line);
  s.bucket = optional_string(j, "bucket", source, line);
  s.noun_singular = require_string(j, "noun_singular", source, line);
  const auto gc = require_string(j, "gender_class", source, line);
  auto parsed = parse_gender_class(gc);
  if (!parsed) throw SchemaError(source, line, "invalid gender_class '" + gc + "'");
  s.gender_class = *parsed;
  s.template_id = require_string(j, "template_id", source, line);
  if (auto it = j.find("variants"); it != j.end()) {
    if (!it->is_array()) throw SchemaError(source, line, "variants must be a list");
    try {
      s.variants = VariantSet::from_names(it->get<std::vector<std::string>>());
    } catch (const std::exception& e) {
      throw SchemaError(source, line, e.what());
    }
  }
  return s;
}

SentenceIndex::SentenceIndex(std::vector<SentenceRecord> records) : records_(std::move(records)) {
  by_id_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (!by_id_.emplace(records_[i].id, i).second) throw UniquenessError(records_[i].id);
  }
}

SentenceIndex SentenceIndex::load(const std::filesystem::path& path) {
  std::vector<SentenceRecord> records;
  const auto src = path.string();
  for_each_jsonl(path, [&](const Json& j, std::size_t line) {
    records.push_back(sentence_from_json(j, src, line));
  });
  return SentenceIndex(std::move(records));
}

const SentenceRecord* SentenceIndex::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &records_[it->second];
}

}  // namespace hb
