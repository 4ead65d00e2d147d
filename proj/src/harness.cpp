#include "holisticbias/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include "holisticbias/errors.hpp"
#include "holisticbias/hash.hpp"
#include "holisticbias/mitigation.hpp"

namespace hb {

namespace {

// Hash streams, one per independent quantity.
constexpr std::uint64_t kPplNoiseA = 1, kPplNoiseB = 2;
constexpr std::uint64_t kDescOffsetA = 3, kDescOffsetB = 4;
constexpr std::uint64_t kSkewFactor = 5;
constexpr std::uint64_t kOffense = 6;
constexpr std::uint64_t kReplyPick = 7, kUnsafePick = 8;
constexpr std::uint64_t kStyleBase = 1000;

bool finite_in(double v, double lo, double hi) { return std::isfinite(v) && v >= lo && v <= hi; }

}  // namespace

void MockProfile::validate() const {
  if (!(std::isfinite(ppl_base) && ppl_base > 0)) throw ConfigError("ppl_base must be positive");
  if (!finite_in(ppl_sigma, 0, 10)) throw ConfigError("ppl_sigma must be in [0, 10]");
  if (!(std::isfinite(nonce_ppl_multiplier) && nonce_ppl_multiplier >= 1))
    throw ConfigError("nonce_ppl_multiplier must be >= 1");
  if (!finite_in(descriptor_ppl_spread, 0, 20))
    throw ConfigError("descriptor_ppl_spread must be in [0, 20]");
  if (!finite_in(style_noise, 0, 5)) throw ConfigError("style_noise must be in [0, 5]");
  if (!finite_in(offense_negativity_boost, 0, 1))
    throw ConfigError("offense_negativity_boost must be in [0, 1]");
  for (const auto& [axis, skew] : axis_style_skew) {
    if (!is_known_axis(axis)) throw ConfigError("axis_style_skew: unknown axis '" + axis + "'");
    if (!finite_in(skew.shift, 0, 0.5))
      throw ConfigError("axis_style_skew[" + axis + "]: shift must be in [0, 0.5]");
  }
}

void MockProfile::validate(std::size_t style_count) const {
  validate();
  if (style_count == 0) throw ConfigError("style count must be positive");
  for (const auto& [axis, skew] : axis_style_skew)
    if (skew.style_index >= style_count)
      throw ConfigError("axis_style_skew[" + axis + "]: style_index " +
                        std::to_string(skew.style_index) + " out of range");
}

MockProfile MockProfile::from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("mock profile must be a JSON object");
  if (auto v = j.find("schema_version"); v != j.end() && *v != kSchemaVersion)
    throw ConfigError("unsupported schema_version in mock profile");
  MockProfile p;
  auto num = [&](const char* key, double& out) {
    if (auto it = j.find(key); it != j.end()) {
      if (!it->is_number()) throw ConfigError(std::string("mock profile: '") + key + "' must be a number");
      out = it->get<double>();
    }
  };
  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned()) throw ConfigError("mock profile: 'seed' must be an unsigned integer");
    p.seed = it->get<std::uint64_t>();
  }
  num("ppl_base", p.ppl_base);
  num("ppl_sigma", p.ppl_sigma);
  num("nonce_ppl_multiplier", p.nonce_ppl_multiplier);
  num("descriptor_ppl_spread", p.descriptor_ppl_spread);
  num("style_noise", p.style_noise);
  num("offense_negativity_boost", p.offense_negativity_boost);
  if (auto it = j.find("axis_style_skew"); it != j.end()) {
    if (!it->is_object()) throw ConfigError("mock profile: 'axis_style_skew' must be an object");
    for (const auto& [axis, v] : it->items()) {
      if (!v.is_object() || !v.contains("style_index") || !v.contains("shift") ||
          !v["style_index"].is_number_unsigned() || !v["shift"].is_number())
        throw ConfigError("axis_style_skew[" + axis + "] needs {style_index, shift}");
      p.axis_style_skew[axis] = {v["style_index"].get<std::size_t>(), v["shift"].get<double>()};
    }
  }
  p.validate();
  return p;
}

MockProfile MockProfile::load(const std::filesystem::path& path) {
  return from_json(read_json_file(path));
}

Json MockProfile::to_json() const {
  Json skew = Json::object();
  for (const auto& [axis, s] : axis_style_skew)
    skew[axis] = Json{{"style_index", s.style_index}, {"shift", s.shift}};
  return Json{{"schema_version", kSchemaVersion},
              {"seed", seed},
              {"ppl_base", ppl_base},
              {"ppl_sigma", ppl_sigma},
              {"nonce_ppl_multiplier", nonce_ppl_multiplier},
              {"descriptor_ppl_spread", descriptor_ppl_spread},
              {"style_noise", style_noise},
              {"axis_style_skew", skew},
              {"offense_negativity_boost", offense_negativity_boost}};
}

double mock_perplexity(const SentenceRecord& record, const MockProfile& profile) {
  const auto& s = profile.seed;
  double log_ppl = std::log(profile.ppl_base) +
                   profile.ppl_sigma * standard_normal(stable_hash(record.id, s, kPplNoiseA),
                                                       stable_hash(record.id, s, kPplNoiseB));
  if (profile.descriptor_ppl_spread > 0) {
    const auto key = record.axis + "|" + record.descriptor_text;
    log_ppl += profile.descriptor_ppl_spread * standard_normal(stable_hash(key, s, kDescOffsetA),
                                                               stable_hash(key, s, kDescOffsetB));
  }
  if (record.axis == "nonce") log_ppl += std::log(profile.nonce_ppl_multiplier);
  return std::exp(log_ppl);
}

StyleVector mock_style_vector(const SentenceRecord& record, const MockProfile& profile,
                              std::size_t style_count, std::string_view key) {
  if (style_count == 0) throw ConfigError("style count must be positive");
  const std::string_view k = key.empty() ? std::string_view(record.id) : key;
  StyleVector p(style_count);
  for (std::size_t i = 0; i < style_count; ++i) {
    const auto z = standard_normal(stable_hash(k, profile.seed, kStyleBase + 2 * i),
                                   stable_hash(k, profile.seed, kStyleBase + 2 * i + 1));
    p[i] = std::exp(profile.style_noise * z);
  }
  double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& v : p) v /= total;

  if (auto it = profile.axis_style_skew.find(record.axis); it != profile.axis_style_skew.end()) {
    const auto& skew = it->second;
    if (skew.style_index >= style_count)
      throw ConfigError("skew style_index " + std::to_string(skew.style_index) + " out of range");
    const double factor =
        0.5 + unit_interval(stable_hash(record.axis + "|" + record.descriptor_text, profile.seed,
                                        kSkewFactor));
    const double old = p[skew.style_index];
    const double boosted = old + skew.shift * factor;
    if (boosted > 1.0 || old >= 1.0)
      throw ConfigError("skew on axis '" + record.axis + "' cannot be renormalized");
    const double scale = (1.0 - boosted) / (1.0 - old);
    for (std::size_t i = 0; i < style_count; ++i) p[i] = i == skew.style_index ? boosted : p[i] * scale;
    total = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& v : p) v /= total;
  }
  return p;
}

double mock_offense(const SentenceRecord& record, const MockProfile& profile, Stance stance,
                    std::string_view key) {
  const std::string_view k = key.empty() ? std::string_view(record.id) : key;
  const double u = unit_interval(stable_hash(k, profile.seed, kOffense));
  const double base = u * u * u;
  if (stance != Stance::negative) return base;
  return base + profile.offense_negativity_boost * (1.0 - base);
}

std::string mock_response_id(std::string_view sentence_id, std::size_t k) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%04zu", k);
  return std::string(sentence_id) + "#" + buf;
}

ResponseRecord mock_response(const SentenceRecord& record, const MockProfile& profile,
                             std::size_t k) {
  static constexpr std::array<std::string_view, 6> kReplies = {
      "I have a lot of respect for {} people. What do you do for fun?",
      "Oh cool, I know a few {} folks myself. How long have you been {}?",
      "That's interesting! Being {} must give you a unique perspective.",
      "I'm sorry to hear that. Do you have people around you who support you?",
      "Really? I've never met anyone who is {} before. Tell me more!",
      "Nice to meet you! I'm a teacher, what do you do for a living?",
  };
  const auto id = mock_response_id(record.id, k);
  const auto pick = stable_hash(id, profile.seed, kReplyPick) % kReplies.size();
  std::string text;
  for (const auto ch : kReplies[pick]) {
    if (ch == '}') continue;
    if (ch == '{') text += record.descriptor_text;
    else text += ch;
  }
  if (stable_hash(id, profile.seed, kUnsafePick) % 8 == 0)
    text = std::string(kUnsafeToken) + " " + text;
  return {id, record.id, std::move(text), record.text};
}

std::string_view to_string(SchemaKind k) {
  switch (k) {
    case SchemaKind::sentences: return "sentences";
    case SchemaKind::ppl: return "ppl";
    case SchemaKind::styles: return "styles";
    case SchemaKind::offense: return "offense";
    case SchemaKind::responses: return "responses";
    case SchemaKind::tagged: return "tagged";
  }
  return "?";
}

std::optional<SchemaKind> parse_schema_kind(std::string_view s) {
  for (auto k : {SchemaKind::sentences, SchemaKind::ppl, SchemaKind::styles, SchemaKind::offense,
                 SchemaKind::responses, SchemaKind::tagged})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

namespace {

class Checker {
 public:
  Checker(SchemaKind kind, const SchemaContext& ctx, std::string source)
      : kind_(kind), ctx_(ctx), source_(std::move(source)) {
    if (ctx_.responses != nullptr)
      for (const auto& r : *ctx_.responses) response_ids_.insert(r.response_id);
  }

  void line(const std::string& text, std::size_t n, SchemaReport& report) {
    line_ = n;
    report_ = &report;
    ++report.records;
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return fail("not a JSON object");
    if (auto v = j.find("schema_version"); v != j.end() && *v != kSchemaVersion)
      fail("unsupported schema_version");
    switch (kind_) {
      case SchemaKind::sentences: return sentence(j);
      case SchemaKind::ppl: return ppl(j);
      case SchemaKind::styles: return styles(j);
      case SchemaKind::offense: return offense(j);
      case SchemaKind::responses: return response(j);
      case SchemaKind::tagged: return tagged(j);
    }
  }

 private:
  void fail(const std::string& msg) {
    report_->violations.push_back(source_ + ":" + std::to_string(line_) + ": " + msg);
  }

  const std::string* str(const Json& j, const char* key, bool required = true) {
    auto it = j.find(key);
    if (it == j.end()) {
      if (required) fail(std::string("missing field '") + key + "'");
      return nullptr;
    }
    if (!it->is_string()) {
      fail(std::string("field '") + key + "' must be a string");
      return nullptr;
    }
    return it->get_ptr<const std::string*>();
  }

  std::optional<double> num(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) {
      fail(std::string("missing field '") + key + "'");
      return std::nullopt;
    }
    if (!it->is_number()) {
      fail(std::string("field '") + key + "' must be a number");
      return std::nullopt;
    }
    return it->get<double>();
  }

  void unique(const std::string& id) {
    if (!ids_.insert(id).second) fail("duplicate id '" + id + "'");
  }

  void sentence_ref(const std::string& id) {
    if (ctx_.sentences != nullptr && ctx_.sentences->find(id) == nullptr)
      fail("unknown sentence_id '" + id + "'");
  }

  void sentence(const Json& j) {
    try {
      const auto s = sentence_from_json(j, source_, line_);
      unique(s.id);
      const auto expected = make_sentence_id(s.axis, s.descriptor_text, s.noun_singular,
                                             s.template_id, s.variants);
      if (s.id != expected) fail("id does not match its fields (expected '" + expected + "')");
      if (!is_known_axis(s.axis)) fail("unknown axis '" + s.axis + "'");
    } catch (const SchemaError& e) {
      report_->violations.push_back(e.what());
    } catch (const Error& e) {
      fail(e.what());
    }
  }

  void ppl(const Json& j) {
    if (const auto* id = str(j, "sentence_id")) {
      unique(*id);
      sentence_ref(*id);
    }
    if (auto v = num(j, "perplexity"); v && !(std::isfinite(*v) && *v > 0))
      fail("perplexity must be positive and finite");
  }

  void styles(const Json& j) {
    if (const auto* id = str(j, "response_id")) {
      unique(*id);
      if (ctx_.responses != nullptr && !response_ids_.contains(*id))
        fail("unknown response_id '" + *id + "'");
    }
    auto it = j.find("probs");
    if (it == j.end() || !it->is_array()) return fail("missing list field 'probs'");
    const std::size_t expected = ctx_.style_count.value_or(first_width_.value_or(it->size()));
    if (!first_width_) first_width_ = it->size();
    if (it->size() != expected)
      fail("probs has " + std::to_string(it->size()) + " entries, expected " +
           std::to_string(expected));
    double total = 0;
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& p = (*it)[i];
      if (!p.is_number()) return fail("probs[" + std::to_string(i) + "] is not a number");
      const double v = p.get<double>();
      if (!finite_in(v, 0, 1)) return fail("probs[" + std::to_string(i) + "] outside [0, 1]");
      total += v;
    }
    if (std::abs(total - 1.0) > kStyleSumTolerance) fail("probs sum to " + format_real(total, 8));
  }

  void offense(const Json& j) {
    if (const auto* id = str(j, "id")) {
      unique(*id);
      const bool checkable = ctx_.sentences != nullptr || ctx_.responses != nullptr;
      const bool known = (ctx_.sentences != nullptr && ctx_.sentences->find(*id) != nullptr) ||
                         response_ids_.contains(*id);
      if (checkable && !known) fail("unknown id '" + *id + "'");
    }
    if (auto v = num(j, "prob_offensive"); v && !finite_in(*v, 0, 1))
      fail("prob_offensive outside [0, 1]");
  }

  void response(const Json& j) {
    if (const auto* id = str(j, "response_id")) unique(*id);
    if (const auto* sid = str(j, "sentence_id")) sentence_ref(*sid);
    str(j, "text");
    str(j, "context", false);
  }

  void tagged(const Json& j) {
    const auto* ctx = str(j, "context");
    const auto* label = str(j, "label");
    str(j, "response");
    str(j, "descriptor");
    str(j, "template_id");
    if (const auto* id = str(j, "response_id", false)) {
      unique(*id);
      if (ctx_.responses != nullptr && !response_ids_.contains(*id))
        fail("unknown response_id '" + *id + "'");
    }
    if (auto v = num(j, "bias_value"); v && !std::isfinite(*v)) fail("bias_value not finite");
    if (label != nullptr && *label != kBiasTag && *label != kNoBiasTag)
      fail("label must be 'bias' or 'no_bias'");
    if (ctx != nullptr && label != nullptr) {
      const auto suffix = " " + *label;
      if (ctx->size() < suffix.size() || ctx->compare(ctx->size() - suffix.size(), suffix.size(), suffix) != 0)
        fail("context does not end with its label");
    }
  }

  SchemaKind kind_;
  const SchemaContext& ctx_;
  std::string source_;
  std::unordered_set<std::string> response_ids_;
  std::unordered_set<std::string> ids_;
  std::optional<std::size_t> first_width_;
  std::size_t line_ = 0;
  SchemaReport* report_ = nullptr;
};

}  // namespace

SchemaReport validate_schema(std::istream& in, SchemaKind kind, const SchemaContext& context,
                             const std::string& source) {
  SchemaReport report;
  Checker checker(kind, context, source);
  std::string text;
  std::size_t n = 0;
  while (std::getline(in, text)) {
    ++n;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    checker.line(text, n, report);
  }
  return report;
}

SchemaReport validate_schema(const std::filesystem::path& path, SchemaKind kind,
                             const SchemaContext& context) {
  auto in = open_input(path);
  return validate_schema(in, kind, context, path.string());
}

}  // namespace hb
