#include "holisticbias/mitigation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>

namespace hb {

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

char fold(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool matches_at(std::string_view text, std::size_t pos, std::string_view needle) {
  if (pos + needle.size() > text.size()) return false;
  for (std::size_t i = 0; i < needle.size(); ++i)
    if (fold(text[pos + i]) != fold(needle[i])) return false;
  const bool left_ok = pos == 0 || !is_word_char(static_cast<unsigned char>(text[pos - 1]));
  const auto end = pos + needle.size();
  const bool right_ok = end == text.size() || !is_word_char(static_cast<unsigned char>(text[end]));
  return left_ok && right_ok;
}

std::string replace_word(std::string_view text, std::string_view needle,
                         std::string_view replacement) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (matches_at(text, i, needle)) {
      out.append(replacement);
      i += needle.size();
    } else {
      out.push_back(text[i]);
      ++i;
    }
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::vector<std::size_t> find_word_occurrences(std::string_view text, std::string_view needle) {
  std::vector<std::size_t> out;
  if (needle.empty()) return out;
  for (std::size_t i = 0; i + needle.size() <= text.size(); ++i)
    if (matches_at(text, i, needle)) out.push_back(i);
  return out;
}

std::string mask_descriptor(std::string_view response, std::string_view descriptor) {
  if (descriptor.empty()) throw ArgumentError("mask_descriptor: empty descriptor");
  std::string out = replace_word(response, descriptor, kMaskToken);
  std::string dehyphenated(descriptor);
  std::replace(dehyphenated.begin(), dehyphenated.end(), '-', ' ');
  if (dehyphenated != descriptor) out = replace_word(out, dehyphenated, kMaskToken);
  return out;
}

std::string strip_unsafe_token(std::string_view text) {
  std::string removed;
  removed.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    if (text.substr(i, kUnsafeToken.size()) == kUnsafeToken) {
      i += kUnsafeToken.size();
    } else {
      removed.push_back(text[i]);
      ++i;
    }
  }
  if (removed.size() == text.size()) return std::string(text);
  std::string out;
  out.reserve(removed.size());
  bool pending_space = false;
  for (char c : removed) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string prepare_for_style_classification(std::string_view response,
                                             std::string_view descriptor) {
  return mask_descriptor(strip_unsafe_token(response), descriptor);
}

void BiasProjectionConfig::validate() const {
  if (alpha < 0 || alpha > 2) throw ConfigError("alpha must be 0, 1 or 2");
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
}

double bias_value(std::span<const double> p, std::span<const double> m_d,
                  std::span<const double> m_bar, int alpha) {
  if (p.size() != m_d.size() || p.size() != m_bar.size())
    throw ShapeError("bias_value: vectors differ in dimension");
  if (alpha < 0 || alpha > 2) throw ConfigError("alpha must be 0, 1 or 2");
  std::vector<double> offset(p.size());
  std::vector<double> direction(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    offset[i] = p[i] - m_bar[i];
    direction[i] = m_d[i] - m_bar[i];
  }
  const double norm = std::sqrt(dot(direction, direction));
  if (norm == 0.0) {
    if (alpha == 0) return 0.0;
    throw DegenerateError("bias direction has zero length");
  }
  return dot(offset, direction) / std::pow(norm, alpha);
}

std::string_view to_string(BiasLabel label) {
  return label == BiasLabel::bias ? kBiasTag : kNoBiasTag;
}

std::string append_tag(std::string_view context, BiasLabel label) {
  std::string out(context);
  while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
  if (!out.empty()) out.push_back(' ');
  out.append(to_string(label));
  return out;
}

Json to_json(const TaggedPair& p) {
  return Json{{"schema_version", kSchemaVersion},
              {"response_id", p.response_id},
              {"context", p.context},
              {"response", p.response},
              {"label", std::string(to_string(p.label))},
              {"bias_value", p.bias_value},
              {"descriptor", p.descriptor},
              {"template_id", p.template_id}};
}

std::vector<TaggedPair> tag_pairs(const StyleGrid& grid,
                                  const std::vector<ResponseRecord>& responses,
                                  const BiasProjectionConfig& config, Warnings* warnings) {
  config.validate();
  const auto profiles = mean_style_profiles(grid);
  std::unordered_map<std::string, const ResponseRecord*> by_id;
  for (const auto& r : responses) by_id.emplace(r.response_id, &r);

  std::vector<TaggedPair> out;
  std::vector<std::string> missing;
  for (const auto& [t, by_descriptor] : grid.cells()) {
    for (const auto& [d, entries] : by_descriptor) {
      const auto& m_d = profiles.descriptor_means.at(d);
      double probe = 0.0;
      if (config.alpha > 0) {
        for (std::size_t s = 0; s < m_d.size(); ++s)
          probe += (m_d[s] - profiles.global_mean[s]) * (m_d[s] - profiles.global_mean[s]);
        if (probe == 0.0) {
          warn(warnings, "descriptor '" + d + "' has no bias direction; skipped under alpha > 0");
          continue;
        }
      }
      for (const auto& e : entries) {
        auto r = by_id.find(e.response_id);
        if (r == by_id.end()) {
          missing.push_back(e.response_id);
          continue;
        }
        TaggedPair pair;
        pair.bias_value = bias_value(e.probs, m_d, profiles.global_mean, config.alpha);
        pair.label = pair.bias_value > config.beta ? BiasLabel::bias : BiasLabel::no_bias;
        pair.context = append_tag(r->second->context, pair.label);
        pair.response = strip_unsafe_token(r->second->text);
        pair.descriptor = d;
        pair.template_id = t;
        pair.response_id = e.response_id;
        out.push_back(std::move(pair));
      }
    }
  }
  if (!missing.empty()) {
    const auto msg = "responses without context record: '" + missing.front() + "'";
    throw JoinError(msg, std::move(missing));
  }
  return out;
}

std::vector<AlphaSummary> alpha_comparison(const StyleGrid& grid,
                                           const std::vector<std::string>& set_a,
                                           const std::vector<std::string>& set_b) {
  if (set_a.empty() || set_b.empty()) throw ArgumentError("alpha_comparison: empty exemplar set");
  const auto profiles = mean_style_profiles(grid);
  struct Located {
    const StyleVector* p;
    const StyleVector* m_d;
  };
  std::unordered_map<std::string, Located> located;
  for (const auto& [t, by_descriptor] : grid.cells())
    for (const auto& [d, entries] : by_descriptor)
      for (const auto& e : entries)
        located.emplace(e.response_id, Located{&e.probs, &profiles.descriptor_means.at(d)});

  auto mean_abs = [&](const std::vector<std::string>& ids, int alpha) {
    double sum = 0.0;
    for (const auto& id : ids) {
      auto it = located.find(id);
      if (it == located.end()) throw LookupError("response '" + id + "' not in grid");
      sum += std::abs(bias_value(*it->second.p, *it->second.m_d, profiles.global_mean, alpha));
    }
    return sum / static_cast<double>(ids.size());
  };

  std::vector<AlphaSummary> out;
  for (int alpha = 0; alpha <= 2; ++alpha) {
    AlphaSummary s;
    s.alpha = alpha;
    s.mean_abs_a = mean_abs(set_a, alpha);
    s.mean_abs_b = mean_abs(set_b, alpha);
    s.ratio = s.mean_abs_b == 0.0 ? std::numeric_limits<double>::infinity()
                                  : s.mean_abs_a / s.mean_abs_b;
    out.push_back(s);
  }
  return out;
}

}  // namespace hb
