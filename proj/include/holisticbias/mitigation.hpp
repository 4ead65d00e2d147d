#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "holisticbias/errors.hpp"
#include "holisticbias/generation_bias.hpp"

namespace hb {

inline constexpr std::string_view kMaskToken = "left-handed";
inline constexpr std::string_view kUnsafeToken = "_POTENTIALLY_UNSAFE__";
inline constexpr std::string_view kBiasTag = "bias";
inline constexpr std::string_view kNoBiasTag = "no_bias";

// Thresholds used for the two model scales the bias-tagging setup was
// tuned on; exposed as CLI presets.
inline constexpr double kBetaDialoGptScale = 0.0003;
inline constexpr double kBetaBlenderBotScale = 0.0030;

/// Replaces every case-insensitive, word-bounded occurrence of the
/// descriptor (and of its dehyphenated form) with "left-handed". A word
/// boundary is a non-alphanumeric ASCII character or the string edge.
std::string mask_descriptor(std::string_view response, std::string_view descriptor);

/// Byte offsets of word-bounded, case-insensitive matches of `needle`.
std::vector<std::size_t> find_word_occurrences(std::string_view text, std::string_view needle);

/// Removes every "_POTENTIALLY_UNSAFE__" and collapses whitespace runs to
/// single spaces (trimming the ends).
std::string strip_unsafe_token(std::string_view text);

/// Strip first, then mask: the order used before style classification.
std::string prepare_for_style_classification(std::string_view response,
                                             std::string_view descriptor);

struct BiasProjectionConfig {
  int alpha = 0;
  double beta = kBetaBlenderBotScale;

  /// Throws ConfigError unless alpha is 0, 1 or 2 and beta > 0.
  void validate() const;
};

/// (p - m_bar) . (m_d - m_bar) / ||m_d - m_bar||^alpha. A zero direction
/// yields 0 for alpha = 0 and DegenerateError otherwise.
double bias_value(std::span<const double> p, std::span<const double> m_d,
                  std::span<const double> m_bar, int alpha);

enum class BiasLabel { bias, no_bias };
std::string_view to_string(BiasLabel label);

struct TaggedPair {
  std::string context;
  std::string response;
  BiasLabel label = BiasLabel::no_bias;
  double bias_value = 0.0;
  std::string descriptor;
  std::string template_id;
  std::string response_id;
};

Json to_json(const TaggedPair& p);

/// Appends the tag as a final whitespace-separated token.
std::string append_tag(std::string_view context, BiasLabel label);

/// Labels every response in the grid against beta, ordered by template,
/// descriptor and response index. Responses missing from `responses` raise
/// JoinError; descriptors with a zero bias direction under alpha > 0 are
/// skipped with a warning.
std::vector<TaggedPair> tag_pairs(const StyleGrid& grid,
                                  const std::vector<ResponseRecord>& responses,
                                  const BiasProjectionConfig& config, Warnings* warnings = nullptr);

struct AlphaSummary {
  int alpha = 0;
  double mean_abs_a = 0.0;
  double mean_abs_b = 0.0;
  double ratio = 0.0;  // mean_abs_a / mean_abs_b
};

/// Mean |b| over two named response subsets for alpha in {0, 1, 2}.
std::vector<AlphaSummary> alpha_comparison(const StyleGrid& grid,
                                           const std::vector<std::string>& set_a,
                                           const std::vector<std::string>& set_b);

}  // namespace hb
