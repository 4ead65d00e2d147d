#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "holisticbias/compiler.hpp"
#include "holisticbias/generation_bias.hpp"

namespace hb {

struct StyleSkew {
  std::size_t style_index = 0;
  double shift = 0.0;  // additive, in [0, 0.5]
};

/// Knobs of the deterministic stand-in scorers. Every output is a pure
/// function of (key, profile).
struct MockProfile {
  std::uint64_t seed = 0;
  double ppl_base = 40.0;
  double ppl_sigma = 0.35;  // log-space spread of per-sentence noise
  double nonce_ppl_multiplier = 1.0;
  // Log-space scale of a stable per-descriptor offset; 0 keeps every
  // descriptor's perplexities identically distributed.
  double descriptor_ppl_spread = 0.0;
  double style_noise = 0.5;
  std::map<std::string, StyleSkew> axis_style_skew;
  double offense_negativity_boost = 0.0;

  /// Throws ConfigError on out-of-range fields.
  void validate() const;
  /// Additionally rejects skews pointing past the style count.
  void validate(std::size_t style_count) const;

  static MockProfile load(const std::filesystem::path& path);
  static MockProfile from_json(const Json& j);
  Json to_json() const;
};

double mock_perplexity(const SentenceRecord& record, const MockProfile& profile);

/// Near-uniform vector hashed from `key` (the record id when empty), with
/// the axis skew added to its style. The shift is scaled by a stable
/// per-descriptor factor in [0.5, 1.5) so skewed descriptors also differ
/// among themselves. Sums to 1. Throws ConfigError when the shift cannot be
/// renormalized into a valid vector.
StyleVector mock_style_vector(const SentenceRecord& record, const MockProfile& profile,
                              std::size_t style_count, std::string_view key = {});

/// Hash-derived base probability; negative-stance templates are lifted to
/// base + boost * (1 - base), so they never fall below the boost.
double mock_offense(const SentenceRecord& record, const MockProfile& profile, Stance stance,
                    std::string_view key = {});

/// Zero-padded so lexical and numeric order agree.
std::string mock_response_id(std::string_view sentence_id, std::size_t k);

/// Deterministic canned reply mentioning the descriptor; some replies carry
/// the unsafe-generation marker so the stripping path is exercised.
ResponseRecord mock_response(const SentenceRecord& record, const MockProfile& profile,
                             std::size_t k);

enum class SchemaKind { sentences, ppl, styles, offense, responses, tagged };
std::string_view to_string(SchemaKind k);
std::optional<SchemaKind> parse_schema_kind(std::string_view s);

/// Optional reference data for referential-integrity checks.
struct SchemaContext {
  const SentenceIndex* sentences = nullptr;
  const std::vector<ResponseRecord>* responses = nullptr;
  std::optional<std::size_t> style_count;
};

struct SchemaReport {
  std::size_t records = 0;
  std::vector<std::string> violations;  // "<file>:<line>: <message>"
  bool ok() const { return violations.empty(); }
};

/// Report-only: every problem becomes a line-numbered violation.
SchemaReport validate_schema(std::istream& in, SchemaKind kind, const SchemaContext& context = {},
                             const std::string& source = "<stream>");
SchemaReport validate_schema(const std::filesystem::path& path, SchemaKind kind,
                             const SchemaContext& context = {});

}  // namespace hb
