#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hb {

/// The thirteen demographic axes, in the order used for reports.
inline constexpr std::array<std::string_view, 13> kAxes = {
    "ability",         "age",
    "body_type",       "characteristics",
    "cultural",        "gender_and_sex",
    "nationality",     "nonce",
    "political_ideologies", "race_ethnicity",
    "religion",        "sexual_orientation",
    "socioeconomic_class"};

bool is_known_axis(std::string_view axis);

enum class Placement { before_noun, after_noun };
enum class GenderRestriction { none, female_only, male_only };
enum class Preferredness { reviewed_unlabeled, dispreferred, polarizing, unreviewed };
enum class GenderClass { female, male, unspecified };
enum class Plurality { singular, plural };
enum class Stance { positive, negative, neutral };

std::string_view to_string(Placement v);
std::string_view to_string(GenderRestriction v);
std::string_view to_string(Preferredness v);
std::string_view to_string(GenderClass v);
std::string_view to_string(Plurality v);
std::string_view to_string(Stance v);

std::optional<Placement> parse_placement(std::string_view s);
std::optional<GenderRestriction> parse_gender_restriction(std::string_view s);
std::optional<Preferredness> parse_preferredness(std::string_view s);
std::optional<GenderClass> parse_gender_class(std::string_view s);
std::optional<Plurality> parse_plurality(std::string_view s);
std::optional<Stance> parse_stance(std::string_view s);

struct Descriptor {
  std::string text;
  std::string axis;
  std::string bucket;
  Placement placement = Placement::before_noun;
  GenderRestriction gender_restriction = GenderRestriction::none;
  Preferredness preferredness = Preferredness::unreviewed;
  std::string plural_override;

  bool operator==(const Descriptor&) const = default;
};

struct NounEntry {
  std::string singular;
  std::string plural;
  GenderClass gender_class = GenderClass::unspecified;

  bool operator==(const NounEntry&) const = default;
};

inline constexpr std::string_view kSingularSlot = "[NOUN PHRASE]";
inline constexpr std::string_view kPluralSlot = "[PLURAL NOUN PHRASE]";

struct Template {
  std::string id;
  std::string pattern;
  Plurality slot_plurality = Plurality::singular;
  Stance stance = Stance::neutral;

  bool operator==(const Template&) const = default;
};

/// Immutable after load; safe to share between threads.
class Registry {
 public:
  Registry() = default;
  Registry(std::vector<Descriptor> descriptors, std::vector<NounEntry> nouns,
           std::vector<Template> templates);

  const std::vector<Descriptor>& descriptors() const { return descriptors_; }
  const std::vector<NounEntry>& nouns() const { return nouns_; }
  const std::vector<Template>& templates() const { return templates_; }

  const Descriptor* find_descriptor(std::string_view text) const;
  const Template* find_template(std::string_view id) const;
  const Descriptor& descriptor(std::string_view text) const;  // throws LookupError

  bool operator==(const Registry& other) const;

 private:
  std::vector<Descriptor> descriptors_;
  std::vector<NounEntry> nouns_;
  std::vector<Template> templates_;
  std::map<std::string, std::size_t, std::less<>> descriptor_index_;
  std::map<std::string, std::size_t, std::less<>> template_index_;
};

struct RegistryFiles {
  std::filesystem::path descriptors;
  std::filesystem::path nouns;
  std::filesystem::path templates;

  static RegistryFiles in_directory(const std::filesystem::path& dir);
};

/// Parses the three registry files. Malformed records raise SchemaError with
/// the line number, a repeated descriptor raises UniquenessError and an axis
/// outside kAxes raises ValidationError.
Registry load_registry(const RegistryFiles& files);
Registry load_registry(const std::filesystem::path& data_dir);

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
  std::size_t descriptor_count = 0;
  std::size_t axis_count = 0;
  std::size_t female_only = 0;
  std::size_t male_only = 0;
  std::size_t female_nouns = 0;
  std::size_t male_nouns = 0;
  std::size_t unspecified_nouns = 0;
  std::size_t template_count = 0;

  bool ok() const { return violations.empty(); }
};

// Expected dimensions of the shipped dataset.
inline constexpr std::size_t kShippedDescriptorCount = 594;
inline constexpr std::size_t kShippedTemplateCount = 26;
inline constexpr std::size_t kShippedFemaleNouns = 10;
inline constexpr std::size_t kShippedMaleNouns = 11;
inline constexpr std::size_t kShippedUnspecifiedNouns = 9;

enum class ValidationScope {
  structural,  // type invariants only; any well-formed registry passes
  shipped,     // additionally checks the shipped template and noun counts
};

ValidationReport validate_registry(const Registry& reg,
                                   ValidationScope scope = ValidationScope::shipped);

/// Nouns a descriptor may combine with, honouring (F)/(M) restrictions.
std::vector<NounEntry> compatible_nouns(const Registry& reg, const Descriptor& d);
bool is_compatible(const Descriptor& d, const NounEntry& n);

}  // namespace hb
