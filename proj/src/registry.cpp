#include "holisticbias/registry.hpp"

#include <algorithm>
#include <set>

#include "holisticbias/errors.hpp"
#include "holisticbias/jsonl.hpp"

namespace hb {

namespace {

template <typename E, std::size_t N>
std::optional<E> lookup(std::string_view s, const std::array<std::pair<std::string_view, E>, N>& table) {
  for (const auto& [name, value] : table)
    if (name == s) return value;
  return std::nullopt;
}

template <typename E, std::size_t N>
std::string_view name_of(E v, const std::array<std::pair<std::string_view, E>, N>& table) {
  for (const auto& [name, value] : table)
    if (value == v) return name;
  return "?";
}

constexpr std::array<std::pair<std::string_view, Placement>, 2> kPlacements{{
    {"before_noun", Placement::before_noun}, {"after_noun", Placement::after_noun}}};
constexpr std::array<std::pair<std::string_view, GenderRestriction>, 3> kRestrictions{{
    {"none", GenderRestriction::none},
    {"female_only", GenderRestriction::female_only},
    {"male_only", GenderRestriction::male_only}}};
constexpr std::array<std::pair<std::string_view, Preferredness>, 4> kPreferredness{{
    {"reviewed_unlabeled", Preferredness::reviewed_unlabeled},
    {"dispreferred", Preferredness::dispreferred},
    {"polarizing", Preferredness::polarizing},
    {"unreviewed", Preferredness::unreviewed}}};
constexpr std::array<std::pair<std::string_view, GenderClass>, 3> kGenderClasses{{
    {"female", GenderClass::female}, {"male", GenderClass::male},
    {"unspecified", GenderClass::unspecified}}};
constexpr std::array<std::pair<std::string_view, Plurality>, 2> kPluralities{{
    {"singular", Plurality::singular}, {"plural", Plurality::plural}}};
constexpr std::array<std::pair<std::string_view, Stance>, 3> kStances{{
    {"positive", Stance::positive}, {"negative", Stance::negative}, {"neutral", Stance::neutral}}};

template <typename E>
E require_enum(const Json& j, std::string_view key, std::optional<E> (*parse)(std::string_view),
               const std::string& source, std::size_t line) {
  const auto raw = require_string(j, key, source, line);
  auto v = parse(raw);
  if (!v) throw SchemaError(source, line, "invalid " + std::string(key) + " '" + raw + "'");
  return *v;
}

std::size_t count_occurrences(std::string_view hay, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string_view::npos; pos = hay.find(needle, pos + 1))
    ++n;
  return n;
}

}  // namespace

bool is_known_axis(std::string_view axis) {
  return std::find(kAxes.begin(), kAxes.end(), axis) != kAxes.end();
}

std::string_view to_string(Placement v) { return name_of(v, kPlacements); }
std::string_view to_string(GenderRestriction v) { return name_of(v, kRestrictions); }
std::string_view to_string(Preferredness v) { return name_of(v, kPreferredness); }
std::string_view to_string(GenderClass v) { return name_of(v, kGenderClasses); }
std::string_view to_string(Plurality v) { return name_of(v, kPluralities); }
std::string_view to_string(Stance v) { return name_of(v, kStances); }

std::optional<Placement> parse_placement(std::string_view s) { return lookup(s, kPlacements); }
std::optional<GenderRestriction> parse_gender_restriction(std::string_view s) {
  return lookup(s, kRestrictions);
}
std::optional<Preferredness> parse_preferredness(std::string_view s) {
  return lookup(s, kPreferredness);
}
std::optional<GenderClass> parse_gender_class(std::string_view s) {
  return lookup(s, kGenderClasses);
}
std::optional<Plurality> parse_plurality(std::string_view s) { return lookup(s, kPluralities); }
std::optional<Stance> parse_stance(std::string_view s) { return lookup(s, kStances); }

Registry::Registry(std::vector<Descriptor> descriptors, std::vector<NounEntry> nouns,
                   std::vector<Template> templates)
    : descriptors_(std::move(descriptors)), nouns_(std::move(nouns)), templates_(std::move(templates)) {
  for (std::size_t i = 0; i < descriptors_.size(); ++i)
    descriptor_index_.emplace(descriptors_[i].text, i);
  for (std::size_t i = 0; i < templates_.size(); ++i) template_index_.emplace(templates_[i].id, i);
}

const Descriptor* Registry::find_descriptor(std::string_view text) const {
  auto it = descriptor_index_.find(text);
  return it == descriptor_index_.end() ? nullptr : &descriptors_[it->second];
}

const Template* Registry::find_template(std::string_view id) const {
  auto it = template_index_.find(id);
  return it == template_index_.end() ? nullptr : &templates_[it->second];
}

const Descriptor& Registry::descriptor(std::string_view text) const {
  const auto* d = find_descriptor(text);
  if (d == nullptr) throw LookupError("descriptor '" + std::string(text) + "' is not in the registry");
  return *d;
}

bool Registry::operator==(const Registry& other) const {
  return descriptors_ == other.descriptors_ && nouns_ == other.nouns_ &&
         templates_ == other.templates_;
}

RegistryFiles RegistryFiles::in_directory(const std::filesystem::path& dir) {
  return {dir / "descriptors.jsonl", dir / "nouns.jsonl", dir / "templates.jsonl"};
}

Registry load_registry(const RegistryFiles& files) {
  std::vector<Descriptor> descriptors;
  std::set<std::string, std::less<>> seen;
  const auto dsrc = files.descriptors.string();
  for_each_jsonl(files.descriptors, [&](const Json& j, std::size_t line) {
    check_schema_version(j, dsrc, line);
    Descriptor d;
    d.text = require_string(j, "text", dsrc, line);
    if (d.text.empty()) throw SchemaError(dsrc, line, "descriptor text is empty");
    d.axis = require_string(j, "axis", dsrc, line);
    if (!is_known_axis(d.axis))
      throw ValidationError(dsrc + ":" + std::to_string(line) + ": unknown axis '" + d.axis + "'");
    d.bucket = optional_string(j, "bucket", dsrc, line);
    d.placement = require_enum(j, "placement", &parse_placement, dsrc, line);
    d.gender_restriction =
        require_enum(j, "gender_restriction", &parse_gender_restriction, dsrc, line);
    d.preferredness = require_enum(j, "preferredness", &parse_preferredness, dsrc, line);
    d.plural_override = optional_string(j, "plural_override", dsrc, line);
    if (!seen.insert(d.text).second) throw UniquenessError(d.text);
    descriptors.push_back(std::move(d));
  });

  std::vector<NounEntry> nouns;
  const auto nsrc = files.nouns.string();
  for_each_jsonl(files.nouns, [&](const Json& j, std::size_t line) {
    check_schema_version(j, nsrc, line);
    NounEntry n;
    n.singular = require_string(j, "singular", nsrc, line);
    n.plural = require_string(j, "plural", nsrc, line);
    n.gender_class = require_enum(j, "gender_class", &parse_gender_class, nsrc, line);
    nouns.push_back(std::move(n));
  });

  std::vector<Template> templates;
  const auto tsrc = files.templates.string();
  for_each_jsonl(files.templates, [&](const Json& j, std::size_t line) {
    check_schema_version(j, tsrc, line);
    Template t;
    t.id = require_string(j, "id", tsrc, line);
    t.pattern = require_string(j, "pattern", tsrc, line);
    t.slot_plurality = require_enum(j, "slot_plurality", &parse_plurality, tsrc, line);
    t.stance = require_enum(j, "stance", &parse_stance, tsrc, line);
    templates.push_back(std::move(t));
  });

  return Registry(std::move(descriptors), std::move(nouns), std::move(templates));
}

Registry load_registry(const std::filesystem::path& data_dir) {
  return load_registry(RegistryFiles::in_directory(data_dir));
}

ValidationReport validate_registry(const Registry& reg, ValidationScope scope) {
  ValidationReport r;
  r.descriptor_count = reg.descriptors().size();
  r.template_count = reg.templates().size();

  std::set<std::string, std::less<>> texts;
  std::set<std::string, std::less<>> axes;
  for (const auto& d : reg.descriptors()) {
    if (d.text.empty()) r.violations.push_back("descriptor with empty text");
    if (!texts.insert(d.text).second) r.violations.push_back("duplicate descriptor '" + d.text + "'");
    if (d.text.find('|') != std::string::npos)
      r.violations.push_back("descriptor '" + d.text + "' contains the id separator '|'");
    if (!is_known_axis(d.axis))
      r.violations.push_back("unknown axis '" + d.axis + "' on descriptor '" + d.text + "'");
    else
      axes.insert(d.axis);
    const bool after_bucket = d.bucket == "after_the_noun";
    if (after_bucket != (d.placement == Placement::after_noun))
      r.violations.push_back("descriptor '" + d.text + "' placement disagrees with its bucket");
    if (d.gender_restriction == GenderRestriction::female_only) ++r.female_only;
    if (d.gender_restriction == GenderRestriction::male_only) ++r.male_only;
  }
  r.axis_count = axes.size();
  if (reg.descriptors().empty()) r.warnings.push_back("registry has no descriptors");
  else if (scope == ValidationScope::shipped && r.descriptor_count != kShippedDescriptorCount)
    r.warnings.push_back("descriptor count " + std::to_string(r.descriptor_count) + " != " +
                         std::to_string(kShippedDescriptorCount));

  std::set<std::string, std::less<>> plurals;
  std::set<std::string, std::less<>> singulars;
  for (const auto& n : reg.nouns()) {
    if (n.singular.empty()) r.violations.push_back("noun with empty singular form");
    if (n.plural.empty()) r.violations.push_back("noun '" + n.singular + "' has empty plural");
    else if (!plurals.insert(n.plural).second)
      r.violations.push_back("duplicate noun plural '" + n.plural + "'");
    if (!n.singular.empty() && !singulars.insert(n.singular).second)
      r.violations.push_back("duplicate noun '" + n.singular + "'");
    switch (n.gender_class) {
      case GenderClass::female: ++r.female_nouns; break;
      case GenderClass::male: ++r.male_nouns; break;
      case GenderClass::unspecified: ++r.unspecified_nouns; break;
    }
  }

  std::set<std::string, std::less<>> ids;
  for (const auto& t : reg.templates()) {
    if (t.id.empty() || t.id.find('|') != std::string::npos)
      r.violations.push_back("template id '" + t.id + "' is empty or contains '|'");
    if (!ids.insert(t.id).second) r.violations.push_back("duplicate template id '" + t.id + "'");
    const auto singular = count_occurrences(t.pattern, kSingularSlot);
    const auto plural = count_occurrences(t.pattern, kPluralSlot);
    if (singular + plural != 1)
      r.violations.push_back("template '" + t.id + "' must contain exactly one slot marker");
    else if ((plural == 1) != (t.slot_plurality == Plurality::plural))
      r.violations.push_back("template '" + t.id + "' slot marker disagrees with slot_plurality");
  }

  if (scope == ValidationScope::shipped) {
    if (r.template_count != kShippedTemplateCount)
      r.violations.push_back("template count != 26 (found " + std::to_string(r.template_count) + ")");
    if (r.female_nouns != kShippedFemaleNouns || r.male_nouns != kShippedMaleNouns ||
        r.unspecified_nouns != kShippedUnspecifiedNouns)
      r.violations.push_back("noun gender classes must be 10 female / 11 male / 9 unspecified");
  }
  return r;
}

bool is_compatible(const Descriptor& d, const NounEntry& n) {
  switch (d.gender_restriction) {
    case GenderRestriction::none: return true;
    case GenderRestriction::female_only: return n.gender_class == GenderClass::female;
    case GenderRestriction::male_only: return n.gender_class == GenderClass::male;
  }
  return false;
}

std::vector<NounEntry> compatible_nouns(const Registry& reg, const Descriptor& d) {
  const auto* found = reg.find_descriptor(d.text);
  if (found == nullptr || !(*found == d))
    throw LookupError("descriptor '" + d.text + "' is not in the registry");
  std::vector<NounEntry> out;
  for (const auto& n : reg.nouns())
    if (is_compatible(d, n)) out.push_back(n);
  return out;
}

}  // namespace hb
