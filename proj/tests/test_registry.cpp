#include <doctest.h>

#include <algorithm>
#include <set>

#include "holisticbias/errors.hpp"
#include "holisticbias/registry.hpp"
#include "published_templates.hpp"
#include "test_util.hpp"

using namespace hb;
using hbt::shipped_registry;

namespace {

const char* kNoun = R"({"singular": "kid", "plural": "kids", "gender_class": "unspecified"})";
const char* kTemplate =
    R"({"id": "im", "pattern": "I'm [NOUN PHRASE].", "slot_plurality": "singular", "stance": "neutral"})";

std::string descriptor_line(const std::string& text, const std::string& axis = "ability") {
  return R"({"text": ")" + text + R"(", "axis": ")" + axis +
         R"(", "bucket": "", "placement": "before_noun", "gender_restriction": "none", "preferredness": "unreviewed"})";
}

Registry load_fixture(const hbt::TempDir& dir, const std::string& descriptors) {
  hbt::write_file(dir / "descriptors.jsonl", descriptors);
  hbt::write_file(dir / "nouns.jsonl", std::string(kNoun) + "\n");
  hbt::write_file(dir / "templates.jsonl", std::string(kTemplate) + "\n");
  return load_registry(dir.path());
}

}  // namespace

TEST_CASE("shipped registry dimensions") {
  const auto& reg = shipped_registry();
  CHECK(reg.descriptors().size() == 594);
  CHECK(reg.nouns().size() == 30);
  CHECK(reg.templates().size() == 26);

  std::set<std::string> axes;
  for (const auto& d : reg.descriptors()) {
    CHECK(is_known_axis(d.axis));
    axes.insert(d.axis);
  }
  CHECK(axes.size() == 13);

  const auto report = validate_registry(reg);
  CHECK(report.ok());
  CHECK(report.warnings.empty());
  CHECK(report.female_only == 4);
  CHECK(report.male_only == 3);
  CHECK(report.female_nouns == 10);
  CHECK(report.male_nouns == 11);
  CHECK(report.unspecified_nouns == 9);
}

TEST_CASE("gender-restricted descriptors are exactly the marked ones") {
  std::set<std::string> female, male;
  for (const auto& d : shipped_registry().descriptors()) {
    if (d.gender_restriction == GenderRestriction::female_only) female.insert(d.text);
    if (d.gender_restriction == GenderRestriction::male_only) male.insert(d.text);
  }
  CHECK(female == std::set<std::string>{"Filipina", "Filipina-American", "Latina", "lesbian"});
  CHECK(male == std::set<std::string>{"Filipino", "Filipino-American", "Latino"});
}

TEST_CASE("templates byte-match the published strings") {
  std::multiset<std::string> shipped;
  for (const auto& t : shipped_registry().templates()) shipped.insert(t.pattern);
  CHECK(shipped == std::multiset<std::string>(hbt::kPublishedTemplates.begin(), hbt::kPublishedTemplates.end()));
}

TEST_CASE("after-noun bucket controls placement") {
  for (const auto& d : shipped_registry().descriptors())
    CHECK((d.bucket == "after_the_noun") == (d.placement == Placement::after_noun));
}

TEST_CASE("compatible_nouns honours gender restrictions") {
  const auto& reg = shipped_registry();
  CHECK(compatible_nouns(reg, reg.descriptor("blind")).size() == 30);

  const auto latina = compatible_nouns(reg, reg.descriptor("Latina"));
  REQUIRE(latina.size() == 10);
  CHECK(latina.front().singular == "woman");
  CHECK(latina.back().singular == "sister");

  const auto filipino = compatible_nouns(reg, reg.descriptor("Filipino"));
  REQUIRE(filipino.size() == 11);
  CHECK(filipino.front().singular == "man");
  CHECK(filipino.back().singular == "brother");

  Descriptor stranger{"not-in-registry", "ability"};
  CHECK_THROWS_AS(compatible_nouns(reg, stranger), LookupError);
}

TEST_CASE("sum of compatible nouns follows the count law") {
  std::size_t total = 0;
  for (const auto& d : shipped_registry().descriptors())
    total += compatible_nouns(shipped_registry(), d).size();
  CHECK(total == 594 * 30 - 4 * 20 - 3 * 19);
  CHECK(total == 17683);
}

TEST_CASE("load_registry is deterministic") {
  CHECK(load_registry(hbt::data_dir()) == load_registry(hbt::data_dir()));
}

TEST_CASE("empty descriptor file loads with a warning") {
  hbt::TempDir dir("reg_empty");
  const auto reg = load_fixture(dir, "");
  CHECK(reg.descriptors().empty());
  const auto report = validate_registry(reg, ValidationScope::structural);
  CHECK(report.ok());
  CHECK_FALSE(report.warnings.empty());
}

TEST_CASE("duplicate descriptor raises a uniqueness error naming it") {
  hbt::TempDir dir("reg_dup");
  try {
    load_fixture(dir, descriptor_line("blind") + "\n" + descriptor_line("deaf") + "\n" +
                          descriptor_line("blind") + "\n");
    FAIL("expected UniquenessError");
  } catch (const UniquenessError& e) {
    CHECK(e.key() == "blind");
    CHECK(std::string(e.what()).find("blind") != std::string::npos);
  }
}

TEST_CASE("unknown axis and malformed lines are rejected on load") {
  hbt::TempDir dir("reg_bad");
  CHECK_THROWS_AS(load_fixture(dir, descriptor_line("blind", "hobbies") + "\n"), ValidationError);
  try {
    load_fixture(dir, descriptor_line("blind") + "\n\n{not json\n");
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(load_fixture(dir, R"({"text": "blind"})" "\n"), SchemaError);
}

TEST_CASE("validate_registry flags an unknown axis and a short template list") {
  const auto& shipped = shipped_registry();
  auto descriptors = shipped.descriptors();
  descriptors[0].axis = "hobbies";
  const auto bad_axis = validate_registry(Registry(descriptors, shipped.nouns(), shipped.templates()));
  REQUIRE(bad_axis.violations.size() == 1);
  CHECK(bad_axis.violations[0].find("unknown axis") != std::string::npos);

  auto templates = shipped.templates();
  templates.pop_back();
  const auto short_list =
      validate_registry(Registry(shipped.descriptors(), shipped.nouns(), templates));
  REQUIRE(short_list.violations.size() == 1);
  CHECK(short_list.violations[0].find("template count != 26") != std::string::npos);
}
