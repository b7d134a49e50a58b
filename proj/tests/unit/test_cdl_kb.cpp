#include <doctest.h>

#include <set>

#include "geoform/cdl.hpp"
#include "geoform/kb.hpp"

using namespace geoform;

namespace {

const KnowledgeBase& bundled() {
  static const KnowledgeBase kb = load_kb(std::string(GEOFORM_DATA_DIR) + "/kb");
  return kb;
}

}  // namespace

TEST_CASE("bundled knowledge base loads") {
  const auto& kb = bundled();
  CHECK(kb.theorems().size() >= 25);
  REQUIRE(kb.predicate("IsMidpointOfLine"));
  CHECK(kb.predicate("IsMidpointOfLine")->kind == PredicateKind::Relation);
  REQUIRE(kb.predicate("LengthOfLine"));
  CHECK(kb.predicate("LengthOfLine")->kind == PredicateKind::Attribution);
  CHECK(kb.attribution_by_sym(kb.predicate("LengthOfLine")->sym)->name == "LengthOfLine");
  const TheoremDef* t = kb.theorem("vertical_angle");
  REQUIRE(t);
  CHECK(t->branches.size() == 1);
  CHECK(kb.theorem("no_such_theorem") == nullptr);
  for (const auto& th : kb.theorems()) CHECK_FALSE(th.branches.empty());
}

TEST_CASE("multi items follow the predicate's permutations") {
  const auto* line = bundled().predicate("Line");
  REQUIRE(line);
  auto items = multi_items(*line, "BA");
  CHECK(items.front() == "BA");
  CHECK(std::set<std::string>(items.begin(), items.end()) == std::set<std::string>{"AB", "BA"});
  CHECK(canonical_item(*line, "BA") == "AB");
  const auto* mid = bundled().predicate("IsMidpointOfLine");
  CHECK(split_groups(*mid, "MAB") == std::vector<std::string>{"M", "AB"});
  CHECK(instantiate("abc", {{'a', 'X'}, {'b', 'Y'}, {'c', 'Z'}}) == "XYZ");
}

TEST_CASE("GDL errors carry positions") {
  try {
    parse_gdl("theorem broken(AB)\n  premise: Line(AB) &\n  conclusion: Equal(LengthOfLine(AB),1)\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() >= 2);
  }
  CHECK_THROWS_AS(parse_gdl("theorem t(AB)\n  premise: NoSuchPredicate(AB)\n  conclusion: Equal(LengthOfLine(AB),1)\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_gpl("Line(AB"), ParseError);
  try {
    parse_gpl("Line(AB)&&Line(BC)");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.column() > 0);
  }
}

TEST_CASE("CDL statements round trip through format_cdl") {
  const auto& kb = bundled();
  const std::vector<std::pair<std::string, std::optional<CdlCategory>>> cases{
      {"Shape(AB,BC,CA)", CdlCategory::Construction},
      {"Collinear(AMB)", CdlCategory::Construction},
      {"IsMidpointOfLine(M,AB)", std::nullopt},
      {"Equal(LengthOfLine(AB),3)", std::nullopt},
      {"Equal(MeasureOfAngle(ABC),Add(MeasureOfAngle(ABD),10))", std::nullopt},
      {"Value(LengthOfLine(AC))", std::nullopt},
      {"Relation(IsMidpointOfLine(M,AB))", std::nullopt},
      {"Equal(LengthOfLine(AB),LengthOfLine(CD))", CdlCategory::Goal},
  };
  for (const auto& [text, hint] : cases) {
    CdlStatement s = parse_cdl(text, &kb, hint);
    CHECK(parse_cdl(format_cdl(s), &kb, hint) == s);
  }
  CHECK(parse_cdl("Value(LengthOfLine(AC))", &kb).category == CdlCategory::Goal);
  CHECK(parse_cdl("Relation(IsMidpointOfLine(M,AB))", &kb).goal_kind == GoalKind::Relation);
  CHECK_THROWS_AS(parse_cdl("Equal(NoSuchAttr(AB),3)", &kb), ParseError);
}

TEST_CASE("problem records convert to and from JSON") {
  ProblemRecord r = load_problem(std::string(GEOFORM_DATA_DIR) + "/problems/p01.json");
  CHECK(r.problem_id == "p01");
  CHECK(r.has_theorem_seqs);
  CHECK(r.problem_answer == std::optional<std::string>("80"));
  ProblemRecord back = problem_from_json(problem_to_json(r));
  CHECK(back.construction_cdl == r.construction_cdl);
  CHECK(back.text_cdl == r.text_cdl);
  CHECK(back.goal_cdl == r.goal_cdl);
  CHECK(back.theorem_seqs == r.theorem_seqs);
  CHECK(back.problem_answer == r.problem_answer);
  CHECK_THROWS(problem_from_json(nlohmann::json{{"problem_id", "x"}}));
}
