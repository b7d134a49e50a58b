#include <doctest.h>

#include "../support/gpl_gen.hpp"
#include "geoform/gpl.hpp"
#include "geoform/kb.hpp"

using namespace geoform;

namespace {

Relation rel(const std::string& vars, std::initializer_list<const char*> tuples) {
  Relation r;
  r.vars = vars;
  int id = 0;
  for (const char* t : tuples) r.rows[t] = {id++};
  return r;
}

std::vector<std::string> branch_texts(const std::vector<TheoremBranch>& bs) {
  std::vector<std::string> out;
  for (const auto& b : bs) out.push_back(b.text());
  return out;
}

}  // namespace

TEST_CASE("join is the constrained Cartesian product") {
  Relation r1 = rel("ab", {"AB", "BC"});
  Relation r2 = rel("bc", {"BC", "CA"});
  Relation r3 = join(r1, r2);
  CHECK(r3.vars == "abc");
  CHECK(oracle::as_assignments(r3) ==
        oracle::join(oracle::assignments("ab", {"AB", "BC"}), oracle::assignments("bc", {"BC", "CA"})));
  CHECK(r3.rows.count("ABC"));
  CHECK(r3.rows.count("BCA"));
  CHECK(r3.size() == 2);
  CHECK(join(rel("ab", {}), r2).empty());
  // Supports of both sides are merged.
  CHECK(r3.rows.at("ABC") == Support{0});
}

TEST_CASE("union, complement and anti-join") {
  CHECK(union_rel(rel("a", {"A"}), rel("a", {"B"})).size() == 2);
  Relation r = rel("ab", {"AB"});
  CHECK(union_rel(r, r).size() == 1);
  CHECK_THROWS_AS(union_rel(rel("a", {"A"}), rel("b", {"A"})), std::invalid_argument);
  CHECK(oracle::as_assignments(complement_rel(rel("a", {"A"}), "AB")) == oracle::assignments("a", {"B"}));
  CHECK(complement_rel(rel("ab", {}), "ABC").size() == 6);
  Relation twice = complement_rel(complement_rel(r, "ABC"), "ABC");
  CHECK(oracle::as_assignments(twice) == oracle::as_assignments(r));
  Relation anti = anti_join(rel("ab", {"AB", "BA", "CA"}), rel("a", {"A"}));
  CHECK(oracle::as_assignments(anti) == oracle::assignments("ab", {"BA", "CA"}));
}

TEST_CASE("filter_algebraic keeps rows whose constraint holds") {
  Relation lines = rel("abc", {"ABC", "BCD", "CDA"});
  BranchAtom atom;
  atom.kind = BranchAtom::Kind::Alg;
  atom.lhs = Expr::attr("LengthOfLine", {"ab"});
  atom.rhs = Expr::attr("LengthOfLine", {"bc"});
  // Known lengths: AB = BC = 1, CD = 2, DA = 1.
  std::map<std::string, int> len{{"AB", 1}, {"BC", 1}, {"CD", 2}, {"DA", 1}};
  auto check = [&](const BranchAtom& a, const std::map<char, char>& b) -> std::optional<Support> {
    std::string l{b.at(a.lhs.points()[0]), b.at(a.lhs.points()[1])};
    std::string r{b.at(a.rhs.points()[0]), b.at(a.rhs.points()[1])};
    if (len.at(l) == len.at(r)) return Support{99};
    return std::nullopt;
  };
  Relation out = filter_algebraic(lines, atom, check);
  CHECK(out.size() == 1);
  CHECK(out.rows.count("ABC"));
  CHECK(out.rows.at("ABC") == Support{0, 99});
  CHECK(filter_algebraic(Relation{"abc", {}}, atom, check).empty());
}

TEST_CASE("worked example expands to three branches") {
  GplExpr e = parse_gpl("R1(AB)&(R2(BC)|(~R3(B)|Equal(F(AB),0))&R4(BC)&R5(B))");
  auto branches = to_dnf(e);
  CHECK(branch_texts(branches) ==
        std::vector<std::string>{"R1(AB)&R2(BC)", "R1(AB)&~R3(B)&R4(BC)&R5(B)", "R1(AB)&Equal(F(AB),0)&R4(BC)&R5(B)"});
  TheoremBranch reordered = reorder_branch(branches[2]);
  CHECK(reordered.text() == "R1(AB)&R5(B)&R4(BC)&Equal(F(AB),0)");
}

TEST_CASE("to_dnf rejects ill-formed premises") {
  CHECK_THROWS_AS(to_dnf(parse_gpl("R1(AB)|R2(BC)")), std::invalid_argument);
  CHECK(to_dnf(parse_gpl("R1(AB)")).size() == 1);
}

TEST_CASE("DNF, reordering and execution agree with brute force") {
  oracle::Rng rng(3);
  for (int t = 0; t < 150; ++t) {
    oracle::GplWorld w;
    w.universe = std::string("ABCDE").substr(0, static_cast<std::size_t>(oracle::uniform(rng, 2, 5)));
    const std::string vars = std::string("abc").substr(0, static_cast<std::size_t>(oracle::uniform(rng, 1, 3)));
    GplExpr e = oracle::random_gpl(rng, w, vars, oracle::uniform(rng, 1, 3));
    const auto expected = oracle::brute_force(w, e, vars);
    const auto ctx = w.context();
    CHECK(oracle::as_assignments(evaluate_expr(e, ctx)) == expected);
    oracle::AssignmentSet via_dnf;
    for (const auto& b : to_dnf(e)) {
      auto r = oracle::as_assignments(execute_branch(reorder_branch(b), ctx));
      CHECK(r == oracle::as_assignments(execute_branch(b, ctx)));
      via_dnf.insert(r.begin(), r.end());
    }
    CHECK(via_dnf == expected);
  }
}

TEST_CASE("execute_branch short-circuits on an empty first relation") {
  oracle::GplWorld w;
  w.universe = "ABC";
  w.relations["R1"] = {};
  w.relations["R2"] = {"AB"};
  int calls = 0;
  auto ctx = w.context();
  ctx.algebraic = [&](const BranchAtom&, const std::map<char, char>&) -> std::optional<Support> {
    ++calls;
    return Support{};
  };
  auto b = to_dnf(parse_gpl("R1(AB)&R2(AB)&Equal(F(AB),0)"));
  CHECK(execute_branch(b[0], ctx).empty());
  CHECK(calls == 0);
}

TEST_CASE("join and union laws on random relations") {
  oracle::Rng rng(5);
  const std::string universe = "ABCDE";
  auto random_rel = [&](const std::string& vars) {
    std::map<std::string, Support> items;
    int id = 0;
    for (const auto& t : oracle::random_tuples(rng, universe, vars.size(), 10)) items[t] = {id++};
    return atom_relation(vars, items);
  };
  auto same = [](const Relation& a, const Relation& b) { return oracle::as_assignments(a) == oracle::as_assignments(b); };
  for (int t = 0; t < 100; ++t) {
    Relation r1 = random_rel("ab");
    Relation r2 = random_rel("bc");
    Relation r3 = random_rel("cd");
    Relation r2b = random_rel("cb");
    CHECK(oracle::as_assignments(join(r1, r2)) ==
          oracle::join(oracle::as_assignments(r1), oracle::as_assignments(r2)));
    CHECK(same(join(r1, r2), join(r2, r1)));
    CHECK(same(join(join(r1, r2), r3), join(r1, join(r2, r3))));
    CHECK(same(join(r1, union_rel(r2, r2b)), union_rel(join(r1, r2), join(r1, r2b))));
    CHECK(same(join(unit_relation(), r1), r1));
  }
}
