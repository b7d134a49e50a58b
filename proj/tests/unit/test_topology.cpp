#include <doctest.h>

#include <algorithm>

#include "../support/oracles.hpp"
#include "geoform/topology.hpp"

using namespace geoform;

TEST_CASE("rotate and reflect") {
  CHECK(rotate("ABCD") == "BCDA");
  CHECK(rotate("AB") == "BA");
  CHECK(rotate(rotate(rotate("ABC"))) == "ABC");
  CHECK(reflect("ABCD") == "DCBA");
  CHECK(reflect(reflect("ABC")) == "ABC");
  CHECK(reflect("A") == "A");
}

TEST_CASE("multi_repr enumerates rotations") {
  CHECK(multi_repr("ABC") == TsiSet{"ABC", "BCA", "CAB"});
  CHECK(multi_repr("AB") == TsiSet{"AB", "BA"});
  for (const auto& r : multi_repr("PQRST")) CHECK(multi_repr(r) == multi_repr("PQRST"));
  CHECK(canonical_rotation("CAB") == "ABC");
}

TEST_CASE("compose_pair merges along a reversed shared run") {
  CHECK(compose_pair("BCA", "DAC") == std::optional<PointSeq>("BCDA"));
  CHECK_FALSE(compose_pair("ABC", "DEF").has_value());
  // A shared run in the same direction is an overlap, not a neighbour.
  CHECK(compose_sets(multi_repr("ABC"), multi_repr("ABD")).empty());
  // Longer run: quadrilateral ABCD and pentagon D C B E F share C-B.
  auto r = compose_sets(multi_repr("ABCD"), multi_repr("DCBEF"));
  REQUIRE_FALSE(r.empty());
  CHECK(canonical_rotation(*r.begin()) == oracle::merge_cycles({"ABCD", "DCBEF"}));
}

TEST_CASE("compose_sets of two triangles") {
  auto r = compose_sets(multi_repr("ABC"), multi_repr("ACD"));
  CHECK(r == multi_repr("BCDA"));
  CHECK(compose_sets(multi_repr("ABC"), multi_repr("DEF")).empty());
}

TEST_CASE("composition matches the edge-cancellation oracle") {
  oracle::Rng rng(7);
  int checked = 0;
  for (int t = 0; t < 300; ++t) {
    auto d = oracle::random_subdivision(rng, 2);
    if (d.pieces.size() != 2) continue;
    auto ab = compose_sets(multi_repr(d.pieces[0]), multi_repr(d.pieces[1]));
    auto ba = compose_sets(multi_repr(d.pieces[1]), multi_repr(d.pieces[0]));
    REQUIRE_FALSE(ab.empty());
    CHECK(ab == ba);
    CHECK(ab == multi_repr(d.outline));
    std::set<char> pa(d.pieces[0].begin(), d.pieces[0].end());
    std::size_t k = 0;
    for (char c : d.pieces[1]) k += pa.count(c);
    CHECK(ab.begin()->size() == d.pieces[0].size() + d.pieces[1].size() - 2 * k + 2);
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("construct_all closure equals the brute-force composite set") {
  oracle::Rng rng(11);
  for (int t = 0; t < 60; ++t) {
    auto d = oracle::random_subdivision(rng, 5);
    auto expected = oracle::all_composites(d.pieces);
    auto got = construct_all(d.pieces);
    CHECK(got == expected);
    auto shuffled = d.pieces;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (auto& s : shuffled) s = s.substr(1) + s[0];
    CHECK(construct_all(shuffled) == got);
  }
}

TEST_CASE("construct_all of one unit") { CHECK(construct_all({"ABC"}) == std::set<PointSeq>{"ABC"}); }
