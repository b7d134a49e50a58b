#include <doctest.h>

#include <algorithm>
#include <set>

#include "geoform/search.hpp"

using namespace geoform;

namespace {

const KnowledgeBase& bundled() {
  static const KnowledgeBase kb = load_kb(std::string(GEOFORM_DATA_DIR) + "/kb");
  return kb;
}

ProblemRecord record(const std::string& id) {
  return load_problem(std::string(GEOFORM_DATA_DIR) + "/problems/" + id + ".json");
}

std::vector<std::size_t> drain(Frontier& f) {
  std::vector<std::size_t> out;
  while (auto n = f.pop()) out.push_back(*n);
  return out;
}

}  // namespace

TEST_CASE("BFS and DFS frontiers") {
  Frontier bfs(Strategy::BFS, 20, 0);
  Frontier dfs(Strategy::DFS, 20, 0);
  for (std::size_t i = 0; i < 5; ++i) {
    bfs.push(i, 1);
    dfs.push(i, 1);
  }
  CHECK(drain(bfs) == std::vector<std::size_t>{0, 1, 2, 3, 4});
  CHECK(drain(dfs) == std::vector<std::size_t>{4, 3, 2, 1, 0});
  CHECK(bfs.empty());
}

TEST_CASE("random frontier is a seeded permutation") {
  auto order = [](std::uint64_t seed) {
    Frontier f(Strategy::RS, 20, seed);
    for (std::size_t i = 0; i < 30; ++i) f.push(i, 1);
    return drain(f);
  };
  auto a = order(4);
  CHECK(a == order(4));
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted.size() == 30);
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  CHECK(a != order(5));
}

TEST_CASE("beam frontier keeps at most beam_size per generation") {
  Frontier f(Strategy::BS, 3, 1);
  for (std::size_t i = 0; i < 10; ++i) f.push(i, 1);
  for (std::size_t i = 10; i < 12; ++i) f.push(i, 2);
  auto out = drain(f);
  CHECK(out.size() == 5);
  CHECK(f.dropped() == 7);
  CHECK(std::count_if(out.begin(), out.end(), [](std::size_t n) { return n < 10; }) == 3);
  // Deferred mode hands the dropped nodes back at the end.
  Frontier d(Strategy::BS, 3, 1, true);
  for (std::size_t i = 0; i < 10; ++i) d.push(i, 1);
  auto all = drain(d);
  CHECK(std::set<std::size_t>(all.begin(), all.end()).size() == 10);
}

TEST_CASE("method and strategy names parse") {
  CHECK(parse_method("fw") == Method::Forward);
  CHECK(parse_method("backward") == Method::Backward);
  CHECK(parse_strategy("BS") == Strategy::BS);
  CHECK(parse_strategy("rs") == Strategy::RS);
  CHECK_THROWS_AS(parse_method("sideways"), std::invalid_argument);
  CHECK_THROWS_AS(parse_strategy("astar"), std::invalid_argument);
}

TEST_CASE("every method and strategy solves a one-step problem") {
  Problem p(bundled(), record("p01"));
  for (Method m : {Method::Forward, Method::Backward}) {
    for (Strategy s : {Strategy::BFS, Strategy::DFS, Strategy::RS, Strategy::BS}) {
      SearchConfig c;
      c.method = m;
      c.strategy = s;
      c.timeout_seconds = 20;
      SearchResult r = run_search(p, c);
      INFO(method_name(m), " ", strategy_name(s));
      CHECK(r.outcome == Outcome::Solved);
      CHECK(replay_solves(bundled(), p.record(), r.theorem_seqs));
    }
  }
  // The input problem is untouched.
  CHECK(p.goal().status == GoalStatus::Unsolved);
}

TEST_CASE("searches are deterministic for a fixed seed") {
  Problem p(bundled(), record("p04"));
  for (Method m : {Method::Forward, Method::Backward}) {
    SearchConfig c;
    c.method = m;
    c.strategy = Strategy::RS;
    c.seed = 9;
    c.timeout_seconds = 20;
    SearchResult a = run_search(p, c);
    SearchResult b = run_search(p, c);
    CHECK(a.outcome == b.outcome);
    CHECK(a.theorem_seqs == b.theorem_seqs);
    CHECK(a.steps == b.steps);
  }
}

TEST_CASE("an underdetermined goal ends unsolved") {
  ProblemRecord r;
  r.problem_id = "open";
  r.construction_cdl = {"Shape(AB,BC,CA)"};
  r.goal_cdl = "Value(LengthOfLine(AB))";
  Problem p(bundled(), r);
  SearchConfig c;
  c.max_depth = 3;
  c.timeout_seconds = 20;
  CHECK(run_search(p, c).outcome == Outcome::Unsolved);
  c.method = Method::Backward;
  CHECK(run_search(p, c).outcome == Outcome::Unsolved);
}

TEST_CASE("a tiny budget times out") {
  Problem p(bundled(), record("p23"));
  SearchConfig c;
  c.timeout_seconds = 1e-6;
  CHECK(run_search(p, c).outcome == Outcome::Timeout);
}

TEST_CASE("replay of an annotated sequence") {
  auto r = record("p17");
  CHECK(replay_solves(bundled(), r, r.theorem_seqs));
  CHECK_FALSE(replay_solves(bundled(), r, {}));
  Problem p = replay_theorem_seqs(bundled(), r, r.theorem_seqs);
  CHECK(p.goal().status == GoalStatus::Solved);
}

TEST_CASE("a beam at least as wide as each generation behaves as BFS") {
  Frontier bs(Strategy::BS, 50, 3);
  Frontier bfs(Strategy::BFS, 50, 3);
  std::vector<std::size_t> a, b;
  std::size_t next = 0;
  for (int depth = 1; depth <= 3; ++depth) {
    for (int i = 0; i < 7; ++i, ++next) {
      bs.push(next, depth);
      bfs.push(next, depth);
    }
  }
  auto x = drain(bs);
  auto y = drain(bfs);
  CHECK(bs.dropped() == 0);
  // Same generations in the same order; within one generation the beam's
  // sample order may differ.
  REQUIRE(x.size() == y.size());
  for (std::size_t g = 0; g < 3; ++g) {
    std::set<std::size_t> gx(x.begin() + static_cast<long>(7 * g), x.begin() + static_cast<long>(7 * (g + 1)));
    std::set<std::size_t> gy(y.begin() + static_cast<long>(7 * g), y.begin() + static_cast<long>(7 * (g + 1)));
    CHECK(gx == gy);
  }
  Problem p(bundled(), record("p04"));
  SearchConfig c;
  c.timeout_seconds = 20;
  SearchResult r_bfs = run_search(p, c);
  c.strategy = Strategy::BS;
  c.beam_size = 10000;
  SearchResult r_bs = run_search(p, c);
  CHECK(r_bs.outcome == r_bfs.outcome);
  CHECK(r_bs.theorem_seqs.size() == r_bfs.theorem_seqs.size());
}
