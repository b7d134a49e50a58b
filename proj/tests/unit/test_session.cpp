#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <thread>

#include "geoform/session.hpp"

using namespace geoform;
using nlohmann::json;

namespace {

const KnowledgeBase& bundled() {
  static const KnowledgeBase kb = load_kb(std::string(GEOFORM_DATA_DIR) + "/kb");
  return kb;
}

const std::string kProblems = std::string(GEOFORM_DATA_DIR) + "/problems";

int status_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const SessionError& e) {
    return e.status();
  }
  return 200;
}

}  // namespace

TEST_CASE("sessions open from bundled ids or inline records") {
  SessionStore store(bundled(), kProblems);
  json s = store.create({{"problem_id", "p01"}});
  CHECK(s.at("session_id") == "s1");
  CHECK(s.at("problem_id") == "p01");
  CHECK(s.at("goal").at("status") == "unsolved");
  CHECK_FALSE(s.at("applicable").empty());
  json inline_rec = problem_to_json(load_problem(kProblems + "/p05.json"));
  CHECK(store.create({{"problem", inline_rec}}).at("session_id") == "s2");
  CHECK(store.size() == 2);
  CHECK(store.problems().size() >= 20);
  CHECK(status_of([&] { store.create({{"problem_id", "nope"}}); }) == 404);
  CHECK(status_of([&] { store.create({{"problem_id", "../p01"}}); }) == 404);
  CHECK(status_of([&] { store.create(json::object()); }) == 422);
  json bad = inline_rec;
  bad["text_cdl"] = {"Equal(LengthOfLine(AZ),3)"};
  CHECK(status_of([&] { store.create({{"problem", bad}}); }) == 422);
  CHECK(status_of([&] { store.snapshot("s99"); }) == 404);
}

TEST_CASE("apply then undo restores the initial view") {
  SessionStore store(bundled(), kProblems);
  const std::string id = store.create({{"problem_id", "p01"}}).at("session_id");
  const json before = store.snapshot(id);
  json step = store.apply_step(id, {{"theorem", "triangle_property_angle_sum(ABC)"}});
  CHECK(step.at("goal").at("status") == "solved");
  CHECK_FALSE(step.at("added").empty());
  // One new hyperedge, labelled with the theorem.
  REQUIRE(step.at("delta").at("edges").size() == 1);
  CHECK(step.at("delta").at("edges")[0].at("theorem") == "triangle_property_angle_sum(ABC)");
  CHECK(store.hypertree(id).at("edges").size() == before.at("hypertree").at("edges").size() + 1);
  CHECK(store.snapshot(id).at("log") == json{"triangle_property_angle_sum(ABC)"});
  json after = store.undo(id);
  CHECK(after == before);
  CHECK(status_of([&] { store.undo(id); }) == 409);
}

TEST_CASE("rejected steps leave the session unchanged") {
  SessionStore store(bundled(), kProblems);
  const std::string id = store.create({{"problem_id", "p08"}}).at("session_id");
  const json before = store.snapshot(id);
  CHECK(status_of([&] { store.apply_step(id, {{"theorem", "no_such_theorem"}}); }) == 422);
  CHECK(status_of([&] { store.apply_step(id, json::object()); }) == 422);
  CHECK(status_of([&] { store.apply_step(id, {{"theorem", "midpoint_of_line_judgment"}, {"binding", 3}}); }) == 422);
  CHECK(store.snapshot(id) == before);
  json step = store.apply_step(id, {{"theorem", "midpoint_of_line_judgment(1)"}, {"binding", {"M", "AB"}}});
  CHECK(step.at("goal").at("status") == "solved");
  CHECK(step.at("theorem") == "midpoint_of_line_judgment(1,M,AB)");
}

TEST_CASE("search runs on a copy") {
  SessionStore store(bundled(), kProblems);
  const std::string id = store.create({{"problem_id", "p04"}}).at("session_id");
  const json before = store.snapshot(id);
  json r = store.search(id, {{"method", "bw"}, {"strategy", "bfs"}, {"budget", 20}});
  CHECK(r.at("outcome") == "solved");
  CHECK(replay_solves(bundled(), load_problem(kProblems + "/p04.json"), r.at("theorem_seqs")));
  CHECK(store.snapshot(id) == before);
  CHECK(status_of([&] { store.search(id, {{"strategy", "astar"}}); }) == 422);
  CHECK(status_of([&] { store.search(id, {{"budget", -1}}); }) == 422);
  CHECK(status_of([&] { store.search(id, {{"max_depth", "deep"}}); }) == 422);
}

TEST_CASE("concurrent mutations never interleave") {
  SessionStore store(bundled(), kProblems);
  const std::string id = store.create({{"problem_id", "p17"}}).at("session_id");
  const auto seqs = load_problem(kProblems + "/p17.json").theorem_seqs;
  std::atomic<int> ok{0};
  std::atomic<int> busy{0};
  std::atomic<int> other{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 6; ++i) {
        const int code = status_of([&] {
          if ((i + t) % 3 == 2) {
            store.undo(id);
          } else {
            store.apply_step(id, {{"theorem", seqs[static_cast<std::size_t>(i + t) % seqs.size()]}});
          }
        });
        (code == 200 ? ok : code == 409 ? busy : other)++;
        store.snapshot(id);
      }
    });
  }
  for (auto& th : threads) th.join();
  CHECK(ok + busy + other == 24);
  CHECK(other == 0);
  // Whatever interleaving happened, the session is consistent: undoing
  // every logged step returns to the initial store.
  json s = store.snapshot(id);
  const std::size_t steps = s.at("log").size();
  for (std::size_t i = 0; i < steps; ++i) store.undo(id);
  SessionStore fresh(bundled(), kProblems);
  json initial = fresh.create({{"problem_id", "p17"}});
  CHECK(store.snapshot(id).at("hypertree") == initial.at("hypertree"));
}

TEST_CASE("HTTP routes and status codes") {
  SessionStore store(bundled(), kProblems);
  httplib::Server server;
  register_routes(server, store);
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client cli("127.0.0.1", port);

  auto list = cli.Get("/problems");
  REQUIRE(list);
  CHECK(list->status == 200);
  CHECK(json::parse(list->body).size() >= 20);

  auto created = cli.Post("/sessions", R"J({"problem_id":"p01"})J", "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  const std::string id = json::parse(created->body).at("session_id");

  auto step = cli.Post("/sessions/" + id + "/steps", R"J({"theorem":"triangle_property_angle_sum(ABC)"})J",
                       "application/json");
  REQUIRE(step);
  CHECK(step->status == 200);
  CHECK(json::parse(step->body).at("goal").at("status") == "solved");

  CHECK(cli.Get("/sessions/" + id)->status == 200);
  CHECK(cli.Get("/sessions/" + id + "/hypertree")->status == 200);
  CHECK(cli.Get("/sessions/" + id + "/theorems")->status == 200);
  CHECK(cli.Post("/sessions/" + id + "/undo", "", "application/json")->status == 200);
  CHECK(cli.Post("/sessions/" + id + "/undo", "", "application/json")->status == 409);
  CHECK(cli.Get("/sessions/zz")->status == 404);
  CHECK(cli.Post("/sessions", "{oops", "application/json")->status == 400);
  CHECK(cli.Post("/sessions", "[1]", "application/json")->status == 400);
  CHECK(cli.Post("/sessions", R"J({"problem_id":"none"})J", "application/json")->status == 404);
  CHECK(cli.Post("/sessions/" + id + "/steps", R"J({"theorem":"bogus"})J", "application/json")->status == 422);
  auto search = cli.Post("/sessions/" + id + "/search", R"J({"budget":20})J", "application/json");
  REQUIRE(search);
  CHECK(search->status == 200);
  CHECK(json::parse(search->body).at("outcome") == "solved");

  server.stop();
  th.join();
}

TEST_CASE("snapshots are side-effect free and match an offline replay") {
  SessionStore store(bundled(), kProblems);
  const std::string id = store.create({{"problem_id", "p23"}}).at("session_id");
  const auto record = load_problem(kProblems + "/p23.json");
  CHECK(store.snapshot(id) == store.snapshot(id));
  std::vector<std::string> applied;
  for (const auto& t : record.theorem_seqs) {
    store.apply_step(id, {{"theorem", t}});
    applied.push_back(t);
    Problem offline = replay_theorem_seqs(bundled(), record, applied);
    CHECK(store.hypertree(id) == offline.export_hypertree());
  }
  store.undo(id);
  applied.pop_back();
  CHECK(store.hypertree(id) == replay_theorem_seqs(bundled(), record, applied).export_hypertree());
}
