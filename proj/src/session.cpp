#include "geoform/session.hpp"

#include <httplib.h>

#include <chrono>
#include <iostream>

namespace geoform {

using nlohmann::json;

namespace {

json theorem_list(const Problem& p) {
  json out = json::array();
  for (const auto& c : p.applicable()) out.push_back(c.text());
  return out;
}

// Nodes and edges of doc whose ids start at first.
json hypertree_delta(const json& doc, int first) {
  json nodes = json::array();
  for (const auto& n : doc.at("nodes")) {
    if (n.at("id").get<int>() >= first) nodes.push_back(n);
  }
  json edges = json::array();
  for (const auto& e : doc.at("edges")) {
    const auto& c = e.at("conclusions");
    if (!c.empty() && c.front().get<int>() >= first) edges.push_back(e);
  }
  return {{"nodes", nodes}, {"edges", edges}};
}

}  // namespace

SessionStore::SessionStore(const KnowledgeBase& kb, std::filesystem::path problem_dir)
    : kb_(kb), problem_dir_(std::move(problem_dir)) {}

std::shared_ptr<Session> SessionStore::find(const std::string& id) const {
  std::lock_guard lock(registry_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw SessionError(404, "unknown session " + id);
  return it->second;
}

std::size_t SessionStore::size() const {
  std::lock_guard lock(registry_mutex_);
  return sessions_.size();
}

json SessionStore::snapshot_locked(const Session& s) const {
  json doc;
  doc["session_id"] = s.id;
  doc["problem_id"] = s.problem.record().problem_id;
  doc["hypertree"] = s.problem.export_hypertree();
  doc["goal"] = doc["hypertree"]["goal"];
  doc["log"] = s.log;
  doc["applicable"] = theorem_list(s.problem);
  return doc;
}

json SessionStore::create(const json& body) {
  ProblemRecord record;
  try {
    if (body.contains("problem")) {
      record = problem_from_json(body.at("problem"));
    } else if (body.contains("problem_id") && body.at("problem_id").is_string()) {
      const std::string pid = body.at("problem_id");
      if (problem_dir_.empty() || pid.find_first_of("/\\") != std::string::npos) {
        throw SessionError(404, "unknown problem " + pid);
      }
      const auto path = problem_dir_ / (pid + ".json");
      if (!std::filesystem::exists(path)) throw SessionError(404, "unknown problem " + pid);
      record = load_problem(path);
    } else {
      throw SessionError(422, "body needs problem or problem_id");
    }
  } catch (const SessionError&) {
    throw;
  } catch (const std::exception& e) {
    throw SessionError(422, e.what());
  }

  std::shared_ptr<Session> s;
  try {
    Problem p(kb_, record);
    std::lock_guard lock(registry_mutex_);
    const std::string id = "s" + std::to_string(next_id_++);
    s = std::make_shared<Session>(id, std::move(p));
    sessions_.emplace(id, s);
  } catch (const std::exception& e) {
    throw SessionError(422, e.what());
  }
  std::shared_lock read(s->mutex);
  return snapshot_locked(*s);
}

json SessionStore::snapshot(const std::string& id) const {
  auto s = find(id);
  std::shared_lock read(s->mutex);
  return snapshot_locked(*s);
}

json SessionStore::hypertree(const std::string& id) const {
  auto s = find(id);
  std::shared_lock read(s->mutex);
  return s->problem.export_hypertree();
}

json SessionStore::theorems(const std::string& id) const {
  auto s = find(id);
  std::shared_lock read(s->mutex);
  return {{"session_id", s->id}, {"applicable", theorem_list(s->problem)}};
}

json SessionStore::apply_step(const std::string& id, const json& body) {
  auto s = find(id);
  std::unique_lock write(s->mutex, std::try_to_lock);
  if (!write.owns_lock()) throw SessionError(409, "session " + id + " is busy");

  if (!body.contains("theorem") || !body.at("theorem").is_string()) throw SessionError(422, "missing theorem");
  std::optional<std::vector<std::string>> binding;
  if (body.contains("binding") && !body.at("binding").is_null()) {
    try {
      binding = body.at("binding").get<std::vector<std::string>>();
    } catch (const json::exception&) {
      throw SessionError(422, "binding must be a list of point groups");
    }
  }
  const std::string theorem = body.at("theorem");
  const std::size_t before = s->problem.size();
  Problem backup = s->problem;
  ApplyReport report;
  try {
    report = interactive_apply(s->problem, theorem, binding);
  } catch (const std::exception& e) {
    s->problem = std::move(backup);
    throw SessionError(422, e.what());
  }
  TheoremCall call = parse_theorem_call(theorem);
  if (binding) call.groups = *binding;
  s->checkpoints.push_back(before);
  s->log.push_back(call.text());

  const json doc = s->problem.export_hypertree();
  json out;
  out["session_id"] = s->id;
  out["theorem"] = call.text();
  out["added"] = report.added;
  out["bindings"] = report.bindings;
  out["goal"] = doc.at("goal");
  out["delta"] = hypertree_delta(doc, static_cast<int>(before));
  return out;
}

json SessionStore::undo(const std::string& id) {
  auto s = find(id);
  std::unique_lock write(s->mutex, std::try_to_lock);
  if (!write.owns_lock()) throw SessionError(409, "session " + id + " is busy");
  if (s->checkpoints.empty()) throw SessionError(409, "nothing to undo");
  s->problem.truncate(s->checkpoints.back());
  s->checkpoints.pop_back();
  s->log.pop_back();
  return snapshot_locked(*s);
}

json SessionStore::search(const std::string& id, const json& body) const {
  auto s = find(id);
  std::optional<Problem> copy;
  {
    std::shared_lock read(s->mutex);
    copy.emplace(s->problem);
  }
  SearchConfig config;
  config.timeout_seconds = 10.0;
  try {
    if (body.contains("method")) config.method = parse_method(body.at("method").get<std::string>());
    if (body.contains("strategy")) config.strategy = parse_strategy(body.at("strategy").get<std::string>());
    if (body.contains("budget")) config.timeout_seconds = body.at("budget").get<double>();
    if (body.contains("max_depth")) config.max_depth = body.at("max_depth").get<int>();
    if (body.contains("beam_size")) config.beam_size = body.at("beam_size").get<int>();
    if (body.contains("seed")) config.seed = body.at("seed").get<std::uint64_t>();
  } catch (const std::exception& e) {
    throw SessionError(422, e.what());
  }
  if (config.timeout_seconds <= 0 || config.max_depth < 1 || config.beam_size < 1) {
    throw SessionError(422, "budget, max_depth and beam_size must be positive");
  }
  SearchResult r = run_search(*copy, config);
  return {{"session_id", s->id},
          {"method", method_name(config.method)},
          {"strategy", strategy_name(config.strategy)},
          {"outcome", outcome_name(r.outcome)},
          {"theorem_seqs", r.theorem_seqs},
          {"elapsed_seconds", r.elapsed_seconds},
          {"steps", r.steps}};
}

json SessionStore::problems() const {
  json out = json::array();
  if (problem_dir_.empty() || !std::filesystem::is_directory(problem_dir_)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(problem_dir_)) {
    if (entry.path().extension() != ".json") continue;
    try {
      ProblemRecord r = load_problem(entry.path());
      out.push_back({{"problem_id", entry.path().stem().string()},
                     {"description", r.description},
                     {"goal_cdl", r.goal_cdl},
                     {"steps", r.theorem_seqs.size()}});
    } catch (const std::exception&) {
    }
  }
  std::sort(out.begin(), out.end(), [](const json& a, const json& b) { return a["problem_id"] < b["problem_id"]; });
  return out;
}

// ---------------------------------------------------------------------------
// HTTP

void register_routes(httplib::Server& server, SessionStore& store) {
  auto reply = [](httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  };
  // Runs f, mapping failures onto status codes.
  auto guard = [reply](httplib::Response& res, int ok, auto&& f) {
    try {
      reply(res, ok, f());
    } catch (const SessionError& e) {
      reply(res, e.status(), {{"error", e.what()}});
    } catch (const json::exception& e) {
      reply(res, 400, {{"error", e.what()}});
    } catch (const std::exception& e) {
      reply(res, 500, {{"error", e.what()}});
    }
  };
  auto body_of = [](const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    json j = json::parse(req.body);
    if (!j.is_object()) throw SessionError(400, "body must be a JSON object");
    return j;
  };

  server.Get("/problems", [&store, guard](const httplib::Request&, httplib::Response& res) {
    guard(res, 200, [&] { return store.problems(); });
  });
  server.Post("/sessions", [&store, guard, body_of](const httplib::Request& req, httplib::Response& res) {
    guard(res, 201, [&] { return store.create(body_of(req)); });
  });
  server.Get(R"(/sessions/([^/]+))", [&store, guard](const httplib::Request& req, httplib::Response& res) {
    guard(res, 200, [&] { return store.snapshot(req.matches[1]); });
  });
  server.Post(R"(/sessions/([^/]+)/steps)",
              [&store, guard, body_of](const httplib::Request& req, httplib::Response& res) {
                guard(res, 200, [&] { return store.apply_step(req.matches[1], body_of(req)); });
              });
  server.Post(R"(/sessions/([^/]+)/undo)", [&store, guard](const httplib::Request& req, httplib::Response& res) {
    guard(res, 200, [&] { return store.undo(req.matches[1]); });
  });
  server.Get(R"(/sessions/([^/]+)/hypertree)", [&store, guard](const httplib::Request& req, httplib::Response& res) {
    guard(res, 200, [&] { return store.hypertree(req.matches[1]); });
  });
  server.Get(R"(/sessions/([^/]+)/theorems)", [&store, guard](const httplib::Request& req, httplib::Response& res) {
    guard(res, 200, [&] { return store.theorems(req.matches[1]); });
  });
  server.Post(R"(/sessions/([^/]+)/search)",
              [&store, guard, body_of](const httplib::Request& req, httplib::Response& res) {
                guard(res, 200, [&] { return store.search(req.matches[1], body_of(req)); });
              });
}

int serve(const ServeOptions& options) {
  KnowledgeBase kb = load_kb(options.kb_dir);
  SessionStore store(kb, options.problem_dir);
  httplib::Server server;
  register_routes(server, store);
  std::cerr << "listening on " << options.host << ':' << options.port << '\n';
  return server.listen(options.host, options.port) ? 0 : 1;
}

}  // namespace geoform
