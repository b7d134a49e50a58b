#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "geoform/search.hpp"

namespace httplib {
class Server;
}

namespace geoform {

/// Failure carrying the HTTP status it maps to.
class SessionError : public std::runtime_error {
 public:
  SessionError(int status, const std::string& message) : std::runtime_error(message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

/// One interactive proof attempt: a problem, the theorems applied to it and
/// the store length before each of them.
struct Session {
  std::string id;
  Problem problem;
  std::vector<std::string> log;
  std::vector<std::size_t> checkpoints;
  std::shared_mutex mutex;

  Session(std::string session_id, Problem p) : id(std::move(session_id)), problem(std::move(p)) {}
};

/// In-memory session registry. Mutations on one session are exclusive: a
/// mutation that finds the session busy fails with 409 instead of waiting.
class SessionStore {
 public:
  /// problem_dir resolves {"problem_id": ...} requests; may be empty.
  SessionStore(const KnowledgeBase& kb, std::filesystem::path problem_dir = {});

  /// Body: {"problem": record} or {"problem_id": id}. Returns the snapshot.
  nlohmann::json create(const nlohmann::json& body);
  nlohmann::json snapshot(const std::string& id) const;
  nlohmann::json hypertree(const std::string& id) const;
  nlohmann::json theorems(const std::string& id) const;
  /// Body: {"theorem": label, "binding": [groups]?}.
  nlohmann::json apply_step(const std::string& id, const nlohmann::json& body);
  nlohmann::json undo(const std::string& id);
  /// Body: {"method", "strategy", "budget", "max_depth", "beam_size",
  /// "seed"}, all optional. Runs on a copy; the session is unchanged.
  nlohmann::json search(const std::string& id, const nlohmann::json& body) const;
  /// Bundled problems available for {"problem_id": ...}.
  nlohmann::json problems() const;

  std::size_t size() const;

 private:
  const KnowledgeBase& kb_;
  std::filesystem::path problem_dir_;
  mutable std::mutex registry_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::size_t next_id_ = 1;

  std::shared_ptr<Session> find(const std::string& id) const;
  nlohmann::json snapshot_locked(const Session& s) const;
};

/// Routes of the HTTP API on top of a store.
void register_routes(httplib::Server& server, SessionStore& store);

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path kb_dir;
  std::filesystem::path problem_dir;
};

/// Blocks serving the API; returns non-zero if the socket cannot be bound.
int serve(const ServeOptions& options);

}  // namespace geoform
