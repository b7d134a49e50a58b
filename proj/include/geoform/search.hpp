#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "geoform/problem.hpp"

namespace geoform {

enum class Method { Forward, Backward };
enum class Strategy { BFS, DFS, RS, BS };
enum class Outcome { Solved, Unsolved, Timeout };
enum class NodeState { Expandable, Expanded, Solved, Failed };

const char* method_name(Method m);
const char* strategy_name(Strategy s);
const char* outcome_name(Outcome o);
/// Accepts fw/forward, bw/backward; throws std::invalid_argument.
Method parse_method(const std::string& text);
/// Accepts bfs/dfs/rs/bs in any case; throws std::invalid_argument.
Strategy parse_strategy(const std::string& text);

struct SearchConfig {
  Method method = Method::Forward;
  Strategy strategy = Strategy::BFS;
  int max_depth = 15;
  int beam_size = 20;
  double timeout_seconds = 30.0;
  std::uint64_t seed = 0;
};

struct SearchResult {
  Outcome outcome = Outcome::Unsolved;
  std::vector<std::string> theorem_seqs;
  double elapsed_seconds = 0.0;
  /// Forward: nodes expanded. Backward: super nodes expanded.
  std::size_t steps = 0;
};

/// Expandable nodes ordered by strategy.
///
/// BFS pops the shallowest node first, DFS the most recently pushed, RS a
/// uniformly random one. BS works generation by generation (a generation is
/// the set of pushed nodes sharing a depth): when a generation is opened,
/// at most beam_size of its nodes are kept, chosen by the rng in push
/// order. Forward search drops the rest; with defer set, the dropped nodes
/// come back as a late generation once everything else is exhausted.
class Frontier {
 public:
  Frontier(Strategy strategy, std::size_t beam_size, std::uint64_t seed, bool defer = false);

  void push(std::size_t node, int depth);
  std::optional<std::size_t> pop();
  bool empty() const;
  std::size_t dropped() const { return dropped_; }

 private:
  Strategy strategy_;
  std::size_t beam_;
  bool defer_;
  std::mt19937_64 rng_;
  std::deque<std::size_t> queue_;                    // BFS, DFS, RS and the open BS generation
  std::map<int, std::vector<std::size_t>> pending_;  // BS generations not opened yet
  std::vector<std::size_t> deferred_;
  std::size_t dropped_ = 0;

  void open_generation();
};

/// Applies one theorem (optionally a branch and an explicit binding) and
/// re-checks the goal.
ApplyReport interactive_apply(Problem& problem, const std::string& theorem,
                              const std::optional<std::vector<std::string>>& binding = std::nullopt,
                              const std::optional<Clock::time_point>& deadline = std::nullopt);

/// Fresh problem with every label of seqs applied in order.
Problem replay_theorem_seqs(const KnowledgeBase& kb, const ProblemRecord& record,
                            const std::vector<std::string>& seqs,
                            const std::optional<Clock::time_point>& deadline = std::nullopt);

/// True when replaying seqs on a fresh problem solves its goal.
bool replay_solves(const KnowledgeBase& kb, const ProblemRecord& record, const std::vector<std::string>& seqs);

SearchResult forward_search(const Problem& problem, const SearchConfig& config);
SearchResult backward_search(const Problem& problem, const SearchConfig& config);
SearchResult run_search(const Problem& problem, const SearchConfig& config);

}  // namespace geoform
