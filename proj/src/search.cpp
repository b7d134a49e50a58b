#include "geoform/search.hpp"

#include <algorithm>
#include <cctype>
#include <climits>
#include <memory>
#include <numeric>
#include <set>
#include <stdexcept>

namespace geoform {

const char* method_name(Method m) { return m == Method::Forward ? "fw" : "bw"; }

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::BFS: return "bfs";
    case Strategy::DFS: return "dfs";
    case Strategy::RS: return "rs";
    case Strategy::BS: return "bs";
  }
  return "?";
}

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Solved: return "solved";
    case Outcome::Unsolved: return "unsolved";
    case Outcome::Timeout: return "timeout";
  }
  return "?";
}

namespace {

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

Method parse_method(const std::string& text) {
  std::string t = lower(text);
  if (t == "fw" || t == "forward") return Method::Forward;
  if (t == "bw" || t == "backward") return Method::Backward;
  throw std::invalid_argument("unknown search method '" + text + "'");
}

Strategy parse_strategy(const std::string& text) {
  std::string t = lower(text);
  if (t == "bfs") return Strategy::BFS;
  if (t == "dfs") return Strategy::DFS;
  if (t == "rs") return Strategy::RS;
  if (t == "bs") return Strategy::BS;
  throw std::invalid_argument("unknown search strategy '" + text + "'");
}

// ---------------------------------------------------------------------------
// Frontier

Frontier::Frontier(Strategy strategy, std::size_t beam_size, std::uint64_t seed, bool defer)
    : strategy_(strategy), beam_(std::max<std::size_t>(beam_size, 1)), defer_(defer), rng_(seed) {}

void Frontier::push(std::size_t node, int depth) {
  if (strategy_ == Strategy::BS) {
    pending_[depth].push_back(node);
  } else {
    queue_.push_back(node);
  }
}

void Frontier::open_generation() {
  std::vector<std::size_t> gen;
  if (!pending_.empty()) {
    gen = std::move(pending_.begin()->second);
    pending_.erase(pending_.begin());
  } else if (defer_ && !deferred_.empty()) {
    gen = std::move(deferred_);
    deferred_.clear();
  } else {
    return;
  }
  if (gen.size() > beam_) {
    std::vector<std::size_t> idx(gen.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < beam_; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng_() % (idx.size() - i));
      std::swap(idx[i], idx[j]);
    }
    std::vector<bool> keep(gen.size(), false);
    for (std::size_t i = 0; i < beam_; ++i) keep[idx[i]] = true;
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < gen.size(); ++i) {
      if (keep[i]) {
        kept.push_back(gen[i]);
      } else if (defer_) {
        deferred_.push_back(gen[i]);
      } else {
        ++dropped_;
      }
    }
    gen = std::move(kept);
  }
  queue_.assign(gen.begin(), gen.end());
}

std::optional<std::size_t> Frontier::pop() {
  if (strategy_ == Strategy::BS && queue_.empty()) open_generation();
  if (queue_.empty()) return std::nullopt;
  std::size_t out;
  switch (strategy_) {
    case Strategy::DFS:
      out = queue_.back();
      queue_.pop_back();
      break;
    case Strategy::RS: {
      std::size_t i = static_cast<std::size_t>(rng_() % queue_.size());
      out = queue_[i];
      queue_.erase(queue_.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
    default:
      out = queue_.front();
      queue_.pop_front();
  }
  return out;
}

bool Frontier::empty() const {
  return queue_.empty() && pending_.empty() && (!defer_ || deferred_.empty());
}

// ---------------------------------------------------------------------------
// Interactive use

ApplyReport interactive_apply(Problem& problem, const std::string& theorem,
                              const std::optional<std::vector<std::string>>& binding,
                              const std::optional<Clock::time_point>& deadline) {
  TheoremCall call = parse_theorem_call(theorem);
  if (binding) call.groups = *binding;
  return problem.apply(call, deadline);
}

Problem replay_theorem_seqs(const KnowledgeBase& kb, const ProblemRecord& record,
                            const std::vector<std::string>& seqs,
                            const std::optional<Clock::time_point>& deadline) {
  Problem p(kb, record);
  for (const auto& label : seqs) interactive_apply(p, label, std::nullopt, deadline);
  p.check_goal(deadline);
  return p;
}

bool replay_solves(const KnowledgeBase& kb, const ProblemRecord& record, const std::vector<std::string>& seqs) {
  try {
    return replay_theorem_seqs(kb, record, seqs).goal().status == GoalStatus::Solved;
  } catch (const std::exception&) {
    return false;
  }
}

SearchResult run_search(const Problem& problem, const SearchConfig& config) {
  return config.method == Method::Forward ? forward_search(problem, config) : backward_search(problem, config);
}

// ---------------------------------------------------------------------------
// Forward search

namespace {

struct ForwardNode {
  std::size_t parent = 0;
  int depth = 0;
  TheoremCall call;
  NodeState state = NodeState::Expandable;
  std::shared_ptr<const Problem> store;
  std::size_t open_children = 0;
};

std::vector<std::string> forward_path(const std::vector<ForwardNode>& nodes, std::size_t leaf) {
  std::vector<std::string> seq;
  for (std::size_t i = leaf; i != 0; i = nodes[i].parent) seq.push_back(nodes[i].call.text());
  std::reverse(seq.begin(), seq.end());
  return seq;
}

}  // namespace

SearchResult forward_search(const Problem& problem, const SearchConfig& config) {
  const auto start = Clock::now();
  const auto deadline = start + std::chrono::duration_cast<Clock::duration>(
                                    std::chrono::duration<double>(config.timeout_seconds));
  SearchResult result;
  auto finish = [&](Outcome o) {
    result.outcome = o;
    result.elapsed_seconds = seconds_since(start);
    return result;
  };
  if (problem.goal().status == GoalStatus::Solved) return finish(Outcome::Solved);

  std::vector<ForwardNode> nodes(1);
  nodes[0].state = NodeState::Expanded;
  nodes[0].store = std::make_shared<Problem>(problem);
  std::set<std::uint64_t> seen{problem.signature()};
  Frontier frontier(config.strategy, static_cast<std::size_t>(config.beam_size), config.seed);

  auto expand = [&](std::size_t id) {
    if (nodes[id].depth + 1 > config.max_depth) return;
    std::vector<TheoremCall> calls = nodes[id].store->applicable();
    for (const auto& call : calls) {
      ForwardNode child;
      child.parent = id;
      child.depth = nodes[id].depth + 1;
      child.call = call;
      nodes.push_back(std::move(child));
      frontier.push(nodes.size() - 1, nodes.back().depth);
    }
    nodes[id].open_children = calls.size();
  };
  auto release_parent = [&](std::size_t id) {
    auto& parent = nodes[nodes[id].parent];
    if (parent.open_children > 0 && --parent.open_children == 0 && nodes[id].parent != 0) parent.store.reset();
  };
  expand(0);

  while (true) {
    if (Clock::now() > deadline) return finish(Outcome::Timeout);
    auto next = frontier.pop();
    if (!next) return finish(Outcome::Unsolved);
    const std::size_t id = *next;
    ++result.steps;
    auto store = std::make_shared<Problem>(*nodes[nodes[id].parent].store);
    release_parent(id);
    ApplyReport report;
    try {
      report = store->apply(nodes[id].call, deadline);
    } catch (const ProblemError&) {
      nodes[id].state = NodeState::Failed;
      continue;
    }
    if (report.goal_solved) {
      nodes[id].state = NodeState::Solved;
      result.theorem_seqs = forward_path(nodes, id);
      return finish(Outcome::Solved);
    }
    if (Clock::now() > deadline) return finish(Outcome::Timeout);
    if (report.added.empty() || !seen.insert(store->signature()).second) {
      nodes[id].state = NodeState::Failed;
      continue;
    }
    nodes[id].state = NodeState::Expanded;
    nodes[id].store = std::move(store);
    expand(id);
    if (nodes[id].open_children == 0) nodes[id].store.reset();
  }
}

// ---------------------------------------------------------------------------
// Backward search

namespace {

enum class GoalType { Relation, Value, Zero };

struct GoalNode {
  GoalType type = GoalType::Relation;
  std::string predicate;
  std::string item;
  Poly expr;
  std::string key;
  std::size_t parent = 0;  // super node
  NodeState state = NodeState::Expandable;
  std::vector<std::size_t> supers;
  std::set<std::string> explored;   // frontier symbols already unified
  std::set<std::string> instances;  // theorem calls already generated
  bool expanded = false;
};

struct SuperNode {
  std::optional<TheoremCall> call;  // empty for the root
  std::size_t parent = 0;           // goal node
  std::vector<std::size_t> goals;
  const TheoremDef* theorem = nullptr;
  std::map<char, char> binding;
  int depth = 0;
  NodeState state = NodeState::Expandable;
  bool applied = false;
};

Expr bind_expr(const Expr& e, const std::map<char, char>& binding) {
  Expr out = e;
  for (auto& g : out.groups) g = instantiate(g, binding);
  for (auto& a : out.args) a = bind_expr(a, binding);
  return out;
}

bool extend_binding(std::map<char, char>& b, const std::string& vars, const std::string& points) {
  if (vars.size() != points.size()) return false;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    auto [it, fresh] = b.emplace(vars[i], points[i]);
    if (it->second != points[i]) return false;
  }
  return true;
}

bool injective(const std::map<char, char>& b) {
  std::set<char> seen;
  for (const auto& kv : b) {
    if (!seen.insert(kv.second).second) return false;
  }
  return true;
}

bool structural(const KnowledgeBase& kb, const std::string& predicate) {
  const PredicateDef* d = kb.predicate(predicate);
  return d && (d->kind == PredicateKind::Structure || d->kind == PredicateKind::BasicEntity);
}

// Conclusions of a theorem together with everything their extend rules
// add, renamed into the theorem's variables.
std::vector<Fact> implied_facts(const KnowledgeBase& kb, const std::vector<Fact>& facts, int depth = 3) {
  std::vector<Fact> out = facts;
  if (depth == 0) return out;
  for (const auto& f : facts) {
    if (f.equation) continue;
    const PredicateDef* def = kb.predicate(f.atom.predicate);
    if (!def || def->extend.empty()) continue;
    std::map<char, char> rename;
    const std::string params = def->vars();
    const std::string vars = f.atom.vars();
    for (std::size_t i = 0; i < params.size() && i < vars.size(); ++i) rename[params[i]] = vars[i];
    std::vector<Fact> renamed;
    for (Fact e : def->extend) {
      if (e.equation) {
        e.lhs = bind_expr(e.lhs, rename);
        e.rhs = bind_expr(e.rhs, rename);
      } else {
        for (auto& g : e.atom.groups) g = instantiate(g, rename);
      }
      renamed.push_back(std::move(e));
    }
    for (auto& e : implied_facts(kb, renamed, depth - 1)) out.push_back(std::move(e));
  }
  return out;
}

class BackwardSearch {
 public:
  BackwardSearch(const Problem& problem, const SearchConfig& config)
      : store_(problem),
        kb_(problem.kb()),
        config_(config),
        start_(Clock::now()),
        deadline_(start_ + std::chrono::duration_cast<Clock::duration>(
                               std::chrono::duration<double>(config.timeout_seconds))),
        frontier_(config.strategy, static_cast<std::size_t>(config.beam_size), config.seed, true) {}

  SearchResult run() {
    if (store_.goal().status == GoalStatus::Solved) return finish(Outcome::Solved);
    supers_.push_back(SuperNode{});
    goals_.push_back(root_goal());
    supers_[0].goals.push_back(0);
    frontier_.push(0, 0);

    while (true) {
      if (Clock::now() > deadline_) return finish(Outcome::Timeout);
      if (store_.goal().status == GoalStatus::Solved) return finish(Outcome::Solved);
      if (goals_[0].state == NodeState::Failed) return finish(Outcome::Unsolved);
      auto next = frontier_.pop();
      if (!next) return finish(Outcome::Unsolved);
      const std::size_t s = *next;
      if (!live(s)) continue;
      ++result_.steps;
      expand_super(s);
      update();
    }
  }

 private:
  Problem store_;
  const KnowledgeBase& kb_;
  SearchConfig config_;
  Clock::time_point start_;
  Clock::time_point deadline_;
  Frontier frontier_;
  std::vector<GoalNode> goals_;
  std::vector<SuperNode> supers_;
  std::set<std::string> expanded_keys_;
  std::set<std::string> applied_;
  std::map<std::string, std::vector<Fact>> implied_;
  SearchResult result_;

  const std::vector<Fact>& implied(const TheoremDef& thm) {
    auto it = implied_.find(thm.name);
    if (it == implied_.end()) it = implied_.emplace(thm.name, implied_facts(kb_, thm.conclusions)).first;
    return it->second;
  }

  SearchResult finish(Outcome o) {
    result_.outcome = o;
    result_.elapsed_seconds = seconds_since(start_);
    return result_;
  }

  GoalNode root_goal() const {
    const Goal& g = store_.goal();
    GoalNode n;
    if (g.kind == GoalKind::Relation) {
      n.type = GoalType::Relation;
      n.predicate = g.relation.predicate;
      for (const auto& grp : g.relation.groups) n.item += grp;
    } else {
      n.type = g.kind == GoalKind::Value ? GoalType::Value : GoalType::Zero;
      n.expr = g.expr;
    }
    n.key = key_of(n);
    return n;
  }

  std::string key_of(const GoalNode& n) const {
    if (n.type == GoalType::Relation) {
      return n.predicate + "(" + canonical_item(*kb_.predicate(n.predicate), n.item) + ")";
    }
    return std::string(n.type == GoalType::Value ? "Value(" : "Zero(") + n.expr.monic().to_string() + ")";
  }

  bool check(const GoalNode& g) {
    switch (g.type) {
      case GoalType::Relation: return store_.has(g.predicate, g.item);
      case GoalType::Value: return store_.algebra().solve_target(g.expr, deadline_).value.has_value();
      case GoalType::Zero: return store_.algebra().evaluate_constraint(g.expr, nullptr, deadline_);
    }
    return false;
  }

  // A super node is worth expanding while it and its ancestors are open.
  bool live(std::size_t s) const {
    while (true) {
      const SuperNode& sn = supers_[s];
      if (sn.state != NodeState::Expandable && sn.state != NodeState::Expanded) return false;
      if (s == 0) return true;
      const GoalNode& g = goals_[sn.parent];
      if (g.state == NodeState::Solved || g.state == NodeState::Failed) return false;
      s = g.parent;
    }
  }

  void expand_super(std::size_t s) {
    supers_[s].state = NodeState::Expanded;
    if (s != 0 && supers_[s].goals.empty()) {
      apply(s);
      return;
    }
    const std::vector<std::size_t> children = supers_[s].goals;
    for (std::size_t gi : children) {
      if (goals_[gi].state == NodeState::Solved) continue;
      if (check(goals_[gi])) {
        goals_[gi].state = NodeState::Solved;
        continue;
      }
      if (!expanded_keys_.insert(goals_[gi].key).second) continue;  // expanded elsewhere
      goals_[gi].expanded = true;
      generate(gi);
      if (goals_[gi].supers.empty()) fail_goal(gi);
    }
  }

  void fail_goal(std::size_t gi) {
    goals_[gi].state = NodeState::Failed;
    if (gi == 0) return;
    std::size_t s = goals_[gi].parent;
    if (supers_[s].state == NodeState::Failed) return;
    supers_[s].state = NodeState::Failed;
    if (s == 0) return;
    std::size_t parent = supers_[s].parent;
    const auto& siblings = goals_[parent].supers;
    bool all_failed = std::all_of(siblings.begin(), siblings.end(),
                                  [&](std::size_t x) { return supers_[x].state == NodeState::Failed; });
    if (all_failed && goals_[parent].type == GoalType::Relation && goals_[parent].state != NodeState::Solved) {
      fail_goal(parent);
    }
  }

  // Bindings of branch that extend seed, with structural atoms (and atoms
  // whose variables the seed leaves open) taken from the store.
  std::vector<std::map<char, char>> complete(const TheoremBranch& branch, const std::map<char, char>& seed) {
    Relation r;
    std::string tuple;
    for (const auto& [v, p] : seed) {
      r.vars += v;
      tuple += p;
    }
    r.rows[tuple] = {};
    auto bound = [&](const std::string& vars) {
      return std::all_of(vars.begin(), vars.end(), [&](char c) { return r.vars.find(c) != std::string::npos; });
    };
    for (int pass = 0; pass < 2 && !r.empty(); ++pass) {
      for (const auto& a : branch.atoms) {
        if (a.kind != BranchAtom::Kind::Rel) continue;
        bool is_structural = structural(kb_, a.atom.predicate);
        if (pass == 0 ? !is_structural : (is_structural || bound(a.atom.vars()))) continue;
        Relation known = join(r, atom_relation(a.atom.vars(), store_.extension(a.atom.predicate, a.atom.vars().size())));
        r = pass == 1 && known.empty() ? join(r, candidates(a.atom)) : std::move(known);
        if (r.empty()) break;
      }
    }
    std::vector<std::map<char, char>> out;
    for (const auto& row : r.rows) out.push_back(r.binding(row.first));
    return out;
  }

  // Instances of a non-structural atom worth proposing as a sub-goal when
  // no known fact fits: every tuple that passes the predicate's ee_check.
  Relation candidates(const RelAtom& atom) {
    const std::string vars = atom.vars();
    Relation out;
    out.vars = vars;
    const PredicateDef* def = kb_.predicate(atom.predicate);
    if (!def || def->ee_check.empty()) return out;
    std::map<char, char> rename;
    const std::string params = def->vars();
    for (std::size_t i = 0; i < params.size() && i < vars.size(); ++i) rename[params[i]] = vars[i];
    Relation ee = unit_relation();
    for (const auto& c : def->ee_check) {
      std::string cv = instantiate(c.vars(), rename);
      ee = join(ee, atom_relation(cv, store_.extension(c.predicate, cv.size())));
      if (ee.empty()) return out;
    }
    for (const auto& row : ee.rows) {
      std::map<char, char> b = ee.binding(row.first);
      if (b.size() < std::set<char>(vars.begin(), vars.end()).size() || !injective(b)) continue;
      out.rows.emplace(instantiate(vars, b), Support{});
    }
    return out;
  }

  bool conclusions_known(const TheoremDef& thm, const std::map<char, char>& b) {
    for (const auto& f : thm.conclusions) {
      if (f.equation) {
        try {
          Poly p = store_.expr_poly(bind_expr(f.lhs, b)) - store_.expr_poly(bind_expr(f.rhs, b));
          if (!p.is_zero() && !store_.algebra().equations().contains(p)) return false;
        } catch (const ProblemError&) {
          return true;  // not expressible here, so it adds nothing
        }
      } else if (!store_.has(f.atom.predicate, instantiate(f.atom.vars(), b))) {
        return false;
      }
    }
    return true;
  }

  void add_instance(std::size_t gi, const TheoremDef& thm, std::size_t branch, const std::map<char, char>& b) {
    TheoremCall call;
    call.name = thm.name;
    if (thm.branches.size() > 1) call.branch = static_cast<int>(branch + 1);
    std::map<char, char> header;
    for (const auto& g : thm.var_pattern) {
      call.groups.push_back(instantiate(g, b));
      if (!extend_binding(header, g, call.groups.back())) return;
    }
    if (!injective(header)) return;
    if (!goals_[gi].instances.insert(call.text()).second) return;
    if (conclusions_known(thm, b)) return;

    SuperNode sn;
    sn.call = call;
    sn.theorem = &thm;
    sn.binding = b;
    sn.parent = gi;
    sn.depth = supers_[goals_[gi].parent].depth + 1;
    std::vector<GoalNode> subgoals;
    for (const auto& a : thm.branches[branch].atoms) {
      if (a.kind == BranchAtom::Kind::NotRel) {
        if (store_.has(a.atom.predicate, instantiate(a.atom.vars(), b))) return;
        continue;
      }
      GoalNode g;
      if (a.kind == BranchAtom::Kind::Rel) {
        if (structural(kb_, a.atom.predicate)) continue;
        g.type = GoalType::Relation;
        g.predicate = a.atom.predicate;
        g.item = instantiate(a.atom.vars(), b);
        if (store_.has(g.predicate, g.item)) continue;
      } else {
        try {
          g.expr = store_.expr_poly(bind_expr(a.lhs, b)) - store_.expr_poly(bind_expr(a.rhs, b));
        } catch (const ProblemError&) {
          return;
        }
        g.type = GoalType::Zero;
        if (g.expr.is_constant()) {
          if (g.expr.is_zero()) continue;
          return;
        }
        if (store_.algebra().evaluate_constraint(g.expr, nullptr, deadline_)) continue;
      }
      g.key = key_of(g);
      subgoals.push_back(std::move(g));
    }
    const std::size_t si = supers_.size();
    supers_.push_back(sn);
    goals_[gi].supers.push_back(si);
    for (auto& g : subgoals) {
      g.parent = si;
      goals_.push_back(std::move(g));
      supers_[si].goals.push_back(goals_.size() - 1);
    }
    if (sn.depth <= config_.max_depth) {
      frontier_.push(si, sn.depth);
    } else {
      supers_[si].state = NodeState::Failed;
    }
  }

  void generate(std::size_t gi) {
    const GoalType type = goals_[gi].type;
    std::set<std::string> fresh;
    if (type != GoalType::Relation) {
      for (const auto& s : store_.algebra().dependency_symbols(goals_[gi].expr)) {
        if (!goals_[gi].explored.count(s)) fresh.insert(s);
      }
      goals_[gi].explored.insert(fresh.begin(), fresh.end());
      if (fresh.empty()) return;
    }
    for (const auto& thm : kb_.theorems()) {
      for (std::size_t b = 0; b < thm.branches.size(); ++b) {
        std::vector<std::map<char, char>> seeds;
        for (const auto& f : implied(thm)) {
          if (type == GoalType::Relation) {
            if (f.equation || f.atom.predicate != goals_[gi].predicate) continue;
            const PredicateDef* def = kb_.predicate(goals_[gi].predicate);
            for (const auto& rep : multi_items(*def, goals_[gi].item)) {
              std::map<char, char> seed;
              if (extend_binding(seed, f.atom.vars(), rep)) seeds.push_back(seed);
            }
            continue;
          }
          if (!f.equation) continue;
          auto visit = [&](const Expr& a) {
            for (const auto& sym : fresh) {
              auto decoded = store_.symbols().decode(sym);
              if (!decoded || decoded->first->name != a.name) continue;
              for (const auto& rep : multi_items(*decoded->first, decoded->second)) {
                std::map<char, char> seed;
                if (extend_binding(seed, a.points(), rep)) seeds.push_back(seed);
              }
            }
          };
          for_each_attr(f.lhs, visit);
          for_each_attr(f.rhs, visit);
        }
        for (const auto& seed : seeds) {
          for (const auto& binding : complete(thm.branches[b], seed)) {
            add_instance(gi, thm, b, binding);
            if (Clock::now() > deadline_) return;
          }
        }
      }
    }
  }

  void apply(std::size_t si) {
    SuperNode& sn = supers_[si];
    if (sn.applied || !sn.call) return;
    sn.applied = true;
    sn.state = NodeState::Solved;
    if (!applied_.insert(sn.call->text()).second || conclusions_known(*sn.theorem, sn.binding)) return;
    try {
      store_.apply(*sn.call, deadline_);
      result_.theorem_seqs.push_back(sn.call->text());
    } catch (const ProblemError&) {
      sn.state = NodeState::Failed;
    }
  }

  // Propagates store changes: re-checks open goals, applies super nodes
  // whose sub-goals all hold, and widens algebraic goals whose dependency
  // frontier grew.
  void update() {
    bool changed = true;
    while (changed && Clock::now() <= deadline_) {
      changed = false;
      const std::size_t before = result_.theorem_seqs.size();
      for (std::size_t gi = 0; gi < goals_.size(); ++gi) {
        GoalNode& g = goals_[gi];
        if (g.state == NodeState::Solved || g.state == NodeState::Failed) continue;
        if (!live_goal(gi)) continue;
        if (check(g)) {
          g.state = NodeState::Solved;
          changed = true;
        } else if (g.expanded && g.type != GoalType::Relation) {
          std::size_t n = g.supers.size();
          generate(gi);
          if (goals_[gi].supers.size() != n) changed = true;
        }
      }
      for (std::size_t si = 1; si < supers_.size(); ++si) {
        SuperNode& sn = supers_[si];
        if (sn.applied || sn.state == NodeState::Failed || sn.goals.empty()) continue;
        bool ready = std::all_of(sn.goals.begin(), sn.goals.end(),
                                 [&](std::size_t g) { return goals_[g].state == NodeState::Solved; });
        if (ready && goals_[sn.parent].state != NodeState::Solved) apply(si);
      }
      if (result_.theorem_seqs.size() != before) {
        changed = true;
        store_.check_goal(deadline_);
        if (store_.goal().status == GoalStatus::Solved) return;
      }
    }
  }

  bool live_goal(std::size_t gi) const {
    if (gi == 0) return true;
    return live(goals_[gi].parent);
  }
};

}  // namespace

SearchResult backward_search(const Problem& problem, const SearchConfig& config) {
  return BackwardSearch(problem, config).run();
}

}  // namespace geoform
