#include "geoform/problem.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <tuple>

#include "geoform/topology.hpp"

namespace geoform {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string flat(const std::vector<std::string>& groups) {
  std::string out;
  for (const auto& g : groups) out += g;
  return out;
}

std::map<char, char> bind_vars(const std::string& vars, const std::string& item) {
  std::map<char, char> b;
  for (std::size_t i = 0; i < vars.size() && i < item.size(); ++i) b[vars[i]] = item[i];
  return b;
}

// Ordered subsequences of run with at least three points, run excluded.
void sub_runs(const std::string& run, std::size_t start, std::string& cur, std::vector<std::string>& out) {
  if (start == run.size()) {
    if (cur.size() >= 3 && cur != run) out.push_back(cur);
    return;
  }
  cur.push_back(run[start]);
  sub_runs(run, start + 1, cur, out);
  cur.pop_back();
  sub_runs(run, start + 1, cur, out);
}

}  // namespace

// ---------------------------------------------------------------------------
// Theorem calls

std::string TheoremCall::text() const {
  std::vector<std::string> args;
  if (branch) args.push_back(std::to_string(*branch));
  args.insert(args.end(), groups.begin(), groups.end());
  if (args.empty()) return name;
  return name + "(" + join(args) + ")";
}

TheoremCall parse_theorem_call(const std::string& raw) {
  std::string text;
  for (char c : raw) {
    if (!std::isspace(static_cast<unsigned char>(c))) text += c;
  }
  TheoremCall call;
  std::size_t open = text.find('(');
  call.name = text.substr(0, open);
  if (call.name.empty()) throw ParseError("empty theorem name in '" + raw + "'", 0, 1);
  for (char c : call.name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') {
      throw ParseError("malformed theorem name in '" + raw + "'", 0, 1);
    }
  }
  if (open == std::string::npos) return call;
  if (text.back() != ')') throw ParseError("expected ')' in '" + raw + "'", 0, static_cast<int>(raw.size()));
  std::string inner = text.substr(open + 1, text.size() - open - 2);
  std::vector<std::string> args;
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = inner.find(',', pos);
    args.push_back(inner.substr(pos, comma - pos));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto& a = args[i];
    if (a.empty()) throw ParseError("empty argument in '" + raw + "'", 0, static_cast<int>(open) + 2);
    bool digits = std::all_of(a.begin(), a.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    bool upper = std::all_of(a.begin(), a.end(), [](char c) { return std::isupper(static_cast<unsigned char>(c)); });
    if (i == 0 && digits) {
      call.branch = std::stoi(a);
    } else if (upper) {
      call.groups.push_back(a);
    } else {
      throw ParseError("malformed argument '" + a + "' in '" + raw + "'", 0, static_cast<int>(open) + 2);
    }
  }
  return call;
}

// ---------------------------------------------------------------------------
// Construction

Problem::Problem(const KnowledgeBase& kb, const ProblemRecord& record, const AlgebraOptions& options)
    : kb_(&kb), record_(record), syms_(&kb) {
  algebra_.set_options(options);
  SymbolTable syms = syms_;
  algebra_.set_domain([syms](const std::string& s) { return syms.domain(s); });

  std::vector<CdlStatement> construction;
  for (const auto& text : record.construction_cdl) {
    try {
      construction.push_back(parse_cdl(text, &kb, CdlCategory::Construction));
    } catch (const ParseError& e) {
      throw ProblemError(e.what(), text);
    }
  }
  if (construction.empty()) throw ProblemError("problem has no construction statements");
  init_construction(construction);
  for (const auto& text : record.text_cdl) init_text(text);
  auto_extend();
  init_goal();
  check_goal();
}

void Problem::add_structure(const std::string& predicate, const std::string& item, const Support& premises,
                            const std::string& theorem) {
  if (has(predicate, item)) return;
  Condition c;
  c.predicate = predicate;
  c.item = item;
  c.premises = premises;
  c.theorem = theorem;
  store(std::move(c));
}

void Problem::init_construction(const std::vector<CdlStatement>& statements) {
  struct Stmt {
    int rank;
    std::string predicate;
    std::string item;
    bool operator<(const Stmt& o) const { return std::tie(rank, item) < std::tie(o.rank, o.item); }
    bool operator==(const Stmt& o) const { return rank == o.rank && item == o.item; }
  };
  std::vector<Stmt> sorted;
  std::set<char> letters;
  for (const auto& s : statements) {
    if (s.predicate == "Shape") {
      std::string seq;
      for (const auto& e : s.groups) seq += e[0];
      if (!all_distinct(seq)) throw ProblemError("shape repeats a point", format_cdl(s));
      sorted.push_back({0, "Shape", canonical_rotation(seq)});
    } else if (s.predicate == "Collinear") {
      std::string run = s.groups[0];
      if (!all_distinct(run)) throw ProblemError("collinear run repeats a point", format_cdl(s));
      std::string rev(run.rbegin(), run.rend());
      sorted.push_back({1, "Collinear", std::min(run, rev)});
    } else {
      std::string rest = s.groups[1];
      if (!all_distinct(s.groups[0] + rest)) throw ProblemError("cocircular points repeat", format_cdl(s));
      sorted.push_back({2, "Cocircular", s.groups[0] + canonical_rotation(rest)});
    }
    for (const auto& g : s.groups) letters.insert(g.begin(), g.end());
  }
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  points_.assign(letters.begin(), letters.end());

  std::vector<int> ids;
  for (const auto& s : sorted) {
    Condition c;
    c.predicate = s.predicate;
    c.item = s.item;
    c.theorem = kPrerequisite;
    ids.push_back(store(std::move(c)));
  }

  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i].predicate != "Collinear") continue;
    std::vector<std::string> runs;
    std::string cur;
    sub_runs(sorted[i].item, 0, cur, runs);
    for (const auto& r : runs) add_structure("Collinear", r, {ids[i]}, kExtended);
  }

  for (char p : points_) {
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (sorted[i].item.find(p) != std::string::npos) {
        add_structure("Point", std::string(1, p), {ids[i]}, kExtended);
        break;
      }
    }
  }

  std::vector<PointSeq> units;
  std::vector<int> unit_ids;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& s = sorted[i];
    if (s.predicate == "Shape") {
      units.push_back(s.item);
      unit_ids.push_back(ids[i]);
      for (std::size_t k = 0; k < s.item.size(); ++k) {
        add_structure("Line", std::string{s.item[k], s.item[(k + 1) % s.item.size()]}, {ids[i]}, kExtended);
      }
    } else if (s.predicate == "Collinear") {
      for (std::size_t a = 0; a < s.item.size(); ++a) {
        for (std::size_t b = a + 1; b < s.item.size(); ++b) {
          add_structure("Line", std::string{s.item[a], s.item[b]}, {ids[i]}, kExtended);
        }
      }
    }
  }

  auto straight = [&](char a, char b, char c) { return has("Collinear", std::string{a, b, c}); };
  auto collinear_support = [&](char a, char b, char c) {
    auto id = find("Collinear", std::string{a, b, c});
    return id ? Support{*id} : Support{};
  };

  for (const auto& comp : construct_all(units)) {
    Support support;
    for (std::size_t u = 0; u < units.size(); ++u) {
      if (std::all_of(units[u].begin(), units[u].end(), [&](char c) { return comp.find(c) != std::string::npos; })) {
        support = merge_support(support, {unit_ids[u]});
      }
    }
    const std::size_t n = comp.size();
    for (std::size_t i = 0; i < n; ++i) {
      add_structure("Line", std::string{comp[i], comp[(i + 1) % n]}, support, kExtended);
    }
    for (std::size_t i = 0; i < n; ++i) {
      char a = comp[(i + n - 1) % n], b = comp[i], c = comp[(i + 1) % n];
      if (!straight(a, b, c)) add_structure("Angle", std::string{a, b, c}, support, kExtended);
    }
    std::string poly = comp;
    Support poly_support = support;
    bool changed = true;
    while (changed && poly.size() > 3) {
      changed = false;
      const std::size_t m = poly.size();
      for (std::size_t i = 0; i < m; ++i) {
        char a = poly[(i + m - 1) % m], b = poly[i], c = poly[(i + 1) % m];
        if (straight(a, b, c)) {
          poly_support = merge_support(poly_support, collinear_support(a, b, c));
          poly.erase(i, 1);
          changed = true;
          break;
        }
      }
    }
    const std::size_t m = poly.size();
    bool degenerate = false;
    for (std::size_t i = 0; i < m; ++i) {
      if (straight(poly[(i + m - 1) % m], poly[i], poly[(i + 1) % m])) degenerate = true;
    }
    if (m < 3 || degenerate) continue;
    add_structure("Polygon", canonical_rotation(poly), poly_support, kExtended);
    for (std::size_t i = 0; i < m; ++i) {
      add_structure("Angle", std::string{poly[(i + m - 1) % m], poly[i], poly[(i + 1) % m]}, poly_support,
                    kExtended);
    }
  }

  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& s = sorted[i];
    if (s.predicate != "Cocircular") continue;
    char centre = s.item[0];
    std::string rest = s.item.substr(1);
    add_structure("Circle", std::string(1, centre), {ids[i]}, kExtended);
    for (unsigned mask = 1; mask + 1 < (1u << rest.size()); ++mask) {
      std::string sub(1, centre);
      for (std::size_t k = 0; k < rest.size(); ++k) {
        if (mask & (1u << k)) sub += rest[k];
      }
      add_structure("Cocircular", sub, {ids[i]}, kExtended);
    }
    for (char x : rest) {
      for (char y : rest) {
        if (x != y) add_structure("Arc", std::string{centre, x, y}, {ids[i]}, kExtended);
      }
    }
  }

  add_same_angle_equalities();
}

void Problem::add_same_angle_equalities() {
  // The angle measure is whichever attribution is declared over Angle(ABC)
  // with the angle domain; without one there is nothing to equate.
  const PredicateDef* measure = nullptr;
  for (const auto& [name, def] : kb_->predicates()) {
    if (def.kind != PredicateKind::Attribution || def.domain != SymbolDomain::Angle || def.arity() != 3) continue;
    for (const auto& a : def.ee_check) {
      if (a.predicate == "Angle" && a.vars() == def.vars()) measure = &def;
    }
    if (measure) break;
  }
  if (!measure) return;

  auto same_ray = [&](char b, char x, char y) {
    return x == y || has("Collinear", std::string{b, x, y}) || has("Collinear", std::string{b, y, x});
  };
  std::vector<int> angles;
  for (const auto& c : conds_) {
    if (c.predicate == "Angle") angles.push_back(c.id);
  }
  std::vector<bool> grouped(angles.size(), false);
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (grouped[i]) continue;
    const std::string a = conds_[angles[i]].item;
    for (std::size_t j = i + 1; j < angles.size(); ++j) {
      if (grouped[j]) continue;
      const std::string b = conds_[angles[j]].item;
      if (a[1] != b[1] || !same_ray(a[1], a[0], b[0]) || !same_ray(a[1], a[2], b[2])) continue;
      grouped[j] = true;
      Poly eq = Poly::symbol(syms_.symbol(measure->name, a)) - Poly::symbol(syms_.symbol(measure->name, b));
      add_equation(eq, {angles[i], angles[j]}, kExtended);
    }
  }
}

void Problem::init_text(const std::string& text) {
  CdlStatement s;
  try {
    s = parse_cdl(text, kb_, CdlCategory::Condition);
  } catch (const ParseError& e) {
    throw ProblemError(e.what(), text);
  }
  if (s.predicate == "Free") return;
  if (s.predicate == "Equal" || s.predicate == "Equation") {
    Poly p;
    try {
      p = s.predicate == "Equal" ? expr_poly(s.exprs[0]) - expr_poly(s.exprs[1]) : expr_poly(s.exprs[0]);
    } catch (const ProblemError& e) {
      throw ProblemError(e.what(), text);
    }
    if (p.is_constant() && !p.is_zero()) throw ProblemError("inconsistent equation", text);
    add_equation(p, {}, kPrerequisite);
    return;
  }
  const PredicateDef* def = kb_->predicate(s.predicate);
  if (!def->variadic) {
    bool layout = s.groups.size() == def->var_pattern.size();
    for (std::size_t i = 0; layout && i < s.groups.size(); ++i) {
      layout = s.groups[i].size() == def->var_pattern[i].size();
    }
    if (!layout) throw ProblemError("fv_check failed: point groups do not match " + def->name, text);
  }
  AddResult r = add_condition(s.predicate, flat(s.groups), {}, kPrerequisite);
  if (r.failure != CheckFailure::None) throw ProblemError(r.message, text);
}

void Problem::init_goal() {
  const std::string& text = record_.goal_cdl;
  CdlStatement s;
  try {
    s = parse_cdl(text, kb_, CdlCategory::Goal);
  } catch (const ParseError& e) {
    throw ProblemError(e.what(), text);
  }
  goal_ = Goal{};
  goal_.kind = s.goal_kind;
  goal_.text = format_cdl(s);
  try {
    if (s.goal_kind == GoalKind::Value) {
      goal_.expr = expr_poly(s.exprs[0]);
    } else if (s.goal_kind == GoalKind::Equal) {
      goal_.expr = expr_poly(s.exprs[0]) - expr_poly(s.exprs[1]);
    } else {
      goal_.relation = RelAtom{s.predicate, s.groups};
      std::string why;
      if (check_item(*kb_->predicate(s.predicate), flat(s.groups), &why)) throw ProblemError(why);
    }
  } catch (const ProblemError& e) {
    throw ProblemError(e.what(), text);
  }
}

// ---------------------------------------------------------------------------
// Store

int Problem::store(Condition c) {
  c.id = static_cast<int>(conds_.size());
  for (int p : c.premises) {
    if (p < 0 || p >= c.id) throw std::logic_error("premise id out of range");
  }
  conds_.push_back(std::move(c));
  index(conds_.back());
  pending_.push_back(conds_.back().id);
  return conds_.back().id;
}

void Problem::index(const Condition& c) {
  signature_ ^= fnv1a(fact_key(*kb_, c));
  if (c.is_equation()) return;
  const PredicateDef* def = kb_->predicate(c.predicate);
  for (const auto& rep : multi_items(*def, c.item)) ext_[{c.predicate, rep.size()}][rep] = Support{c.id};
}

const std::map<std::string, Support>& Problem::extension(const std::string& predicate, std::size_t arity) const {
  static const std::map<std::string, Support> kEmpty;
  auto it = ext_.find({predicate, arity});
  return it == ext_.end() ? kEmpty : it->second;
}

std::optional<int> Problem::find(const std::string& predicate, const std::string& item) const {
  const auto& e = extension(predicate, item.size());
  auto it = e.find(item);
  if (it == e.end()) return std::nullopt;
  return it->second.front();
}

bool Problem::has(const std::string& predicate, const std::string& item) const {
  return find(predicate, item).has_value();
}

std::optional<CheckFailure> Problem::check_item(const PredicateDef& def, const std::string& item,
                                                std::string* why) const {
  auto reject = [&](CheckFailure f, const std::string& msg) {
    if (why) *why = msg;
    return std::optional<CheckFailure>(f);
  };
  for (char c : item) {
    if (points_.find(c) == std::string::npos) {
      return reject(CheckFailure::FvCheck, std::string("fv_check failed: unknown point ") + c);
    }
  }
  if (!def.variadic && item.size() != def.arity()) {
    return reject(CheckFailure::FvCheck, "fv_check failed: " + def.name + " expects " +
                                             std::to_string(def.arity()) + " points, got " + item);
  }
  auto matches = [&](const std::string& pattern) {
    std::map<char, char> fwd, back;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
      auto [f, fnew] = fwd.emplace(pattern[i], item[i]);
      auto [b, bnew] = back.emplace(item[i], pattern[i]);
      if (f->second != item[i] || b->second != pattern[i]) return false;
    }
    return true;
  };
  bool ok = def.fv_check.empty() ? all_distinct(item) : false;
  for (const auto& layout : def.fv_check) ok = ok || matches(flat(layout));
  if (!ok) return reject(CheckFailure::FvCheck, "fv_check failed: " + def.name + "(" + item + ")");
  if (!def.builtin) {
    auto b = bind_vars(def.vars(), item);
    for (const auto& atom : def.ee_check) {
      std::string inst = instantiate(atom.vars(), b);
      if (!has(atom.predicate, inst)) {
        return reject(CheckFailure::EeCheck, "ee_check failed: " + def.name + "(" + item + ") needs " +
                                                 atom.predicate + "(" + inst + ")");
      }
    }
  }
  return std::nullopt;
}

AddResult Problem::add_condition(const std::string& predicate, const std::string& item, const Support& premises,
                                 const std::string& theorem) {
  AddResult r;
  const PredicateDef* def = kb_->predicate(predicate);
  if (!def || def->kind == PredicateKind::Attribution || def->kind == PredicateKind::Algebra) {
    r.failure = CheckFailure::Unknown;
    r.message = "unknown relation predicate " + predicate;
    return r;
  }
  if (auto f = check_item(*def, item, &r.message)) {
    r.failure = *f;
    return r;
  }
  if (has(predicate, item)) return r;
  Condition c;
  c.predicate = predicate;
  c.item = item;
  c.premises = premises;
  c.theorem = theorem;
  r.id = store(std::move(c));
  return r;
}

AddResult Problem::add_equation(const Poly& p, const Support& premises, const std::string& theorem) {
  AddResult r;
  if (p.is_zero() || algebra_.equations().contains(p)) return r;
  if (p.is_constant()) {
    diagnostics_.push_back("inconsistent equation " + p.to_string() + " from " + theorem + " ignored");
    return r;
  }
  Condition c;
  c.predicate = "Equation";
  c.equation = p;
  c.premises = premises;
  c.theorem = theorem;
  r.id = store(std::move(c));
  algebra_.add_equation(p, *r.id);
  return r;
}

std::string Problem::attribute_symbol(const std::string& attribution, const std::string& points) const {
  const PredicateDef* def = kb_->predicate(attribution);
  if (!def || def->kind != PredicateKind::Attribution) throw ProblemError("unknown attribution " + attribution);
  if (points.size() != def->arity()) throw ProblemError("wrong number of points for " + attribution);
  auto b = bind_vars(def->vars(), points);
  for (const auto& atom : def->ee_check) {
    std::string inst = instantiate(atom.vars(), b);
    if (!has(atom.predicate, inst)) {
      throw ProblemError("ee_check failed: " + attribution + "(" + points + ") needs " + atom.predicate + "(" +
                         inst + ")");
    }
  }
  return syms_.symbol(attribution, points);
}

Poly Problem::expr_poly(const Expr& e) const {
  return to_poly(e, [&](const Expr& a) { return attribute_symbol(a.name, a.points()); });
}

Poly Problem::fact_equation(const Fact& f, const std::map<char, char>& binding) const {
  auto conv = [&](const Expr& e) {
    return to_poly(e, [&](const Expr& a) { return attribute_symbol(a.name, instantiate(a.points(), binding)); });
  };
  return conv(f.lhs) - conv(f.rhs);
}

int Problem::auto_extend() {
  int added = 0;
  for (std::size_t i = 0; i < pending_.size(); ++i) {
    const Condition c = conds_[static_cast<std::size_t>(pending_[i])];
    if (c.is_equation()) continue;
    const PredicateDef* def = kb_->predicate(c.predicate);
    if (def->extend.empty()) continue;
    auto b = bind_vars(def->vars(), c.item);
    for (const auto& f : def->extend) {
      AddResult r;
      if (f.equation) {
        try {
          r = add_equation(fact_equation(f, b), {c.id}, kExtended);
        } catch (const ProblemError& e) {
          diagnostics_.push_back(std::string("extend skipped: ") + e.what());
          continue;
        }
      } else {
        r = add_condition(f.atom.predicate, instantiate(f.atom.vars(), b), {c.id}, kExtended);
        if (r.failure != CheckFailure::None) diagnostics_.push_back("extend skipped: " + r.message);
      }
      if (r.id) ++added;
    }
  }
  pending_.clear();
  return added;
}

// ---------------------------------------------------------------------------
// Goal

bool Problem::check_goal(const std::optional<Clock::time_point>& deadline) {
  if (goal_.status == GoalStatus::Solved) return true;
  if (goal_.kind == GoalKind::Relation) {
    if (auto id = find(goal_.relation.predicate, flat(goal_.relation.groups))) {
      goal_.status = GoalStatus::Solved;
      goal_.premises = {*id};
    }
    return goal_.status == GoalStatus::Solved;
  }
  SolveResult r = algebra_.solve_target(goal_.expr, deadline);
  if (r.timed_out) goal_.diagnostic = "algebra timed out";
  if (!r.value) return false;
  if (goal_.kind == GoalKind::Equal && !r.value->is_zero()) return false;
  goal_.status = GoalStatus::Solved;
  goal_.premises = r.premises;
  goal_.diagnostic.clear();
  if (goal_.kind == GoalKind::Value) goal_.answer = r.value;
  return true;
}

std::vector<int> Problem::goal_closure() const {
  if (goal_.status != GoalStatus::Solved) return {};
  std::set<int> seen;
  std::vector<int> stack(goal_.premises.begin(), goal_.premises.end());
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    if (!seen.insert(id).second) continue;
    for (int p : conds_[static_cast<std::size_t>(id)].premises) stack.push_back(p);
  }
  return {seen.begin(), seen.end()};
}

// ---------------------------------------------------------------------------
// Theorems

ApplyReport Problem::apply(const TheoremCall& call, const std::optional<Clock::time_point>& deadline) {
  const TheoremDef* thm = kb_->theorem(call.name);
  if (!thm) throw ProblemError("unknown theorem", call.name);
  const int nbranches = static_cast<int>(thm->branches.size());
  if (call.branch && (*call.branch < 1 || *call.branch > nbranches)) {
    throw ProblemError("theorem has no branch " + std::to_string(*call.branch), call.text());
  }
  std::map<char, char> fixed;
  if (!call.groups.empty()) {
    bool layout = call.groups.size() == thm->var_pattern.size();
    for (std::size_t i = 0; layout && i < call.groups.size(); ++i) {
      layout = call.groups[i].size() == thm->var_pattern[i].size();
    }
    if (!layout) throw ProblemError("fv_check failed: binding does not match the theorem header", call.text());
    std::string vars = flat(thm->var_pattern), pts = flat(call.groups);
    for (char p : pts) {
      if (points_.find(p) == std::string::npos) {
        throw ProblemError(std::string("fv_check failed: unknown point ") + p, call.text());
      }
    }
    std::set<char> used;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      auto [it, fresh] = fixed.emplace(vars[i], pts[i]);
      if (it->second != pts[i] || (fresh && !used.insert(pts[i]).second)) {
        throw ProblemError("fv_check failed: inconsistent binding", call.text());
      }
    }
  }

  EvalContext ctx;
  ctx.universe = points_;
  ctx.relation = [&](const RelAtom& a) {
    Relation r = atom_relation(a.vars(), extension(a.predicate, a.vars().size()));
    if (fixed.empty()) return r;
    for (auto it = r.rows.begin(); it != r.rows.end();) {
      bool keep = true;
      for (std::size_t i = 0; i < r.vars.size(); ++i) {
        auto f = fixed.find(r.vars[i]);
        if (f != fixed.end() && f->second != it->first[i]) keep = false;
      }
      it = keep ? std::next(it) : r.rows.erase(it);
    }
    return r;
  };
  ctx.algebraic = [&](const BranchAtom& atom, const std::map<char, char>& b) -> std::optional<Support> {
    Poly p;
    try {
      p = fact_equation(Fact{true, {}, atom.lhs, atom.rhs}, b);
    } catch (const ProblemError&) {
      return std::nullopt;
    }
    Support s;
    if (algebra_.evaluate_constraint(p, &s, deadline)) return s;
    return std::nullopt;
  };
  if (deadline) ctx.cancelled = [deadline] { return Clock::now() > *deadline; };
  SizeHint hint = [&](const BranchAtom& a) -> std::optional<std::size_t> {
    if (a.kind == BranchAtom::Kind::Alg) return std::nullopt;
    return extension(a.atom.predicate, a.atom.vars().size()).size();
  };

  ApplyReport report;
  const std::size_t before = conds_.size();
  for (int b = 1; b <= nbranches; ++b) {
    if (call.branch && *call.branch != b) continue;
    TheoremBranch branch = reorder_branch(thm->branches[static_cast<std::size_t>(b - 1)], hint);
    Relation rows = execute_branch(branch, ctx);
    for (const auto& [tuple, support] : rows.rows) {
      auto binding = rows.binding(tuple);
      if (!fixed.empty()) {
        bool consistent = std::all_of(fixed.begin(), fixed.end(), [&](const auto& kv) {
          auto it = binding.find(kv.first);
          return it != binding.end() && it->second == kv.second;
        });
        if (!consistent) continue;
      }
      ++report.bindings;
      TheoremCall label;
      label.name = thm->name;
      if (nbranches > 1) label.branch = b;
      for (const auto& g : thm->var_pattern) label.groups.push_back(instantiate(g, binding));
      const std::string text = label.text();
      for (const auto& f : thm->conclusions) {
        if (f.equation) {
          try {
            add_equation(fact_equation(f, binding), support, text);
          } catch (const ProblemError& e) {
            diagnostics_.push_back(text + ": " + e.what());
          }
        } else {
          AddResult r = add_condition(f.atom.predicate, instantiate(f.atom.vars(), binding), support, text);
          if (r.failure != CheckFailure::None) diagnostics_.push_back(text + ": " + r.message);
        }
      }
    }
  }
  auto_extend();
  for (std::size_t id = before; id < conds_.size(); ++id) report.added.push_back(static_cast<int>(id));
  report.goal_solved = check_goal(deadline);
  return report;
}

std::vector<TheoremCall> Problem::applicable() const {
  std::vector<TheoremCall> out;
  for (const auto& thm : kb_->theorems()) {
    for (std::size_t b = 0; b < thm.branches.size(); ++b) {
      bool ok = true;
      for (const auto& a : thm.branches[b].atoms) {
        if (a.kind == BranchAtom::Kind::Rel && extension(a.atom.predicate, a.atom.vars().size()).empty()) ok = false;
      }
      if (!ok) continue;
      TheoremCall c;
      c.name = thm.name;
      if (thm.branches.size() > 1) c.branch = static_cast<int>(b + 1);
      out.push_back(c);
    }
  }
  return out;
}

void Problem::truncate(std::size_t length) {
  if (length >= conds_.size()) return;
  conds_.resize(length);
  ext_.clear();
  signature_ = 0;
  for (const auto& c : conds_) index(c);
  algebra_.truncate(static_cast<int>(length));
  pending_.clear();
  Goal fresh = goal_;
  fresh.status = GoalStatus::Unsolved;
  fresh.answer.reset();
  fresh.premises.clear();
  fresh.diagnostic.clear();
  goal_ = fresh;
  check_goal();
}

// ---------------------------------------------------------------------------
// Export

std::string Problem::inverse_parse(const Condition& c) const {
  if (c.is_equation()) {
    auto [l, r] = to_equal_sides(c.equation, [&](const std::string& s) { return syms_.expr_of(s); });
    return "Equal(" + to_text(l) + "," + to_text(r) + ")";
  }
  const PredicateDef* def = kb_->predicate(c.predicate);
  return c.predicate + "(" + join(split_groups(*def, c.item)) + ")";
}

std::string fact_key(const KnowledgeBase& kb, const Condition& c) {
  if (c.is_equation()) return "Equation(" + c.equation.monic().to_string() + ")";
  return c.predicate + "(" + canonical_item(*kb.predicate(c.predicate), c.item) + ")";
}

std::vector<std::string> fact_keys(const Problem& p) {
  std::vector<std::string> out;
  for (const auto& c : p.conditions()) out.push_back(fact_key(p.kb(), c));
  std::sort(out.begin(), out.end());
  return out;
}

nlohmann::json Problem::export_hypertree() const {
  using nlohmann::json;
  json nodes = json::array();
  for (const auto& c : conds_) {
    json n;
    n["id"] = c.id;
    n["predicate"] = c.predicate;
    n["item"] = inverse_parse(c);
    if (!c.is_equation()) n["points"] = c.item;
    n["theorem"] = c.theorem;
    n["premises"] = c.premises;
    nodes.push_back(n);
  }
  json edges = json::array();
  for (std::size_t i = 0; i < conds_.size();) {
    std::size_t j = i + 1;
    while (j < conds_.size() && conds_[j].theorem == conds_[i].theorem && conds_[j].premises == conds_[i].premises) {
      ++j;
    }
    json e;
    e["theorem"] = conds_[i].theorem;
    e["premises"] = conds_[i].premises;
    json concl = json::array();
    for (std::size_t k = i; k < j; ++k) concl.push_back(conds_[k].id);
    e["conclusions"] = concl;
    edges.push_back(e);
    i = j;
  }
  json g;
  g["kind"] = goal_kind_name(goal_.kind);
  g["payload"] = goal_.text;
  g["status"] = goal_.status == GoalStatus::Solved ? "solved" : "unsolved";
  g["answer"] = goal_.answer ? json(goal_.answer->to_string()) : json(nullptr);
  g["premises"] = goal_.premises;
  json doc;
  doc["problem_id"] = record_.problem_id;
  doc["nodes"] = nodes;
  doc["edges"] = edges;
  doc["goal"] = g;
  return doc;
}

Problem replay_hypertree(const KnowledgeBase& kb, const ProblemRecord& record, const nlohmann::json& doc) {
  Problem p(kb, record);
  std::map<int, const nlohmann::json*> nodes;
  for (const auto& n : doc.at("nodes")) nodes[n.at("id").get<int>()] = &n;

  auto node_key = [&](const nlohmann::json& n) {
    Condition c;
    c.predicate = n.at("predicate").get<std::string>();
    if (c.predicate == "Equation") {
      CdlStatement s = parse_cdl(n.at("item").get<std::string>(), &kb, CdlCategory::Condition);
      c.equation = p.expr_poly(s.exprs.at(0)) - p.expr_poly(s.exprs.at(1));
    } else {
      c.item = n.at("points").get<std::string>();
    }
    return c;
  };
  std::map<std::string, int> by_key;
  auto refresh = [&] {
    for (const auto& c : p.conditions()) by_key.emplace(fact_key(kb, c), c.id);
  };
  refresh();
  std::map<int, int> relabel;
  auto map_id = [&](int orig) {
    auto it = relabel.find(orig);
    if (it != relabel.end()) return it->second;
    auto n = nodes.find(orig);
    if (n == nodes.end()) throw std::runtime_error("replay: dangling premise " + std::to_string(orig));
    auto k = by_key.find(fact_key(kb, node_key(*n->second)));
    if (k == by_key.end()) throw std::runtime_error("replay: premise " + std::to_string(orig) + " not derived");
    relabel[orig] = k->second;
    return k->second;
  };

  for (const auto& e : doc.at("edges")) {
    const std::string theorem = e.at("theorem").get<std::string>();
    if (theorem == kPrerequisite || theorem == kExtended) continue;
    Support premises;
    for (const auto& id : e.at("premises")) premises.push_back(map_id(id.get<int>()));
    std::sort(premises.begin(), premises.end());
    premises.erase(std::unique(premises.begin(), premises.end()), premises.end());
    for (const auto& id : e.at("conclusions")) {
      Condition c = node_key(*nodes.at(id.get<int>()));
      AddResult r = c.is_equation() ? p.add_equation(c.equation, premises, theorem)
                                    : p.add_condition(c.predicate, c.item, premises, theorem);
      if (r.failure != CheckFailure::None) throw std::runtime_error("replay: " + r.message);
    }
    p.auto_extend();
    refresh();
  }
  p.check_goal();
  return p;
}

}  // namespace geoform
