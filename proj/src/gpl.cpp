#include "geoform/gpl.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace geoform {

Support merge_support(const Support& a, const Support& b) {
  Support out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::map<char, char> Relation::binding(const std::string& tuple) const {
  std::map<char, char> out;
  for (std::size_t i = 0; i < vars.size(); ++i) out[vars[i]] = tuple[i];
  return out;
}

Relation unit_relation() {
  Relation r;
  r.rows.emplace("", Support{});
  return r;
}

namespace {

std::string unique_letters(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (out.find(c) == std::string::npos) out += c;
  }
  return out;
}

bool subset_of(const std::string& vars, const std::string& bound) {
  return std::all_of(vars.begin(), vars.end(), [&](char c) { return bound.find(c) != std::string::npos; });
}

bool distinct_points(const std::string& s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      if (s[i] == s[j]) return false;
    }
  }
  return true;
}

std::vector<std::size_t> positions(const std::string& of, const std::string& in) {
  std::vector<std::size_t> out;
  for (char c : of) out.push_back(in.find(c));
  return out;
}

std::string pick(const std::string& tuple, const std::vector<std::size_t>& pos) {
  std::string out;
  for (auto p : pos) out += tuple[p];
  return out;
}

std::string sorted_letters(std::string s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

}  // namespace

Relation atom_relation(const std::string& atom_vars, const std::map<std::string, Support>& items) {
  Relation r;
  r.vars = unique_letters(atom_vars);
  auto pos = positions(r.vars, atom_vars);
  for (const auto& [item, support] : items) {
    if (item.size() != atom_vars.size()) continue;
    bool consistent = true;
    for (std::size_t i = 0; i < atom_vars.size() && consistent; ++i) {
      consistent = item[i] == item[atom_vars.find(atom_vars[i])];
    }
    if (consistent) r.rows.emplace(pick(item, pos), support);
  }
  return r;
}

Relation join(const Relation& r1, const Relation& r2) {
  Relation out;
  out.vars = r1.vars;
  std::string shared;
  std::string fresh;
  for (char c : r2.vars) {
    if (r1.vars.find(c) != std::string::npos) {
      shared += c;
    } else {
      fresh += c;
    }
  }
  out.vars += fresh;
  if (r1.empty() || r2.empty()) return out;
  auto pos1 = positions(shared, r1.vars);
  auto pos2 = positions(shared, r2.vars);
  auto fresh_pos = positions(fresh, r2.vars);
  std::map<std::string, std::vector<const std::pair<const std::string, Support>*>> index;
  for (const auto& row : r2.rows) index[pick(row.first, pos2)].push_back(&row);
  for (const auto& [t1, s1] : r1.rows) {
    auto it = index.find(pick(t1, pos1));
    if (it == index.end()) continue;
    for (const auto* row : it->second) {
      out.rows.emplace(t1 + pick(row->first, fresh_pos), merge_support(s1, row->second));
    }
  }
  return out;
}

Relation anti_join(const Relation& r1, const Relation& r2) {
  if (!subset_of(r2.vars, r1.vars)) throw std::invalid_argument("anti_join: unbound variables");
  Relation out;
  out.vars = r1.vars;
  auto pos = positions(r2.vars, r1.vars);
  for (const auto& [t, s] : r1.rows) {
    std::string proj = pick(t, pos);
    if (distinct_points(proj) && r2.rows.count(proj) == 0) out.rows.emplace(t, s);
  }
  return out;
}

Relation union_rel(const Relation& r1, const Relation& r2) {
  if (sorted_letters(r1.vars) != sorted_letters(r2.vars) || r1.vars.size() != r2.vars.size()) {
    throw std::invalid_argument("union of relations with different variables: (" + r1.vars + ") vs (" +
                                r2.vars + ")");
  }
  Relation out = r1;
  auto pos = positions(r1.vars, r2.vars);
  for (const auto& [t, s] : r2.rows) out.rows.emplace(pick(t, pos), s);
  return out;
}

Relation complement_rel(const Relation& r1, const std::string& universe) {
  std::string points = sorted_letters(universe);
  Relation out;
  out.vars = r1.vars;
  std::size_t n = r1.vars.size();
  std::string cur;
  std::vector<bool> used(points.size(), false);
  std::function<void()> rec = [&]() {
    if (cur.size() == n) {
      if (r1.rows.count(cur) == 0) out.rows.emplace(cur, Support{});
      return;
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (used[i]) continue;
      used[i] = true;
      cur += points[i];
      rec();
      cur.pop_back();
      used[i] = false;
    }
  };
  rec();
  return out;
}

Relation filter_algebraic(const Relation& r1, const BranchAtom& atom, const AlgebraicCheck& check) {
  Relation out;
  out.vars = r1.vars;
  std::string vars = atom.vars();
  auto pos = positions(vars, r1.vars);
  for (const auto& [t, s] : r1.rows) {
    if (!distinct_points(pick(t, pos))) continue;
    if (auto support = check(atom, r1.binding(t))) out.rows.emplace(t, merge_support(s, *support));
  }
  return out;
}

Relation project(const Relation& r, const std::string& vars) {
  Relation out;
  out.vars = vars;
  auto pos = positions(vars, r.vars);
  for (auto p : pos) {
    if (p == std::string::npos) throw std::invalid_argument("project: unknown variable");
  }
  for (const auto& [t, s] : r.rows) {
    std::string key = pick(t, pos);
    auto it = out.rows.find(key);
    if (it == out.rows.end()) {
      out.rows.emplace(key, s);
    } else {
      it->second = merge_support(it->second, s);
    }
  }
  return out;
}

std::string bound_vars(const GplExpr& expr) {
  switch (expr.kind) {
    case GplExpr::Kind::Rel: return sorted_letters(expr.atom.vars());
    case GplExpr::Kind::Not:
    case GplExpr::Kind::Alg: return "";
    case GplExpr::Kind::And: {
      std::string all;
      for (const auto& c : expr.children) all += bound_vars(c);
      return sorted_letters(all);
    }
    case GplExpr::Kind::Or: return expr.children.empty() ? "" : bound_vars(expr.children.front());
  }
  return "";
}

namespace {

using AtomList = std::vector<BranchAtom>;

std::vector<AtomList> dnf(const GplExpr& e) {
  switch (e.kind) {
    case GplExpr::Kind::Rel: {
      BranchAtom a;
      a.kind = BranchAtom::Kind::Rel;
      a.atom = e.atom;
      return {{a}};
    }
    case GplExpr::Kind::Alg: {
      BranchAtom a;
      a.kind = BranchAtom::Kind::Alg;
      a.lhs = e.lhs;
      a.rhs = e.rhs;
      return {{a}};
    }
    case GplExpr::Kind::Not: {
      if (e.children.size() != 1 || e.children[0].kind != GplExpr::Kind::Rel) {
        throw std::invalid_argument("~ applies to a single relation atom only");
      }
      BranchAtom a;
      a.kind = BranchAtom::Kind::NotRel;
      a.atom = e.children[0].atom;
      return {{a}};
    }
    case GplExpr::Kind::And: {
      std::vector<AtomList> acc{{}};
      for (const auto& child : e.children) {
        auto sub = dnf(child);
        std::vector<AtomList> next;
        for (const auto& left : acc) {
          for (const auto& right : sub) {
            AtomList merged = left;
            merged.insert(merged.end(), right.begin(), right.end());
            next.push_back(std::move(merged));
          }
        }
        acc = std::move(next);
      }
      return acc;
    }
    case GplExpr::Kind::Or: {
      std::vector<AtomList> out;
      std::string first = e.children.empty() ? "" : bound_vars(e.children.front());
      for (const auto& child : e.children) {
        std::string b = bound_vars(child);
        if (b != first) {
          throw std::invalid_argument("operands of | bind different variables: (" + first + ") vs (" + b +
                                      ") in " + e.text());
        }
        auto sub = dnf(child);
        out.insert(out.end(), sub.begin(), sub.end());
      }
      return out;
    }
  }
  return {};
}

}  // namespace

std::vector<TheoremBranch> to_dnf(const GplExpr& expr) {
  std::vector<TheoremBranch> out;
  for (auto& atoms : dnf(expr)) out.push_back(TheoremBranch{std::move(atoms)});
  return out;
}

TheoremBranch reorder_branch(const TheoremBranch& branch, const SizeHint& size) {
  std::vector<BranchAtom> rest = branch.atoms;
  TheoremBranch out;
  std::string bound;

  auto smallest = [&](const std::vector<std::size_t>& idx) {
    std::size_t best = idx.front();
    std::optional<std::size_t> best_size = size ? size(rest[best]) : std::nullopt;
    for (std::size_t i : idx) {
      auto s = size ? size(rest[i]) : std::nullopt;
      if (s && (!best_size || *s < *best_size)) {
        best = i;
        best_size = s;
      }
    }
    return best;
  };

  while (!rest.empty()) {
    std::vector<std::size_t> membership;
    std::vector<std::size_t> sharing;
    std::vector<std::size_t> free_rel;
    std::vector<std::size_t> free_not;
    std::vector<std::size_t> alg;
    for (std::size_t i = 0; i < rest.size(); ++i) {
      const auto& a = rest[i];
      std::string v = a.vars();
      if (a.kind == BranchAtom::Kind::Alg) {
        alg.push_back(i);
      } else if (!bound.empty() && subset_of(v, bound)) {
        membership.push_back(i);
      } else if (a.kind == BranchAtom::Kind::NotRel) {
        free_not.push_back(i);
      } else if (std::any_of(v.begin(), v.end(), [&](char c) { return bound.find(c) != std::string::npos; })) {
        sharing.push_back(i);
      } else {
        free_rel.push_back(i);
      }
    }
    std::size_t chosen;
    if (!membership.empty()) {
      chosen = membership.front();
    } else if (!sharing.empty()) {
      chosen = smallest(sharing);
    } else if (!free_rel.empty()) {
      chosen = smallest(free_rel);
    } else if (!free_not.empty()) {
      chosen = free_not.front();
    } else {
      chosen = alg.front();
    }
    const BranchAtom& a = rest[chosen];
    if (a.kind == BranchAtom::Kind::Rel) bound = unique_letters(bound + a.vars());
    out.atoms.push_back(a);
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(chosen));
  }
  return out;
}

namespace {

// All distinct-point tuples over vars satisfying the constraint.
Relation standalone_algebraic(const BranchAtom& atom, const EvalContext& ctx) {
  Relation empty;
  empty.vars = atom.vars();
  return filter_algebraic(complement_rel(empty, ctx.universe), atom, ctx.algebraic);
}

Relation apply_atom(const Relation& acc, const BranchAtom& atom, const EvalContext& ctx) {
  switch (atom.kind) {
    case BranchAtom::Kind::Rel: return join(acc, ctx.relation(atom.atom));
    case BranchAtom::Kind::NotRel: {
      Relation r = ctx.relation(atom.atom);
      if (subset_of(r.vars, acc.vars)) return anti_join(acc, r);
      return join(acc, complement_rel(r, ctx.universe));
    }
    case BranchAtom::Kind::Alg:
      if (subset_of(atom.vars(), acc.vars)) return filter_algebraic(acc, atom, ctx.algebraic);
      return join(acc, standalone_algebraic(atom, ctx));
  }
  return acc;
}

}  // namespace

Relation execute_branch(const TheoremBranch& branch, const EvalContext& ctx) {
  Relation acc = unit_relation();
  for (const auto& atom : branch.atoms) {
    if (ctx.cancelled && ctx.cancelled()) return Relation{acc.vars, {}};
    acc = apply_atom(acc, atom, ctx);
    if (acc.empty()) break;
  }
  return acc;
}

Relation evaluate_expr(const GplExpr& expr, const EvalContext& ctx) {
  switch (expr.kind) {
    case GplExpr::Kind::Rel: return ctx.relation(expr.atom);
    case GplExpr::Kind::Not: {
      if (expr.children.size() != 1 || expr.children[0].kind != GplExpr::Kind::Rel) {
        throw std::invalid_argument("~ applies to a single relation atom only");
      }
      return complement_rel(ctx.relation(expr.children[0].atom), ctx.universe);
    }
    case GplExpr::Kind::Alg: {
      BranchAtom a;
      a.kind = BranchAtom::Kind::Alg;
      a.lhs = expr.lhs;
      a.rhs = expr.rhs;
      return standalone_algebraic(a, ctx);
    }
    case GplExpr::Kind::Or: {
      Relation acc = evaluate_expr(expr.children.front(), ctx);
      for (std::size_t i = 1; i < expr.children.size(); ++i) {
        acc = union_rel(acc, evaluate_expr(expr.children[i], ctx));
      }
      return acc;
    }
    case GplExpr::Kind::And: {
      Relation acc = unit_relation();
      // Positive operands bind first; negations and constraints then filter.
      for (const auto& c : expr.children) {
        if (c.kind != GplExpr::Kind::Not && c.kind != GplExpr::Kind::Alg) acc = join(acc, evaluate_expr(c, ctx));
      }
      for (const auto& c : expr.children) {
        if (c.kind == GplExpr::Kind::Not) {
          BranchAtom a;
          a.kind = BranchAtom::Kind::NotRel;
          a.atom = c.children.at(0).atom;
          acc = apply_atom(acc, a, ctx);
        } else if (c.kind == GplExpr::Kind::Alg) {
          BranchAtom a;
          a.kind = BranchAtom::Kind::Alg;
          a.lhs = c.lhs;
          a.rhs = c.rhs;
          acc = apply_atom(acc, a, ctx);
        }
      }
      return acc;
    }
  }
  return {};
}

}  // namespace geoform
