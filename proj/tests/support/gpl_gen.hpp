#pragma once

// Random premise expressions over random small relations, plus a truth
// evaluator that enumerates every assignment of the bound variables.

#include <map>
#include <set>
#include <string>

#include "geoform/gpl.hpp"
#include "oracles.hpp"

namespace oracle {

struct GplWorld {
  std::string universe;
  std::map<std::string, std::set<std::string>> relations;  // predicate -> tuples
  int next = 0;

  geoform::EvalContext context() const {
    geoform::EvalContext ctx;
    ctx.universe = universe;
    ctx.relation = [this](const geoform::RelAtom& a) {
      std::map<std::string, geoform::Support> items;
      int id = 0;
      for (const auto& t : relations.at(a.predicate)) items[t] = {id++};
      return geoform::atom_relation(a.vars(), items);
    };
    ctx.algebraic = [](const geoform::BranchAtom& atom,
                       const std::map<char, char>& b) -> std::optional<geoform::Support> {
      if (alg_holds(atom.lhs.points(), atom.rhs.number.get_num().get_si(), b)) return geoform::Support{};
      return std::nullopt;
    };
    return ctx;
  }

  /// The synthetic algebraic constraint: the attribute's points are
  /// distinct and their codes plus k are even.
  static bool alg_holds(const std::string& vars, long k, const std::map<char, char>& b) {
    long sum = k;
    std::set<char> seen;
    for (char v : vars) {
      if (!seen.insert(b.at(v)).second) return false;
      sum += b.at(v);
    }
    return sum % 2 == 0;
  }
};

inline std::string random_subset(Rng& rng, const std::string& vars, bool nonempty) {
  std::string out;
  for (char v : vars) {
    if (uniform(rng, 0, 1)) out += v;
  }
  if (out.empty() && nonempty) out += vars[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(vars.size()) - 1))];
  return out;
}

inline std::string shuffled(Rng& rng, std::string s) {
  std::shuffle(s.begin(), s.end(), rng);
  return s;
}

inline geoform::GplExpr relation_leaf(Rng& rng, GplWorld& w, const std::string& vars, std::size_t max_tuples) {
  const std::string name = "R" + std::to_string(++w.next);
  w.relations[name] = random_tuples(rng, w.universe, vars.size(), max_tuples);
  return geoform::GplExpr::rel({name, {shuffled(rng, vars)}});
}

/// Expression binding exactly the variables in vars.
inline geoform::GplExpr random_gpl(Rng& rng, GplWorld& w, const std::string& vars, int depth,
                                   std::size_t max_tuples = 12) {
  using geoform::GplExpr;
  const int pick = depth == 0 ? 0 : uniform(rng, 0, 3);
  if (pick == 0) return relation_leaf(rng, w, vars, max_tuples);
  if (pick == 1 || pick == 2) {
    std::string v1 = random_subset(rng, vars, true);
    std::string v2;
    for (char v : vars) {
      if (v1.find(v) == std::string::npos || uniform(rng, 0, 2) == 0) v2 += v;
    }
    if (v2.empty()) v2 = vars.substr(0, 1);
    std::vector<GplExpr> kids{random_gpl(rng, w, v1, depth - 1, max_tuples),
                              random_gpl(rng, w, v2, depth - 1, max_tuples)};
    if (uniform(rng, 0, 2) == 0) {
      GplExpr neg = relation_leaf(rng, w, random_subset(rng, vars, true), max_tuples);
      kids.push_back(GplExpr::negate(neg));
    }
    if (uniform(rng, 0, 2) == 0) {
      const std::string av = random_subset(rng, vars, true);
      kids.push_back(GplExpr::alg(geoform::Expr::attr("F", {av}), geoform::Expr::constant(uniform(rng, 0, 1))));
    }
    return GplExpr::conj(std::move(kids));
  }
  return GplExpr::disj({random_gpl(rng, w, vars, depth - 1, max_tuples),
                        random_gpl(rng, w, vars, depth - 1, max_tuples)});
}

inline bool truth(const GplWorld& w, const geoform::GplExpr& e, const Assignment& s) {
  using K = geoform::GplExpr::Kind;
  auto tuple_of = [&](const std::string& vars) {
    std::string t;
    for (char v : vars) t += s.at(v);
    return t;
  };
  switch (e.kind) {
    case K::Rel: return w.relations.at(e.atom.predicate).count(tuple_of(e.atom.vars())) > 0;
    case K::Not: {
      const std::string t = tuple_of(e.children[0].atom.vars());
      const bool distinct = std::set<char>(t.begin(), t.end()).size() == t.size();
      return distinct && !w.relations.at(e.children[0].atom.predicate).count(t);
    }
    case K::Alg: return GplWorld::alg_holds(e.lhs.points(), e.rhs.number.get_num().get_si(), s);
    case K::And:
      for (const auto& c : e.children) {
        if (!truth(w, c, s)) return false;
      }
      return true;
    case K::Or:
      for (const auto& c : e.children) {
        if (truth(w, c, s)) return true;
      }
      return false;
  }
  return false;
}

/// Every assignment of vars over the universe on which e holds.
inline AssignmentSet brute_force(const GplWorld& w, const geoform::GplExpr& e, const std::string& vars) {
  AssignmentSet out;
  const std::size_t n = vars.size();
  const std::size_t u = w.universe.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= u;
  for (std::size_t code = 0; code < total; ++code) {
    Assignment s;
    std::size_t c = code;
    for (std::size_t i = 0; i < n; ++i) {
      s[vars[i]] = w.universe[c % u];
      c /= u;
    }
    if (truth(w, e, s)) out.insert(s);
  }
  return out;
}

inline AssignmentSet as_assignments(const geoform::Relation& r) {
  AssignmentSet out;
  for (const auto& row : r.rows) out.insert(r.binding(row.first));
  return out;
}

}  // namespace oracle
