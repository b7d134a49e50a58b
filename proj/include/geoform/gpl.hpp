#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geoform/kb.hpp"

namespace geoform {

/// Premise ids supporting one tuple; sorted, unique.
using Support = std::vector<int>;

Support merge_support(const Support& a, const Support& b);

/// A relation over point variables. Each row maps a tuple of points (one
/// letter per variable, in vars order) to the condition ids that produced it.
struct Relation {
  std::string vars;
  std::map<std::string, Support> rows;

  bool empty() const { return rows.empty(); }
  std::size_t size() const { return rows.size(); }
  /// Variable -> point for one row.
  std::map<char, char> binding(const std::string& tuple) const;
};

/// Relation holding the single empty tuple: the identity of join.
Relation unit_relation();

/// Re-labels a stored extension (tuples of points, positionally) with the
/// variables of an atom. Repeated variables keep only consistent tuples.
Relation atom_relation(const std::string& atom_vars, const std::map<std::string, Support>& items);

/// Constrained Cartesian product; vars = r1.vars then r2's new vars.
Relation join(const Relation& r1, const Relation& r2);

/// Rows of r1 whose projection onto r2's variables is absent from r2 (and
/// made of distinct points). r2's variables must all be bound in r1.
Relation anti_join(const Relation& r1, const Relation& r2);

/// Set union. r2 may list the same variables in a different order; throws
/// std::invalid_argument when the variable sets differ.
Relation union_rel(const Relation& r1, const Relation& r2);

/// All tuples of distinct universe points over r1's variables, minus r1.
Relation complement_rel(const Relation& r1, const std::string& universe);

/// Result of checking one algebraic constraint on one binding: the
/// supporting premise ids when it holds, nullopt when it does not.
using AlgebraicCheck = std::function<std::optional<Support>(const BranchAtom&, const std::map<char, char>&)>;

Relation filter_algebraic(const Relation& r1, const BranchAtom& atom, const AlgebraicCheck& check);

/// Rows projected and re-ordered onto the given variables (which must be
/// a subset of r.vars). Supports are merged on collisions.
Relation project(const Relation& r, const std::string& vars);

/// Disjunctive normal form. Throws std::invalid_argument when the children
/// of an Or bind different variable sets or when ~ wraps a non-atom.
std::vector<TheoremBranch> to_dnf(const GplExpr& expr);

/// Variables an expression binds: the variables of its positive relation atoms.
std::string bound_vars(const GplExpr& expr);

/// Extension size of a geometric atom, when known.
using SizeHint = std::function<std::optional<std::size_t>(const BranchAtom&)>;

/// Greedy reordering: membership checks on bound variables first, then
/// atoms sharing bound variables, smallest extension first; algebraic
/// atoms last. The evaluated set is unchanged.
TheoremBranch reorder_branch(const TheoremBranch& branch, const SizeHint& size = {});

/// Source of relation extensions and algebraic checks for evaluation.
struct EvalContext {
  std::function<Relation(const RelAtom&)> relation;
  AlgebraicCheck algebraic;
  std::string universe;
  /// Optional cooperative cancellation; checked between atoms.
  std::function<bool()> cancelled;
};

/// Left-to-right fold of the branch atoms. Stops early on an empty result.
Relation execute_branch(const TheoremBranch& branch, const EvalContext& ctx);

/// Direct recursive evaluation of a premise (no DNF); the reference
/// semantics used to validate to_dnf.
Relation evaluate_expr(const GplExpr& expr, const EvalContext& ctx);

}  // namespace geoform
