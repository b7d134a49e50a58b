#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "geoform/expr.hpp"

namespace geoform {

enum class PredicateKind { Structure, BasicEntity, Entity, Relation, Attribution, Algebra };

const char* kind_name(PredicateKind k);

enum class SymbolDomain { Angle, NonNegative, Real };

/// Predicate applied to point groups, e.g. IsMidpointOfLine(M,AB). Inside
/// definitions the letters are point variables; in facts they are points.
struct RelAtom {
  std::string predicate;
  std::vector<std::string> groups;

  std::string vars() const;  // concatenated groups
  std::string text() const;  // Predicate(G1,G2)
  friend bool operator==(const RelAtom&, const RelAtom&) = default;
};

/// A conclusion or extend entry: either a relation atom or Equal(lhs, rhs).
struct Fact {
  bool equation = false;
  RelAtom atom;
  Expr lhs;
  Expr rhs;

  std::string text() const;
};

/// Premise expression of a theorem.
struct GplExpr {
  enum class Kind { And, Or, Not, Rel, Alg };

  Kind kind = Kind::Rel;
  std::vector<GplExpr> children;  // And/Or operands; Not holds one child
  RelAtom atom;                   // Rel
  Expr lhs;                       // Alg: lhs - rhs must be zero
  Expr rhs;

  static GplExpr rel(RelAtom a);
  static GplExpr alg(Expr l, Expr r);
  static GplExpr conj(std::vector<GplExpr> c);
  static GplExpr disj(std::vector<GplExpr> c);
  static GplExpr negate(GplExpr c);

  std::string text() const;
};

/// One atom of a DNF branch.
struct BranchAtom {
  enum class Kind { Rel, NotRel, Alg };

  Kind kind = Kind::Rel;
  RelAtom atom;
  Expr lhs;
  Expr rhs;

  /// Point variables the atom mentions (attribute points for Alg atoms).
  std::string vars() const;
  std::string text() const;
};

/// One simple conjunction of a premise.
struct TheoremBranch {
  std::vector<BranchAtom> atoms;

  std::string text() const;
};

struct PredicateDef {
  std::string name;
  PredicateKind kind = PredicateKind::Relation;
  std::vector<std::string> var_pattern;  // e.g. {"M", "AB"}
  std::vector<RelAtom> ee_check;
  std::vector<std::vector<std::string>> fv_check;  // legal layouts
  std::vector<std::string> multi;                  // permutations of vars()
  std::vector<Fact> extend;
  std::string sym;
  SymbolDomain domain = SymbolDomain::NonNegative;
  bool builtin = false;
  /// Built-in predicates whose arity is not fixed (Shape, Polygon, ...).
  bool variadic = false;
  int line = 0;

  std::string vars() const;
  std::size_t arity() const { return vars().size(); }
};

struct TheoremDef {
  std::string name;
  std::vector<std::string> var_pattern;
  GplExpr premise;
  std::vector<Fact> conclusions;
  /// DNF of the premise, computed at load time.
  std::vector<TheoremBranch> branches;
  int line = 0;
};

struct GdlDefinitions {
  std::vector<PredicateDef> predicates;
  std::vector<TheoremDef> theorems;
};

class KnowledgeBase {
 public:
  /// Knowledge base holding only the built-in predicates.
  KnowledgeBase();

  /// Adds validated definitions (see parse_gdl).
  void add(GdlDefinitions defs);

  const PredicateDef* predicate(const std::string& name) const;
  const TheoremDef* theorem(const std::string& name) const;
  const PredicateDef* attribution_by_sym(const std::string& sym) const;

  const std::map<std::string, PredicateDef>& predicates() const { return predicates_; }
  const std::vector<TheoremDef>& theorems() const { return theorems_; }

 private:
  std::map<std::string, PredicateDef> predicates_;
  std::vector<TheoremDef> theorems_;
  std::map<std::string, std::size_t> theorem_index_;
  std::map<std::string, std::string> sym_index_;
};

/// Parses GDL text. References are validated against the built-in
/// predicates plus the definitions in the text itself.
GdlDefinitions parse_gdl(const std::string& text);

/// Parses several GDL sources as one unit, so definitions may reference
/// each other across files. Errors name the source.
GdlDefinitions parse_gdl_sources(const std::vector<std::pair<std::string, std::string>>& sources);

/// Loads a .gdl file, or every .gdl file of a directory in name order.
KnowledgeBase load_kb(const std::filesystem::path& path);

/// Parses a premise expression ("Collinear(AMB)&(A|~B)").
GplExpr parse_gpl(const std::string& text);

/// Parses "Equal(a,b)" or a relation atom.
Fact parse_fact(const std::string& text);

/// Parses "Pred(G1,G2)" into an atom (no predicate validation).
RelAtom parse_rel_atom(const std::string& text);

/// All items equivalent to item under the predicate's multi rule,
/// item first, no duplicates.
std::vector<std::string> multi_items(const PredicateDef& def, const std::string& item);

/// Minimum of multi_items.
std::string canonical_item(const PredicateDef& def, const std::string& item);

/// Splits a flat item into the point groups the predicate is written with.
std::vector<std::string> split_groups(const PredicateDef& def, const std::string& item);

/// Substitutes points for variables letter by letter.
std::string instantiate(const std::string& vars, const std::map<char, char>& binding);

}  // namespace geoform
