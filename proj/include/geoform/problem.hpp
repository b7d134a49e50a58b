#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "geoform/algebra.hpp"
#include "geoform/cdl.hpp"
#include "geoform/gpl.hpp"
#include "geoform/kb.hpp"
#include "geoform/poly.hpp"

namespace geoform {

inline const std::string kPrerequisite = "prerequisite";
inline const std::string kExtended = "extended";

/// A stored fact. Relation conditions carry points; equations carry a poly.
struct Condition {
  int id = 0;
  std::string predicate;  // relation predicate, or "Equation"
  std::string item;       // points, as first added
  Poly equation;
  Support premises;
  std::string theorem;

  bool is_equation() const { return predicate == "Equation"; }
};

/// Raised when a problem cannot be initialised or a statement is rejected.
/// statement() names the offending CDL text when there is one.
class ProblemError : public std::runtime_error {
 public:
  ProblemError(const std::string& message, std::string statement = {})
      : std::runtime_error(statement.empty() ? message : message + ": " + statement),
        statement_(std::move(statement)) {}
  const std::string& statement() const { return statement_; }

 private:
  std::string statement_;
};

/// Which validity check rejected a fact.
enum class CheckFailure { None, Unknown, FvCheck, EeCheck };

struct AddResult {
  std::optional<int> id;  // absent for duplicates and rejections
  CheckFailure failure = CheckFailure::None;
  std::string message;
};

enum class GoalStatus { Unsolved, Solved };

struct Goal {
  GoalKind kind = GoalKind::Value;
  std::string text;  // formal goal statement
  Poly expr;         // Value: the expression; Equal: lhs - rhs
  RelAtom relation;  // Relation goals
  GoalStatus status = GoalStatus::Unsolved;
  std::optional<Number> answer;
  Support premises;
  std::string diagnostic;
};

/// Theorem reference as used in theorem_seqs and hyperedge labels:
/// "name", "name(2)", "name(2,AB,CD)" or "name(AB,CD)".
struct TheoremCall {
  std::string name;
  std::optional<int> branch;        // 1-based
  std::vector<std::string> groups;  // explicit binding of the header vars

  std::string text() const;
};

/// Throws ParseError on malformed text.
TheoremCall parse_theorem_call(const std::string& text);

struct ApplyReport {
  std::vector<int> added;
  std::size_t bindings = 0;  // premise matches found
  bool goal_solved = false;
};

/// One problem's state: conditions with provenance, relation indexes,
/// algebra, and the goal. Copyable; copies are independent.
class Problem {
 public:
  /// Parses and ingests the record. Throws ProblemError (with the failing
  /// statement) or ParseError.
  Problem(const KnowledgeBase& kb, const ProblemRecord& record, const AlgebraOptions& options = {});

  const KnowledgeBase& kb() const { return *kb_; }
  const ProblemRecord& record() const { return record_; }
  const std::vector<Condition>& conditions() const { return conds_; }
  const std::string& points() const { return points_; }
  const Goal& goal() const { return goal_; }
  Algebra& algebra() { return algebra_; }
  const Algebra& algebra() const { return algebra_; }
  const SymbolTable& symbols() const { return syms_; }
  std::size_t size() const { return conds_.size(); }

  /// Relation fact, after fv/ee checks; duplicates (any multi form) are absent.
  AddResult add_condition(const std::string& predicate, const std::string& item, const Support& premises,
                          const std::string& theorem);
  /// Equation fact p = 0; duplicates (same monic form) are absent.
  AddResult add_equation(const Poly& p, const Support& premises, const std::string& theorem);

  /// Applies extend rules of pending conditions to a fixpoint.
  int auto_extend();

  /// Re-checks the goal; returns true when solved.
  bool check_goal(const std::optional<Clock::time_point>& deadline = {});

  /// Applies a theorem, or the single branch / binding named by call.
  /// Unknown theorem names and malformed bindings throw ProblemError.
  ApplyReport apply(const TheoremCall& call, const std::optional<Clock::time_point>& deadline = {});

  /// Theorem/branch pairs whose first reordered atom has a non-empty
  /// extension; labels "name" or "name(b)".
  std::vector<TheoremCall> applicable() const;

  /// Drops conditions with id >= length and resets the goal.
  void truncate(std::size_t length);

  bool has(const std::string& predicate, const std::string& item) const;
  std::optional<int> find(const std::string& predicate, const std::string& item) const;
  /// Stored items of predicate with the given number of points, every
  /// multi form included, each mapped to its condition id.
  const std::map<std::string, Support>& extension(const std::string& predicate, std::size_t arity) const;

  /// Symbol of an attribute term with concrete points; throws ProblemError
  /// when its ee_check fails.
  std::string attribute_symbol(const std::string& attribution, const std::string& points) const;
  Poly expr_poly(const Expr& e) const;

  /// Formal CDL text of a condition.
  std::string inverse_parse(const Condition& c) const;
  std::string inverse_parse(int id) const { return inverse_parse(conds_.at(static_cast<std::size_t>(id))); }

  /// Order-independent hash of the stored facts.
  std::uint64_t signature() const { return signature_; }

  /// Hypertree document: nodes, grouped edges and the goal.
  nlohmann::json export_hypertree() const;

  /// Ids that the goal's premises rest on, transitively, goal premises
  /// included; empty when unsolved.
  std::vector<int> goal_closure() const;

  std::vector<std::string> diagnostics() const { return diagnostics_; }

 private:
  const KnowledgeBase* kb_;
  ProblemRecord record_;
  SymbolTable syms_;
  std::string points_;
  std::vector<Condition> conds_;
  std::map<std::pair<std::string, std::size_t>, std::map<std::string, Support>> ext_;
  Algebra algebra_;
  Goal goal_;
  std::vector<int> pending_;
  std::uint64_t signature_ = 0;
  std::vector<std::string> diagnostics_;

  void init_construction(const std::vector<CdlStatement>& statements);
  void init_text(const std::string& text);
  void init_goal();
  void add_same_angle_equalities();
  void add_structure(const std::string& predicate, const std::string& item, const Support& premises,
                     const std::string& theorem);
  int store(Condition c);
  void index(const Condition& c);
  std::optional<CheckFailure> check_item(const PredicateDef& def, const std::string& item, std::string* why) const;
  Poly fact_equation(const Fact& f, const std::map<char, char>& binding) const;
};

/// Canonical key of a condition's fact (predicate plus canonical item, or
/// the monic equation); equal for multi-equivalent facts.
std::string fact_key(const KnowledgeBase& kb, const Condition& c);

/// Rebuilds a store from a hypertree document by applying its theorem
/// edges, in order, to a fresh problem.
Problem replay_hypertree(const KnowledgeBase& kb, const ProblemRecord& record, const nlohmann::json& doc);

/// Sorted fact keys of a store, for comparisons up to id relabelling.
std::vector<std::string> fact_keys(const Problem& p);

}  // namespace geoform
