#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "geoform/gpl.hpp"
#include "geoform/kb.hpp"
#include "geoform/poly.hpp"

namespace geoform {

using Clock = std::chrono::steady_clock;

/// Maps attribute terms to symbols ("ll_AB") and back. Stateless apart from
/// the knowledge base, so it is cheap to copy.
class SymbolTable {
 public:
  explicit SymbolTable(const KnowledgeBase* kb = nullptr) : kb_(kb) {}

  /// Symbol of attribution(points); the same for every multi-equivalent
  /// point order. Throws std::invalid_argument for unknown attributions.
  std::string symbol(const std::string& attribution, const std::string& points) const;

  /// Attribution and points of an attribute symbol; nullopt for free symbols.
  std::optional<std::pair<const PredicateDef*, std::string>> decode(const std::string& sym) const;

  SymbolDomain domain(const std::string& sym) const;

  /// Expression the symbol stands for (attribute term or free symbol).
  Expr expr_of(const std::string& sym) const;

 private:
  const KnowledgeBase* kb_;
};

struct StoredEquation {
  Poly poly;
  int source = -1;  // condition id
  std::string key;  // text of the monic form
};

/// Problem equations with provenance. Duplicates (equal monic forms) and
/// zero equations are ignored.
class EquationSet {
 public:
  /// Returns false when the equation was zero or already present.
  bool add(const Poly& p, int source);
  bool contains(const Poly& p) const;
  /// Drops equations whose source id is >= first_removed.
  void truncate(int first_removed);

  const std::vector<StoredEquation>& equations() const { return eqs_; }
  std::size_t size() const { return eqs_.size(); }
  std::uint64_t version() const { return version_; }

 private:
  std::vector<StoredEquation> eqs_;
  std::set<std::string> keys_;
  std::uint64_t version_ = 0;
};

/// An equation in a working system, with the condition ids it rests on.
struct EqRow {
  Poly poly;
  Support premises;
};

struct KnownValue {
  Number value;
  Support premises;
};

using DomainFn = std::function<SymbolDomain(const std::string&)>;

/// Greedy minimum-dependency selection.
///
/// Starts from the target equation and repeatedly adds the equation whose
/// unknowns intersect the current unknown set, minimising new unknowns and
/// then maximising shared ones (ties: lowest index, or seeded random).
class MinDepSelector {
 public:
  MinDepSelector(const Poly& target, const std::vector<EqRow>* equations, bool randomize = false,
                 std::uint64_t seed = 0);

  /// Adds one equation; false when no candidate qualifies.
  bool step();
  /// True when the system is square: |M_t| == t.
  bool square() const { return unknowns_.size() == selected_.size() + 1; }
  /// Indices into the equation list, in selection order.
  const std::vector<std::size_t>& selected() const { return selected_; }
  const std::set<std::string>& unknowns() const { return unknowns_; }

 private:
  const std::vector<EqRow>* eqs_;
  std::vector<std::set<std::string>> eq_symbols_;
  std::vector<bool> used_;
  std::set<std::string> unknowns_;
  std::vector<std::size_t> selected_;
  bool randomize_;
  std::uint64_t rng_state_;
};

/// Name of the fresh target symbol g.
inline const std::string kTargetSymbol = "_g";

/// Runs the selector to its stopping rule (square system or no candidate)
/// and returns the chosen indices.
std::vector<std::size_t> select_min_dep(const Poly& target_expr, const std::vector<EqRow>& equations,
                                        bool randomize = false, std::uint64_t seed = 0);

struct SolveBudget {
  std::optional<Clock::time_point> deadline;
  bool expired() const { return deadline && Clock::now() > *deadline; }
};

/// Solves a small system: substitution of single-unknown equations, linear
/// elimination over monomials, table inversion of trigonometric atoms and a
/// bracketed numeric fallback. Returns every symbol it determines.
std::map<std::string, KnownValue> solve_system(const std::vector<EqRow>& rows, const DomainFn& domain,
                                               const SolveBudget& budget = {});

/// Roots of p = 0 in one unknown x that lie in the domain; only returned
/// when unique.
std::optional<Number> solve_single(const Poly& p, const std::string& x, SymbolDomain domain);

struct SolveResult {
  std::optional<Number> value;
  Support premises;
  bool timed_out = false;
  /// Equations (reduced rows) used, target first.
  std::size_t system_size = 0;
};

struct AlgebraOptions {
  bool randomize_ties = false;
  std::uint64_t seed = 0;
  std::chrono::milliseconds call_budget{2000};
};

/// Per-problem algebra state: equation set, value cache and memo.
class Algebra {
 public:
  explicit Algebra(DomainFn domain = {}) : domain_(std::move(domain)) {}

  EquationSet& equations() { return eqs_; }
  const EquationSet& equations() const { return eqs_; }
  void set_options(const AlgebraOptions& o) { options_ = o; }
  const AlgebraOptions& options() const { return options_; }
  void set_domain(DomainFn d) { domain_ = std::move(d); }

  bool add_equation(const Poly& p, int source) { return eqs_.add(p, source); }

  /// Value of expression a: builds g - a, selects its minimum-dependency
  /// equations and solves them. Empty value when undetermined.
  SolveResult solve_target(const Poly& a, const std::optional<Clock::time_point>& deadline = {});

  /// True iff expr is determined and equal to zero.
  bool evaluate_constraint(const Poly& expr, Support* premises = nullptr,
                           const std::optional<Clock::time_point>& deadline = {});

  /// Unknown symbols reachable from expression a through the equation set
  /// (after known values are substituted), a's own unknowns included.
  std::set<std::string> dependency_symbols(const Poly& a) const;

  /// Drops equations from conditions >= first_removed and clears caches.
  void truncate(int first_removed);

  const std::map<std::string, KnownValue>& known_values() const { return values_; }
  std::size_t timeouts() const { return timeouts_; }

 private:
  EquationSet eqs_;
  DomainFn domain_;
  AlgebraOptions options_;
  std::map<std::string, KnownValue> values_;
  std::map<std::string, std::uint64_t> failed_;  // target key -> state stamp
  std::uint64_t values_version_ = 0;
  std::size_t timeouts_ = 0;

  std::vector<EqRow> reduced_rows() const;
  std::uint64_t stamp() const { return eqs_.version() * 1000003ULL + values_version_; }
  void remember(const std::map<std::string, KnownValue>& found);
  SymbolDomain domain_of(const std::string& s) const;
};

/// Values of known symbols substituted into p, with the premises used.
Poly substitute_known(const Poly& p, const std::map<std::string, KnownValue>& values, Support* premises);

}  // namespace geoform
