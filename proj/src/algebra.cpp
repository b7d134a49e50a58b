#include "geoform/algebra.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace geoform {

// ---------------------------------------------------------------------------
// Symbols

std::string SymbolTable::symbol(const std::string& attribution, const std::string& points) const {
  const PredicateDef* def = kb_ ? kb_->predicate(attribution) : nullptr;
  if (!def || def->kind != PredicateKind::Attribution) {
    throw std::invalid_argument("unknown attribution " + attribution);
  }
  if (points.size() != def->arity()) {
    throw std::invalid_argument("wrong number of points for " + attribution + ": " + points);
  }
  return def->sym + "_" + canonical_item(*def, points);
}

std::optional<std::pair<const PredicateDef*, std::string>> SymbolTable::decode(const std::string& sym) const {
  if (!kb_) return std::nullopt;
  std::size_t us = sym.find('_');
  if (us == std::string::npos || us == 0) return std::nullopt;
  const PredicateDef* def = kb_->attribution_by_sym(sym.substr(0, us));
  if (!def) return std::nullopt;
  std::string points = sym.substr(us + 1);
  if (points.size() != def->arity()) return std::nullopt;
  for (char c : points) {
    if (!std::isupper(static_cast<unsigned char>(c))) return std::nullopt;
  }
  return std::make_pair(def, points);
}

SymbolDomain SymbolTable::domain(const std::string& sym) const {
  if (auto d = decode(sym)) return d->first->domain;
  return SymbolDomain::Real;
}

Expr SymbolTable::expr_of(const std::string& sym) const {
  if (auto d = decode(sym)) return Expr::attr(d->first->name, split_groups(*d->first, d->second));
  return Expr::free(sym);
}

// ---------------------------------------------------------------------------
// Equation set

bool EquationSet::add(const Poly& p, int source) {
  if (p.is_zero()) return false;
  std::string key = p.monic().to_string();
  if (!keys_.insert(key).second) return false;
  eqs_.push_back(StoredEquation{p, source, key});
  ++version_;
  return true;
}

bool EquationSet::contains(const Poly& p) const { return !p.is_zero() && keys_.count(p.monic().to_string()) > 0; }

void EquationSet::truncate(int first_removed) {
  auto keep_end = std::stable_partition(eqs_.begin(), eqs_.end(),
                                        [&](const StoredEquation& e) { return e.source < first_removed; });
  if (keep_end == eqs_.end()) return;
  eqs_.erase(keep_end, eqs_.end());
  keys_.clear();
  for (const auto& e : eqs_) keys_.insert(e.key);
  ++version_;
}

// ---------------------------------------------------------------------------
// Minimum dependency selection

namespace {

std::uint64_t splitmix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

MinDepSelector::MinDepSelector(const Poly& target, const std::vector<EqRow>* equations, bool randomize,
                               std::uint64_t seed)
    : eqs_(equations), used_(equations->size(), false), randomize_(randomize), rng_state_(seed) {
  unknowns_ = target.symbols();
  unknowns_.insert(kTargetSymbol);
  eq_symbols_.reserve(equations->size());
  for (const auto& e : *equations) eq_symbols_.push_back(e.poly.symbols());
}

bool MinDepSelector::step() {
  std::vector<std::size_t> best;
  std::size_t best_new = 0;
  std::size_t best_shared = 0;
  for (std::size_t i = 0; i < eq_symbols_.size(); ++i) {
    if (used_[i]) continue;
    std::size_t shared = 0;
    for (const auto& s : eq_symbols_[i]) shared += unknowns_.count(s);
    if (shared == 0) continue;
    std::size_t fresh = eq_symbols_[i].size() - shared;
    bool better = best.empty() || fresh < best_new || (fresh == best_new && shared > best_shared);
    if (better) {
      best = {i};
      best_new = fresh;
      best_shared = shared;
    } else if (fresh == best_new && shared == best_shared) {
      best.push_back(i);
    }
  }
  if (best.empty()) return false;
  std::size_t chosen = best.front();
  if (randomize_ && best.size() > 1) chosen = best[splitmix(rng_state_) % best.size()];
  used_[chosen] = true;
  selected_.push_back(chosen);
  unknowns_.insert(eq_symbols_[chosen].begin(), eq_symbols_[chosen].end());
  return true;
}

std::vector<std::size_t> select_min_dep(const Poly& target_expr, const std::vector<EqRow>& equations,
                                        bool randomize, std::uint64_t seed) {
  MinDepSelector sel(target_expr, &equations, randomize, seed);
  while (!sel.square() && sel.step()) {
  }
  return sel.selected();
}

// ---------------------------------------------------------------------------
// Solving

Poly substitute_known(const Poly& p, const std::map<std::string, KnownValue>& values, Support* premises) {
  if (values.empty()) return p;
  std::map<std::string, Number> used;
  for (const auto& s : p.symbols()) {
    auto it = values.find(s);
    if (it == values.end()) continue;
    used.emplace(s, it->second.value);
    if (premises) *premises = merge_support(*premises, it->second.premises);
  }
  if (used.empty()) return p;
  return p.substitute(used);
}

namespace {

bool in_domain(const Number& v, SymbolDomain d) {
  switch (d) {
    case SymbolDomain::Angle: return !(v < Number(0)) && !(Number(180) < v);
    case SymbolDomain::NonNegative: return !(v < Number(0));
    case SymbolDomain::Real: return true;
  }
  return true;
}

void push_unique(std::vector<Number>& out, const Number& v) {
  for (const auto& x : out) {
    if (x == v) return;
  }
  out.push_back(v);
}

std::optional<Number> unique(const std::vector<Number>& roots) {
  if (roots.size() != 1) return std::nullopt;
  return roots.front();
}

constexpr int kTableAngles[] = {0, 30, 45, 60, 90, 120, 135, 150, 180};

// Numeric roots of p(x) on the domain interval; exact when a nearby small
// rational verifies exactly.
// Floating-point value of p with x = t; nullopt if p mentions another
// symbol or leaves the reals.
std::optional<double> eval_at(const Poly& p, const std::string& x, double t) {
  constexpr double kDeg = std::numbers::pi / 180.0;
  double sum = 0.0;
  for (const auto& [m, c] : p.terms()) {
    double term = c.to_double();
    for (const auto& f : m) {
      const AtomData& a = *f.atom;
      double v = 0.0;
      if (a.kind == AtomKind::Symbol) {
        if (a.symbol != x) return std::nullopt;
        v = t;
      } else {
        std::vector<double> args;
        for (const auto& q : a.args) {
          auto r = eval_at(q, x, t);
          if (!r) return std::nullopt;
          args.push_back(*r);
        }
        switch (a.kind) {
          case AtomKind::Sqrt:
            if (args[0] < 0) return std::nullopt;
            v = std::sqrt(args[0]);
            break;
          case AtomKind::Sin: v = std::sin(args[0] * kDeg); break;
          case AtomKind::Cos: v = std::cos(args[0] * kDeg); break;
          case AtomKind::Tan: v = std::tan(args[0] * kDeg); break;
          case AtomKind::Inv: v = 1.0 / args[0]; break;
          case AtomKind::Pow: v = std::pow(args[0], args[1]); break;
          case AtomKind::Mod: v = args[0] - args[1] * std::floor(args[0] / args[1]); break;
          case AtomKind::Symbol: break;
        }
      }
      term *= std::pow(v, f.exp);
    }
    sum += term;
  }
  if (!std::isfinite(sum)) return std::nullopt;
  return sum;
}

std::vector<Number> numeric_roots(const Poly& p, const std::string& x, SymbolDomain domain) {
  double lo = -1e4;
  double hi = 1e4;
  int samples = 8000;
  if (domain == SymbolDomain::Angle) {
    lo = 0;
    hi = 180;
    samples = 1800;
  } else if (domain == SymbolDomain::NonNegative) {
    lo = 0;
    samples = 4000;
  }
  auto f = [&](double t) { return eval_at(p, x, t); };
  std::vector<double> raw;
  double step = (hi - lo) / samples;
  std::optional<double> prev = f(lo);
  if (prev && std::fabs(*prev) < 1e-12) raw.push_back(lo);
  for (int i = 1; i <= samples; ++i) {
    double t = lo + step * i;
    auto cur = f(t);
    if (cur && std::fabs(*cur) < 1e-12) {
      raw.push_back(t);
    } else if (prev && cur && (*prev < 0) != (*cur < 0) && std::fabs(*prev) >= 1e-12) {
      double a = t - step;
      double b = t;
      double fa = *prev;
      for (int k = 0; k < 200 && b - a > 1e-14 * std::max(1.0, std::fabs(a)); ++k) {
        double m = 0.5 * (a + b);
        auto fm = f(m);
        if (!fm) break;
        if ((*fm < 0) == (fa < 0)) {
          a = m;
          fa = *fm;
        } else {
          b = m;
        }
      }
      raw.push_back(0.5 * (a + b));
    }
    prev = cur;
  }
  std::vector<Number> out;
  for (double r : raw) {
    Number v = Number::approx(r);
    // Snap to a small rational when it satisfies p exactly.
    for (long den : {1L, 2L, 3L, 4L, 5L, 6L, 8L, 10L, 12L}) {
      double scaled = r * static_cast<double>(den);
      double rounded = std::round(scaled);
      if (std::fabs(scaled - rounded) < 1e-7) {
        Number exact(Rational(static_cast<long>(rounded), den));
        if (p.substitute({{x, exact}}).is_zero()) {
          v = exact;
          break;
        }
      }
    }
    push_unique(out, v);
  }
  return out;
}

std::optional<Number> table_value(AtomKind kind, int deg) {
  switch (kind) {
    case AtomKind::Sin: return exact_sin_deg(Rational(deg));
    case AtomKind::Cos: return exact_cos_deg(Rational(deg));
    case AtomKind::Tan: return exact_tan_deg(Rational(deg));
    default: return std::nullopt;
  }
}

}  // namespace

std::optional<Number> solve_single(const Poly& p, const std::string& x, SymbolDomain domain) {
  std::map<int, Number> coeffs;
  bool pure = true;
  for (const auto& [m, c] : p.terms()) {
    if (m.empty()) {
      coeffs[0] += c;
    } else if (m.size() == 1 && m[0].atom->kind == AtomKind::Symbol && m[0].atom->symbol == x) {
      coeffs[m[0].exp] += c;
    } else {
      pure = false;
    }
  }
  if (pure) {
    if (coeffs.empty()) return std::nullopt;
    int lo = std::min(0, coeffs.begin()->first);
    bool excludes_zero = lo < 0;
    std::map<int, Number> shifted;
    for (const auto& [e, c] : coeffs) {
      if (!c.is_zero()) shifted[e - lo] = c;
    }
    if (shifted.empty()) return std::nullopt;
    int degree = shifted.rbegin()->first;
    auto coef = [&](int e) { return shifted.count(e) ? shifted[e] : Number(0); };
    std::vector<Number> roots;
    auto accept = [&](const Number& r) {
      if (excludes_zero && r.is_zero()) return;
      if (in_domain(r, domain)) push_unique(roots, r);
    };
    if (degree == 0) return std::nullopt;
    if (degree == 1) {
      accept(-coef(0) / coef(1));
      return unique(roots);
    }
    if (degree == 2) {
      Number a = coef(2);
      Number b = coef(1);
      Number c = coef(0);
      Number disc = b * b - Number(4) * a * c;
      auto sq = disc.sqrt();
      if (!sq) return std::nullopt;
      accept((-b + *sq) / (Number(2) * a));
      accept((-b - *sq) / (Number(2) * a));
      return unique(roots);
    }
    if (shifted.size() == 2 && coef(0) != Number(0) && degree > 2) {
      // a*x^n + c = 0 with n > 2: real roots of -c/a.
      Number rhs = -coef(0) / coef(degree);
      double r = rhs.to_double();
      if (degree % 2 == 1) {
        accept(Number::approx(std::copysign(std::pow(std::fabs(r), 1.0 / degree), r)));
      } else if (r >= 0) {
        double root = std::pow(r, 1.0 / degree);
        accept(Number::approx(root));
        accept(Number::approx(-root));
      }
      for (auto& v : roots) {
        double rounded = std::round(v.to_double());
        if (std::fabs(v.to_double() - rounded) < 1e-9 &&
            p.substitute({{x, Number(static_cast<long>(rounded))}}).is_zero()) {
          v = Number(static_cast<long>(rounded));
        }
      }
      return unique(roots);
    }
    return unique(numeric_roots(p, x, domain));
  }

  // Linear in one function atom: c0 + c1 * F(arg) = 0.
  if (p.terms().size() <= 2) {
    const Monomial* fm = nullptr;
    Number c1;
    for (const auto& [m, c] : p.terms()) {
      if (!m.empty()) {
        fm = &m;
        c1 = c;
      }
    }
    if (fm && fm->size() == 1 && (*fm)[0].exp == 1 && (*fm)[0].atom->kind != AtomKind::Symbol) {
      const AtomData& f = *(*fm)[0].atom;
      Number v = -p.constant_term() / c1;
      switch (f.kind) {
        case AtomKind::Sqrt:
          if (v.sign() < 0) return std::nullopt;
          return solve_single(f.args[0] - Poly::constant(v * v), x, domain);
        case AtomKind::Inv:
          if (v.is_zero()) return std::nullopt;
          return solve_single(f.args[0] - Poly::constant(Number(1) / v), x, domain);
        case AtomKind::Sin:
        case AtomKind::Cos:
        case AtomKind::Tan: {
          std::vector<Number> roots;
          bool matched = false;
          for (int deg : kTableAngles) {
            auto tv = table_value(f.kind, deg);
            if (!tv || !(*tv == v)) continue;
            matched = true;
            if (auto r = solve_single(f.args[0] - Poly::constant(Number(deg)), x, domain)) push_unique(roots, *r);
          }
          if (matched) return unique(roots);
          break;
        }
        default: break;
      }
    }
  }
  return unique(numeric_roots(p, x, domain));
}

namespace {

bool simple_symbol(const Monomial& m) {
  return m.size() == 1 && m[0].exp == 1 && m[0].atom->kind == AtomKind::Symbol;
}

struct ColumnLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    bool sa = simple_symbol(a);
    bool sb = simple_symbol(b);
    if (sa != sb) return !sa;  // compound monomials first, so they get eliminated
    return MonomialLess{}(a, b);
  }
};

// Gaussian elimination over the monomials of the reduced rows. Adds values
// for symbols that end up alone in a row and appends derived equations for
// compound monomials. Returns whether anything new was learned.
bool eliminate(const std::vector<EqRow>& rows, std::map<std::string, KnownValue>& values,
               std::vector<EqRow>& work, std::set<std::string>& seen, const DomainFn& domain,
               const SolveBudget& budget) {
  std::vector<Monomial> cols;
  {
    std::set<Monomial, ColumnLess> all;
    for (const auto& r : rows) {
      for (const auto& [m, c] : r.poly.terms()) {
        if (!m.empty()) all.insert(m);
      }
    }
    cols.assign(all.begin(), all.end());
  }
  if (cols.empty()) return false;
  std::map<Monomial, std::size_t, MonomialLess> col_index;
  for (std::size_t i = 0; i < cols.size(); ++i) col_index[cols[i]] = i;
  const std::size_t n = cols.size();

  std::vector<std::vector<Number>> mat;
  std::vector<Support> prem;
  for (const auto& r : rows) {
    std::vector<Number> row(n + 1, Number(0));
    for (const auto& [m, c] : r.poly.terms()) row[m.empty() ? n : col_index[m]] = c;
    mat.push_back(std::move(row));
    prem.push_back(r.premises);
  }

  std::size_t rank = 0;
  for (std::size_t c = 0; c < n && rank < mat.size(); ++c) {
    if (budget.expired()) return false;
    std::size_t pivot = mat.size();
    for (std::size_t r = rank; r < mat.size(); ++r) {
      if (!mat[r][c].is_zero()) {
        if (pivot == mat.size() || (mat[r][c].exact() && !mat[pivot][c].exact())) pivot = r;
      }
    }
    if (pivot == mat.size()) continue;
    std::swap(mat[rank], mat[pivot]);
    std::swap(prem[rank], prem[pivot]);
    Number inv = Number(1) / mat[rank][c];
    for (auto& x : mat[rank]) x = x * inv;
    for (std::size_t r = 0; r < mat.size(); ++r) {
      if (r == rank || mat[r][c].is_zero()) continue;
      Number f = mat[r][c];
      for (std::size_t k = 0; k <= n; ++k) {
        if (!mat[rank][k].is_zero()) mat[r][k] = mat[r][k] - f * mat[rank][k];
      }
      mat[r][c] = Number(0);
      prem[r] = merge_support(prem[r], prem[rank]);
    }
    ++rank;
  }

  bool progress = false;
  for (std::size_t r = 0; r < rank; ++r) {
    std::size_t nonzero = 0;
    std::size_t col = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (!mat[r][k].is_zero()) {
        ++nonzero;
        col = k;
      }
    }
    if (nonzero != 1) continue;
    Number v = -mat[r][n] / mat[r][col];
    const Monomial& m = cols[col];
    if (m.size() == 1 && m[0].atom->kind == AtomKind::Symbol) {
      const std::string& x = m[0].atom->symbol;
      if (values.count(x)) continue;
      std::optional<Number> root;
      if (m[0].exp == 1) {
        if (in_domain(v, domain(x))) root = v;
      } else {
        root = solve_single(Poly::atom(m[0].atom, m[0].exp) - Poly::constant(v), x, domain(x));
      }
      if (root) {
        values[x] = KnownValue{*root, prem[r]};
        progress = true;
      }
      continue;
    }
    Poly derived = Poly::atom(m[0].atom, m[0].exp);
    for (std::size_t i = 1; i < m.size(); ++i) derived = derived * Poly::atom(m[i].atom, m[i].exp);
    derived = derived - Poly::constant(v);
    if (seen.insert(derived.monic().to_string()).second) {
      work.push_back(EqRow{derived, prem[r]});
      progress = true;
    }
  }
  return progress;
}

}  // namespace

std::map<std::string, KnownValue> solve_system(const std::vector<EqRow>& rows, const DomainFn& domain_fn,
                                               const SolveBudget& budget) {
  DomainFn domain = domain_fn ? domain_fn : [](const std::string&) { return SymbolDomain::Real; };
  std::map<std::string, KnownValue> values;
  std::vector<EqRow> work = rows;
  std::set<std::string> seen;
  for (const auto& r : rows) {
    if (!r.poly.is_zero()) seen.insert(r.poly.monic().to_string());
  }
  for (int iter = 0; iter < 256; ++iter) {
    if (budget.expired()) break;
    std::vector<EqRow> reduced;
    for (const auto& r : work) {
      Support p = r.premises;
      Poly q = substitute_known(r.poly, values, &p);
      if (q.is_constant()) continue;
      reduced.push_back(EqRow{std::move(q), std::move(p)});
    }
    if (reduced.empty()) break;
    bool progress = false;
    for (const auto& r : reduced) {
      auto syms = r.poly.symbols();
      if (syms.size() != 1) continue;
      const std::string& x = *syms.begin();
      if (values.count(x)) continue;
      if (auto v = solve_single(r.poly, x, domain(x))) {
        values[x] = KnownValue{*v, r.premises};
        progress = true;
      }
    }
    if (progress) continue;
    if (!eliminate(reduced, values, work, seen, domain, budget)) break;
  }
  return values;
}

// ---------------------------------------------------------------------------
// Algebra

SymbolDomain Algebra::domain_of(const std::string& s) const {
  if (s == kTargetSymbol) return SymbolDomain::Real;
  return domain_ ? domain_(s) : SymbolDomain::Real;
}

std::vector<EqRow> Algebra::reduced_rows() const {
  std::vector<EqRow> rows;
  rows.reserve(eqs_.size());
  for (const auto& e : eqs_.equations()) {
    Support prem{e.source};
    Poly p = substitute_known(e.poly, values_, &prem);
    if (p.is_constant()) continue;
    rows.push_back(EqRow{std::move(p), std::move(prem)});
  }
  return rows;
}

void Algebra::remember(const std::map<std::string, KnownValue>& found) {
  for (const auto& [s, v] : found) {
    if (s == kTargetSymbol || values_.count(s)) continue;
    values_.emplace(s, v);
    ++values_version_;
  }
}

SolveResult Algebra::solve_target(const Poly& a, const std::optional<Clock::time_point>& deadline) {
  SolveResult res;
  Support prem;
  Poly ra = substitute_known(a, values_, &prem);
  if (ra.is_constant()) {
    res.value = ra.constant_value();
    res.premises = prem;
    res.system_size = 1;
    return res;
  }
  std::string key = ra.to_string();
  auto memo = failed_.find(key);
  if (memo != failed_.end() && memo->second == stamp()) return res;

  SolveBudget budget;
  budget.deadline = Clock::now() + options_.call_budget;
  if (deadline && *deadline < *budget.deadline) budget.deadline = deadline;

  std::vector<EqRow> rows = reduced_rows();
  MinDepSelector sel(ra, &rows, options_.randomize_ties, options_.seed);
  auto domain = [this](const std::string& s) { return domain_of(s); };
  Poly target_row = Poly::symbol(kTargetSymbol) - ra;

  auto attempt = [&]() -> bool {
    std::vector<EqRow> sys;
    sys.push_back(EqRow{target_row, prem});
    for (auto i : sel.selected()) sys.push_back(rows[i]);
    auto found = solve_system(sys, domain, budget);
    auto g = found.find(kTargetSymbol);
    if (g == found.end()) return false;
    res.value = g->second.value;
    res.premises = g->second.premises;
    res.system_size = sys.size();
    remember(found);
    return true;
  };

  while (!sel.square() && sel.step()) {
  }
  if (attempt()) return res;
  // The square stop can be premature when selected equations depend on
  // each other; keep selecting and retry whenever the system is no longer
  // underdetermined by count, and once more when candidates run out.
  bool solved_last = true;
  while (!budget.expired()) {
    if (!sel.step()) {
      if (!solved_last && attempt()) return res;
      break;
    }
    solved_last = false;
    if (sel.unknowns().size() <= sel.selected().size() + 1) {
      solved_last = true;
      if (attempt()) return res;
    }
  }
  if (budget.expired()) {
    res.timed_out = true;
    ++timeouts_;
    return res;
  }
  failed_[key] = stamp();
  return res;
}

std::set<std::string> Algebra::dependency_symbols(const Poly& a) const {
  Poly ra = substitute_known(a, values_, nullptr);
  std::vector<EqRow> rows = reduced_rows();
  MinDepSelector sel(ra, &rows);
  while (sel.step()) {
  }
  std::set<std::string> out = sel.unknowns();
  out.erase(kTargetSymbol);
  return out;
}

bool Algebra::evaluate_constraint(const Poly& expr, Support* premises,
                                  const std::optional<Clock::time_point>& deadline) {
  SolveResult r = solve_target(expr, deadline);
  if (!r.value || !r.value->is_zero()) return false;
  if (premises) *premises = r.premises;
  return true;
}

void Algebra::truncate(int first_removed) {
  eqs_.truncate(first_removed);
  values_.clear();
  failed_.clear();
  ++values_version_;
}

}  // namespace geoform
