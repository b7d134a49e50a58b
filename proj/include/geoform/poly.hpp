#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "geoform/expr.hpp"
#include "geoform/number.hpp"

namespace geoform {

enum class AtomKind { Symbol, Sqrt, Sin, Cos, Tan, Inv, Pow, Mod };

struct AtomData;
/// Shared, immutable atom. Atoms compare by their canonical key.
using Atom = std::shared_ptr<const AtomData>;

struct Factor {
  Atom atom;
  int exp = 1;
};

/// Product of atom powers, sorted by atom key; empty = the constant monomial.
using Monomial = std::vector<Factor>;

struct MonomialLess {
  bool operator()(const Monomial& x, const Monomial& y) const;
};

/// Sparse polynomial over symbols and opaque function atoms (Sin(x), ...).
/// Coefficients are Numbers, so exact surds survive arithmetic.
class Poly {
 public:
  using Terms = std::map<Monomial, Number, MonomialLess>;

  Poly() = default;
  static Poly constant(const Number& c);
  static Poly symbol(const std::string& name);
  static Poly atom(const Atom& a, int exp = 1);

  /// Builds f(args); folds to a constant when the arguments are constant
  /// and the value is defined.
  static Poly func(AtomKind kind, const std::vector<Poly>& args);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Value of a constant poly (0 for the zero poly). Only valid if is_constant().
  Number constant_value() const;
  /// Coefficient of the constant monomial.
  Number constant_term() const;

  Poly operator-() const;
  friend Poly operator+(const Poly& x, const Poly& y);
  friend Poly operator-(const Poly& x, const Poly& y);
  friend Poly operator*(const Poly& x, const Poly& y);
  Poly scaled(const Number& c) const;
  Poly pow(long exponent) const;
  /// x / y; non-monomial divisors become an Inv atom.
  static Poly divide(const Poly& x, const Poly& y);

  /// Every symbol name, including those nested inside function atoms.
  std::set<std::string> symbols() const;

  /// Replaces known symbols by values and re-folds function atoms.
  Poly substitute(const std::map<std::string, Number>& values) const;

  /// Scaled so that the coefficient of the largest monomial is 1.
  Poly monic() const;

  /// Canonical text; equal polys have equal text.
  std::string to_string() const;

  friend bool operator==(const Poly& x, const Poly& y) { return x.to_string() == y.to_string(); }

 private:
  Terms terms_;
  void add_term(const Monomial& m, const Number& c);
};

struct AtomData {
  AtomKind kind = AtomKind::Symbol;
  std::string key;     // canonical text, e.g. "ll_AB" or "Sin(ma_ABC)"
  std::string symbol;  // Symbol atoms only
  std::vector<Poly> args;
};

std::string monomial_to_string(const Monomial& m);

/// Converts a parsed expression. attr_symbol maps an attribute term to its
/// symbol name (and may throw for unknown attributions).
Poly to_poly(const Expr& e, const std::function<std::string(const Expr&)>& attr_symbol);

/// Renders a poly back into an expression tree. sym_expr maps a symbol name
/// to the expression it stands for.
Expr to_expr(const Poly& p, const std::function<Expr(const std::string&)>& sym_expr);

/// Splits p into an Equal(lhs, rhs) pair: positive terms on the left,
/// negated negative terms on the right.
std::pair<Expr, Expr> to_equal_sides(const Poly& p,
                                     const std::function<Expr(const std::string&)>& sym_expr);

/// Expression for a number: rationals directly, surds as a+b*Sqrt(r).
Expr number_expr(const Number& n);

}  // namespace geoform
