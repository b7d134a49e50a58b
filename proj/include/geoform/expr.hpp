#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "geoform/number.hpp"

namespace geoform {

/// Thrown by every parser in the project. line/column are 1-based; 0 means
/// "not applicable" (e.g. a single-line CDL statement has no line number).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line = 0, int column = 0);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

enum class Op { Add, Sub, Mul, Div, Pow, Mod, Sqrt, Sin, Cos, Tan };

const char* op_name(Op op);

/// Expression tree for algebraic CDL/GDL terms.
///
/// Attribute terms keep their point groups as written ("ABC,DEF" -> {"ABC",
/// "DEF"}); inside theorem definitions the letters are point variables.
struct Expr {
  enum class Kind { Number, Free, Attr, Op };

  Kind kind = Kind::Number;
  Rational number{0};
  std::string name;                 // free symbol or attribution name
  std::vector<std::string> groups;  // attribute point groups
  Op op = Op::Add;
  std::vector<Expr> args;

  static Expr constant(const Rational& q);
  static Expr free(std::string symbol);
  static Expr attr(std::string attribution, std::vector<std::string> point_groups);
  static Expr apply(Op op, std::vector<Expr> args);

  /// Concatenated point groups of an attribute term.
  std::string points() const;

  friend bool operator==(const Expr&, const Expr&);
};

/// Parses prefix operator form ("Add(a,b,c)", "Sub(LengthOfLine(AB),4)")
/// and infix arithmetic ("2*x+10", "1/2"). Constant subtrees are folded to
/// exact rationals. Any CamelCase call that is not an operator becomes an
/// attribute term; callers validate attribution names.
Expr parse_expr(const std::string& text);

/// Canonical prefix-form rendering, re-parseable by parse_expr.
std::string to_text(const Expr& e);

/// Visits every attribute term, pre-order.
template <typename F>
void for_each_attr(const Expr& e, F&& f) {
  if (e.kind == Expr::Kind::Attr) f(e);
  for (const auto& a : e.args) for_each_attr(a, f);
}

}  // namespace geoform
