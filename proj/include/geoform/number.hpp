#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

namespace geoform {

using Rational = mpq_class;
using Integer = mpz_class;

/// Absolute tolerance used whenever a value has left exact arithmetic.
inline constexpr double kNumericTolerance = 1e-10;

Rational parse_rational(const std::string& text);
std::string rational_to_string(const Rational& q);

/// A real number kept exact as long as possible.
///
/// Exact values live in a quadratic field: a + b*sqrt(r) with rational a, b
/// and a square-free integer r > 1 (r is 1 and b is 0 for plain rationals).
/// Operations that leave the field (mixing two different radicands, roots of
/// non-rationals, transcendental functions away from table angles) fall back
/// to a double, and the value is flagged approximate from then on.
class Number {
 public:
  Number() = default;
  Number(long v) : a_(v) {}  // NOLINT(google-explicit-constructor)
  Number(const Rational& q) : a_(q) {}  // NOLINT(google-explicit-constructor)

  static Number surd(const Rational& a, const Rational& b, const Integer& radicand);
  static Number approx(double v);

  bool exact() const { return !approx_.has_value(); }
  bool rational() const { return exact() && b_ == 0; }
  const Rational& rational_part() const { return a_; }
  const Rational& surd_coefficient() const { return b_; }
  const Integer& radicand() const { return r_; }

  double to_double() const;

  /// Exact sign for exact values; tolerance-based for approximate ones.
  int sign() const;
  bool is_zero() const { return sign() == 0; }

  Number operator-() const;
  friend Number operator+(const Number& x, const Number& y);
  friend Number operator-(const Number& x, const Number& y);
  friend Number operator*(const Number& x, const Number& y);
  /// Division by zero throws std::domain_error.
  friend Number operator/(const Number& x, const Number& y);
  Number& operator+=(const Number& y) { return *this = *this + y; }
  Number& operator-=(const Number& y) { return *this = *this - y; }
  Number& operator*=(const Number& y) { return *this = *this * y; }

  /// Equality: exact when both sides are exact, otherwise within tolerance.
  friend bool operator==(const Number& x, const Number& y);
  friend bool operator!=(const Number& x, const Number& y) { return !(x == y); }
  /// Total order used for sorting/dedup (exact values compare exactly).
  friend bool operator<(const Number& x, const Number& y);

  Number pow(long exponent) const;
  /// Principal square root; nullopt for negative input.
  std::optional<Number> sqrt() const;

  /// Compact formula text, e.g. "3/2", "1+2*sqrt(3)", "0.7071067812".
  std::string to_string() const;

 private:
  Rational a_{0};
  Rational b_{0};
  Integer r_{1};
  std::optional<double> approx_;

  void normalize();
};

/// Largest square s^2 dividing n (n > 0): returns (s, n / s^2). nullopt if n
/// is too large to factor reliably.
std::optional<std::pair<Integer, Integer>> split_square(const Integer& n);

/// Exact sine/cosine/tangent for whole-degree angles that are multiples of
/// 30 or 45 degrees; nullopt otherwise.
std::optional<Number> exact_sin_deg(const Rational& degrees);
std::optional<Number> exact_cos_deg(const Rational& degrees);
std::optional<Number> exact_tan_deg(const Rational& degrees);

Number sin_deg(const Number& degrees);
Number cos_deg(const Number& degrees);
/// nullopt where tan is undefined (90 degrees).
std::optional<Number> tan_deg(const Number& degrees);

}  // namespace geoform
