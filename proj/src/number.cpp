#include "geoform/number.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace geoform {

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty number");
  std::size_t dot = text.find('.');
  if (dot == std::string::npos) {
    Rational q(text, 10);
    q.canonicalize();
    return q;
  }
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  std::size_t decimals = text.size() - dot - 1;
  if (digits.empty() || digits == "-") throw std::invalid_argument("malformed number: " + text);
  Integer num(digits, 10);
  Integer den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, decimals);
  Rational q(num, den);
  q.canonicalize();
  return q;
}

std::string rational_to_string(const Rational& q) { return q.get_str(); }

std::optional<std::pair<Integer, Integer>> split_square(const Integer& n) {
  if (n <= 0) return std::nullopt;
  Integer rest = n;
  Integer square_root = 1;
  Integer square_free = 1;
  constexpr unsigned long kTrialLimit = 1'000'000;
  unsigned long p = 2;
  for (; p <= kTrialLimit; p = (p == 2 ? 3 : p + 2)) {
    if (Integer(p) * p > rest) break;
    int multiplicity = 0;
    while (mpz_divisible_ui_p(rest.get_mpz_t(), p) != 0) {
      rest /= p;
      ++multiplicity;
    }
    for (int i = 0; i < multiplicity / 2; ++i) square_root *= p;
    if (multiplicity % 2 == 1) square_free *= p;
  }
  if (p > kTrialLimit && rest >= Integer("1000000000000")) {
    // rest may still hide a square of a large prime.
    if (mpz_perfect_square_p(rest.get_mpz_t()) == 0) return std::nullopt;
    Integer s;
    mpz_sqrt(s.get_mpz_t(), rest.get_mpz_t());
    return std::make_pair(square_root * s, square_free);
  }
  // rest is 1 or prime here.
  return std::make_pair(square_root, square_free * rest);
}

Number Number::surd(const Rational& a, const Rational& b, const Integer& radicand) {
  Number n;
  if (radicand <= 0) throw std::domain_error("surd radicand must be positive");
  auto split = split_square(radicand);
  if (!split) return approx(a.get_d() + b.get_d() * std::sqrt(radicand.get_d()));
  n.a_ = a;
  n.b_ = b * split->first;
  n.r_ = split->second;
  n.normalize();
  return n;
}

Number Number::approx(double v) {
  Number n;
  n.approx_ = v;
  return n;
}

void Number::normalize() {
  if (approx_) {
    a_ = 0;
    b_ = 0;
    r_ = 1;
    return;
  }
  if (r_ == 1) {
    a_ += b_;
    b_ = 0;
  }
  if (b_ == 0) r_ = 1;
}

double Number::to_double() const {
  if (approx_) return *approx_;
  if (b_ == 0) return a_.get_d();
  return a_.get_d() + b_.get_d() * std::sqrt(r_.get_d());
}

int Number::sign() const {
  if (approx_) {
    if (std::fabs(*approx_) < kNumericTolerance) return 0;
    return *approx_ > 0 ? 1 : -1;
  }
  int sa = sgn(a_);
  int sb = sgn(b_);
  if (sb == 0) return sa;
  if (sa == 0 || sa == sb) return sb;
  Rational lhs = a_ * a_;
  Rational rhs = b_ * b_ * Rational(r_);
  return lhs > rhs ? sa : sb;
}

Number Number::operator-() const {
  if (approx_) return approx(-*approx_);
  Number n = *this;
  n.a_ = -a_;
  n.b_ = -b_;
  return n;
}

Number operator+(const Number& x, const Number& y) {
  if (!x.exact() || !y.exact()) return Number::approx(x.to_double() + y.to_double());
  Number n;
  if (x.b_ == 0 || y.b_ == 0 || x.r_ == y.r_) {
    n.a_ = x.a_ + y.a_;
    n.b_ = x.b_ + y.b_;
    n.r_ = x.b_ == 0 ? y.r_ : x.r_;
    n.normalize();
    return n;
  }
  return Number::approx(x.to_double() + y.to_double());
}

Number operator-(const Number& x, const Number& y) { return x + (-y); }

Number operator*(const Number& x, const Number& y) {
  if (!x.exact() || !y.exact()) return Number::approx(x.to_double() * y.to_double());
  Number n;
  if (x.b_ == 0) {
    n.a_ = x.a_ * y.a_;
    n.b_ = x.a_ * y.b_;
    n.r_ = y.r_;
  } else if (y.b_ == 0) {
    n.a_ = y.a_ * x.a_;
    n.b_ = y.a_ * x.b_;
    n.r_ = x.r_;
  } else if (x.r_ == y.r_) {
    n.a_ = x.a_ * y.a_ + x.b_ * y.b_ * Rational(x.r_);
    n.b_ = x.a_ * y.b_ + x.b_ * y.a_;
    n.r_ = x.r_;
  } else if (x.a_ == 0 && y.a_ == 0) {
    return Number::surd(0, x.b_ * y.b_, x.r_ * y.r_);
  } else {
    return Number::approx(x.to_double() * y.to_double());
  }
  n.normalize();
  return n;
}

Number operator/(const Number& x, const Number& y) {
  if (y.is_zero()) throw std::domain_error("division by zero");
  if (!x.exact() || !y.exact()) return Number::approx(x.to_double() / y.to_double());
  if (y.b_ == 0) {
    Number n = x;
    n.a_ /= y.a_;
    n.b_ /= y.a_;
    n.normalize();
    return n;
  }
  Rational den = y.a_ * y.a_ - y.b_ * y.b_ * Rational(y.r_);
  Number conj = Number::surd(y.a_ / den, -y.b_ / den, y.r_);
  return x * conj;
}

bool operator==(const Number& x, const Number& y) {
  if (x.exact() && y.exact()) return x.a_ == y.a_ && x.b_ == y.b_ && x.r_ == y.r_;
  double dx = x.to_double();
  double dy = y.to_double();
  double scale = std::max({1.0, std::fabs(dx), std::fabs(dy)});
  return std::fabs(dx - dy) <= kNumericTolerance * scale;
}

bool operator<(const Number& x, const Number& y) {
  if (x == y) return false;
  if (x.exact() && y.exact()) return (x - y).sign() < 0;
  return x.to_double() < y.to_double();
}

Number Number::pow(long exponent) const {
  if (exponent < 0) return Number(1) / pow(-exponent);
  Number result(1);
  Number base = *this;
  while (exponent > 0) {
    if (exponent & 1) result *= base;
    exponent >>= 1;
    if (exponent > 0) base *= base;
  }
  return result;
}

std::optional<Number> Number::sqrt() const {
  int s = sign();
  if (s < 0) return std::nullopt;
  if (s == 0) return Number(0);
  if (!rational()) return approx(std::sqrt(to_double()));
  Integer num = a_.get_num();
  Integer den = a_.get_den();
  Integer prod = num * den;
  auto split = split_square(prod);
  if (!split) return approx(std::sqrt(to_double()));
  Rational coef(split->first, den);
  coef.canonicalize();
  if (split->second == 1) return Number(coef);
  return surd(0, coef, split->second);
}

std::string Number::to_string() const {
  if (approx_) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", *approx_);
    return buf;
  }
  if (b_ == 0) return rational_to_string(a_);
  std::string root = "sqrt(" + r_.get_str() + ")";
  std::string surd_part;
  if (b_ == 1) {
    surd_part = root;
  } else if (b_ == -1) {
    surd_part = "-" + root;
  } else {
    surd_part = rational_to_string(b_) + "*" + root;
  }
  if (a_ == 0) return surd_part;
  std::string out = rational_to_string(a_);
  if (surd_part[0] != '-') out += "+";
  return out + surd_part;
}

namespace {

// sin of k degrees for k in [0, 90] on the exact table, else nullopt.
std::optional<Number> first_quadrant_sin(long k) {
  switch (k) {
    case 0: return Number(0);
    case 30: return Number(Rational(1, 2));
    case 45: return Number::surd(0, Rational(1, 2), 2);
    case 60: return Number::surd(0, Rational(1, 2), 3);
    case 90: return Number(1);
    default: return std::nullopt;
  }
}

std::optional<long> whole_degrees(const Rational& degrees) {
  if (degrees.get_den() != 1) return std::nullopt;
  if (!degrees.get_num().fits_slong_p()) return std::nullopt;
  long d = degrees.get_num().get_si() % 360;
  if (d < 0) d += 360;
  return d;
}

}  // namespace

std::optional<Number> exact_sin_deg(const Rational& degrees) {
  auto d = whole_degrees(degrees);
  if (!d) return std::nullopt;
  long k = *d;
  if (k <= 90) return first_quadrant_sin(k);
  if (k <= 180) return first_quadrant_sin(180 - k);
  auto v = k <= 270 ? first_quadrant_sin(k - 180) : first_quadrant_sin(360 - k);
  if (!v) return std::nullopt;
  return -*v;
}

std::optional<Number> exact_cos_deg(const Rational& degrees) { return exact_sin_deg(degrees + 90); }

std::optional<Number> exact_tan_deg(const Rational& degrees) {
  auto s = exact_sin_deg(degrees);
  auto c = exact_cos_deg(degrees);
  if (!s || !c || c->is_zero()) return std::nullopt;
  return *s / *c;
}

Number sin_deg(const Number& degrees) {
  if (degrees.rational()) {
    if (auto v = exact_sin_deg(degrees.rational_part())) return *v;
  }
  return Number::approx(std::sin(degrees.to_double() * std::numbers::pi / 180.0));
}

Number cos_deg(const Number& degrees) {
  if (degrees.rational()) {
    if (auto v = exact_cos_deg(degrees.rational_part())) return *v;
  }
  return Number::approx(std::cos(degrees.to_double() * std::numbers::pi / 180.0));
}

std::optional<Number> tan_deg(const Number& degrees) {
  Number c = cos_deg(degrees);
  if (c.is_zero()) return std::nullopt;
  return sin_deg(degrees) / c;
}

}  // namespace geoform
