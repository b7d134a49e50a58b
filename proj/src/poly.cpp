#include "geoform/poly.hpp"

#include <cmath>
#include <stdexcept>

namespace geoform {

bool MonomialLess::operator()(const Monomial& x, const Monomial& y) const {
  std::size_t n = std::min(x.size(), y.size());
  for (std::size_t i = 0; i < n; ++i) {
    int c = x[i].atom->key.compare(y[i].atom->key);
    if (c != 0) return c < 0;
    if (x[i].exp != y[i].exp) return x[i].exp < y[i].exp;
  }
  return x.size() < y.size();
}

namespace {

Monomial multiply(const Monomial& x, const Monomial& y) {
  Monomial out;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < x.size() || j < y.size()) {
    if (j == y.size() || (i < x.size() && x[i].atom->key < y[j].atom->key)) {
      out.push_back(x[i++]);
    } else if (i == x.size() || y[j].atom->key < x[i].atom->key) {
      out.push_back(y[j++]);
    } else {
      int e = x[i].exp + y[j].exp;
      if (e != 0) out.push_back({x[i].atom, e});
      ++i;
      ++j;
    }
  }
  return out;
}

Monomial inverse(const Monomial& m) {
  Monomial out = m;
  for (auto& f : out) f.exp = -f.exp;
  return out;
}

const char* atom_name(AtomKind k) {
  switch (k) {
    case AtomKind::Sqrt: return "Sqrt";
    case AtomKind::Sin: return "Sin";
    case AtomKind::Cos: return "Cos";
    case AtomKind::Tan: return "Tan";
    case AtomKind::Inv: return "Inv";
    case AtomKind::Pow: return "Pow";
    case AtomKind::Mod: return "Mod";
    case AtomKind::Symbol: return "";
  }
  return "";
}

Poly make_atom(AtomKind kind, const std::vector<Poly>& args) {
  auto data = std::make_shared<AtomData>();
  data->kind = kind;
  data->args = args;
  std::string key = std::string(atom_name(kind)) + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) key += ",";
    key += args[i].to_string();
  }
  data->key = key + ")";
  return Poly::atom(data);
}

std::optional<long> small_integer(const Number& n) {
  if (!n.rational()) return std::nullopt;
  const Rational& q = n.rational_part();
  if (q.get_den() != 1 || !q.get_num().fits_slong_p()) return std::nullopt;
  long k = q.get_num().get_si();
  if (k > 64 || k < -64) return std::nullopt;
  return k;
}

}  // namespace

Poly Poly::constant(const Number& c) {
  Poly p;
  p.add_term({}, c);
  return p;
}

Poly Poly::symbol(const std::string& name) {
  auto data = std::make_shared<AtomData>();
  data->kind = AtomKind::Symbol;
  data->key = name;
  data->symbol = name;
  return atom(data);
}

Poly Poly::atom(const Atom& a, int exp) {
  Poly p;
  p.terms_[Monomial{{a, exp}}] = Number(1);
  return p;
}

void Poly::add_term(const Monomial& m, const Number& c) {
  if (c.is_zero()) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

bool Poly::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }

Number Poly::constant_value() const { return constant_term(); }

Number Poly::constant_term() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? Number(0) : it->second;
}

Poly Poly::operator-() const { return scaled(Number(-1)); }

Poly operator+(const Poly& x, const Poly& y) {
  Poly out = x;
  for (const auto& [m, c] : y.terms_) out.add_term(m, c);
  return out;
}

Poly operator-(const Poly& x, const Poly& y) {
  Poly out = x;
  for (const auto& [m, c] : y.terms_) out.add_term(m, -c);
  return out;
}

Poly operator*(const Poly& x, const Poly& y) {
  Poly out;
  for (const auto& [mx, cx] : x.terms_) {
    for (const auto& [my, cy] : y.terms_) out.add_term(multiply(mx, my), cx * cy);
  }
  return out;
}

Poly Poly::scaled(const Number& c) const {
  Poly out;
  if (c.is_zero()) return out;
  for (const auto& [m, v] : terms_) out.add_term(m, v * c);
  return out;
}

Poly Poly::pow(long exponent) const {
  if (exponent < 0) return divide(constant(Number(1)), pow(-exponent));
  Poly result = constant(Number(1));
  Poly base = *this;
  while (exponent > 0) {
    if (exponent & 1) result = result * base;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

Poly Poly::divide(const Poly& x, const Poly& y) {
  if (y.is_zero()) throw std::domain_error("division by zero");
  if (y.is_constant()) return x.scaled(Number(1) / y.constant_value());
  if (y.terms_.size() == 1) {
    const auto& [m, c] = *y.terms_.begin();
    Poly inv;
    inv.terms_[inverse(m)] = Number(1) / c;
    return x * inv;
  }
  return x * make_atom(AtomKind::Inv, {y});
}

Poly Poly::func(AtomKind kind, const std::vector<Poly>& args) {
  bool all_const = true;
  for (const auto& a : args) all_const = all_const && a.is_constant();
  switch (kind) {
    case AtomKind::Symbol: throw std::logic_error("symbol is not a function");
    case AtomKind::Sqrt:
      if (all_const) {
        if (auto r = args[0].constant_value().sqrt()) return constant(*r);
      }
      break;
    case AtomKind::Sin:
      if (all_const) return constant(sin_deg(args[0].constant_value()));
      break;
    case AtomKind::Cos:
      if (all_const) return constant(cos_deg(args[0].constant_value()));
      break;
    case AtomKind::Tan:
      if (all_const) {
        if (auto t = tan_deg(args[0].constant_value())) return constant(*t);
      }
      break;
    case AtomKind::Inv:
      if (!args[0].is_zero() && (args[0].is_constant() || args[0].terms().size() == 1)) {
        return divide(constant(Number(1)), args[0]);
      }
      break;
    case AtomKind::Pow:
      if (args[1].is_constant()) {
        Number e = args[1].constant_value();
        if (auto k = small_integer(e)) {
          if (*k < 0 && args[0].is_zero()) break;
          return args[0].pow(*k);
        }
        if (args[0].is_constant() && args[0].constant_value().sign() > 0) {
          if (e.rational() && e.rational_part() == Rational(1, 2)) {
            return func(AtomKind::Sqrt, {args[0]});
          }
          return constant(Number::approx(std::pow(args[0].constant_value().to_double(), e.to_double())));
        }
      }
      break;
    case AtomKind::Mod:
      if (all_const) {
        Number a = args[0].constant_value();
        Number b = args[1].constant_value();
        if (a.rational() && b.rational() && a.rational_part().get_den() == 1 &&
            b.rational_part().get_den() == 1 && !b.is_zero()) {
          Integer r;
          mpz_fdiv_r(r.get_mpz_t(), a.rational_part().get_num_mpz_t(), b.rational_part().get_num_mpz_t());
          return constant(Number(Rational(r)));
        }
      }
      break;
  }
  return make_atom(kind, args);
}

std::set<std::string> Poly::symbols() const {
  std::set<std::string> out;
  for (const auto& [m, c] : terms_) {
    for (const auto& f : m) {
      if (f.atom->kind == AtomKind::Symbol) {
        out.insert(f.atom->symbol);
      } else {
        for (const auto& a : f.atom->args) {
          auto inner = a.symbols();
          out.insert(inner.begin(), inner.end());
        }
      }
    }
  }
  return out;
}

Poly Poly::substitute(const std::map<std::string, Number>& values) const {
  if (values.empty()) return *this;
  Poly out;
  for (const auto& [m, c] : terms_) {
    Poly term = constant(c);
    for (const auto& f : m) {
      Poly factor;
      if (f.atom->kind == AtomKind::Symbol) {
        auto it = values.find(f.atom->symbol);
        if (it != values.end() && !(f.exp < 0 && it->second.is_zero())) {
          factor = constant(it->second.pow(f.exp));
        } else {
          factor = atom(f.atom, f.exp);
        }
      } else {
        std::vector<Poly> args;
        for (const auto& a : f.atom->args) args.push_back(a.substitute(values));
        Poly applied = func(f.atom->kind, args);
        if (f.exp < 0 && applied.is_zero()) {
          factor = atom(f.atom, f.exp);
        } else {
          factor = applied.pow(f.exp);
        }
      }
      term = term * factor;
    }
    out = out + term;
  }
  return out;
}

Poly Poly::monic() const {
  for (const auto& [m, c] : terms_) {
    if (!m.empty()) return scaled(Number(1) / c);
  }
  if (terms_.empty()) return *this;
  return constant(Number(1));
}

std::string monomial_to_string(const Monomial& m) {
  std::string out;
  for (const auto& f : m) {
    if (!out.empty()) out += "*";
    out += f.atom->key;
    if (f.exp != 1) out += "^" + std::to_string(f.exp);
  }
  return out;
}

std::string Poly::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [m, c] : terms_) {
    if (!out.empty()) out += " + ";
    out += "(" + c.to_string() + ")";
    if (!m.empty()) out += "*" + monomial_to_string(m);
  }
  return out;
}

Poly to_poly(const Expr& e, const std::function<std::string(const Expr&)>& attr_symbol) {
  switch (e.kind) {
    case Expr::Kind::Number: return Poly::constant(Number(e.number));
    case Expr::Kind::Free: return Poly::symbol(e.name);
    case Expr::Kind::Attr: return Poly::symbol(attr_symbol(e));
    case Expr::Kind::Op: break;
  }
  std::vector<Poly> args;
  for (const auto& a : e.args) args.push_back(to_poly(a, attr_symbol));
  switch (e.op) {
    case Op::Add: {
      Poly s;
      for (const auto& a : args) s = s + a;
      return s;
    }
    case Op::Mul: {
      Poly p = Poly::constant(Number(1));
      for (const auto& a : args) p = p * a;
      return p;
    }
    case Op::Sub: return args[0] - args[1];
    case Op::Div: return Poly::divide(args[0], args[1]);
    case Op::Pow: return Poly::func(AtomKind::Pow, args);
    case Op::Mod: return Poly::func(AtomKind::Mod, args);
    case Op::Sqrt: return Poly::func(AtomKind::Sqrt, args);
    case Op::Sin: return Poly::func(AtomKind::Sin, args);
    case Op::Cos: return Poly::func(AtomKind::Cos, args);
    case Op::Tan: return Poly::func(AtomKind::Tan, args);
  }
  throw std::logic_error("unhandled operator");
}

Expr number_expr(const Number& n) {
  if (!n.exact()) return Expr::constant(Rational(n.to_double()));
  if (n.rational()) return Expr::constant(n.rational_part());
  Expr root = Expr::apply(Op::Sqrt, {Expr::constant(Rational(n.radicand()))});
  Expr surd = n.surd_coefficient() == 1
                  ? root
                  : Expr::apply(Op::Mul, {Expr::constant(n.surd_coefficient()), root});
  if (n.rational_part() == 0) return surd;
  return Expr::apply(Op::Add, {Expr::constant(n.rational_part()), surd});
}

namespace {

Expr atom_expr(const Atom& a, const std::function<Expr(const std::string&)>& sym_expr) {
  if (a->kind == AtomKind::Symbol) return sym_expr(a->symbol);
  std::vector<Expr> args;
  for (const auto& p : a->args) args.push_back(to_expr(p, sym_expr));
  switch (a->kind) {
    case AtomKind::Sqrt: return Expr::apply(Op::Sqrt, args);
    case AtomKind::Sin: return Expr::apply(Op::Sin, args);
    case AtomKind::Cos: return Expr::apply(Op::Cos, args);
    case AtomKind::Tan: return Expr::apply(Op::Tan, args);
    case AtomKind::Inv: return Expr::apply(Op::Div, {Expr::constant(1), args[0]});
    case AtomKind::Pow: return Expr::apply(Op::Pow, args);
    case AtomKind::Mod: return Expr::apply(Op::Mod, args);
    case AtomKind::Symbol: break;
  }
  throw std::logic_error("unhandled atom");
}

Expr term_expr(const Monomial& m, const Number& c,
               const std::function<Expr(const std::string&)>& sym_expr) {
  if (m.empty()) return number_expr(c);
  std::vector<Expr> factors;
  if (c != Number(1)) factors.push_back(number_expr(c));
  for (const auto& f : m) {
    Expr base = atom_expr(f.atom, sym_expr);
    if (f.exp == 1) {
      factors.push_back(base);
    } else {
      factors.push_back(Expr::apply(Op::Pow, {base, Expr::constant(f.exp)}));
    }
  }
  if (factors.size() == 1) return factors[0];
  return Expr::apply(Op::Mul, factors);
}

Expr sum_expr(const std::vector<Expr>& terms) {
  if (terms.empty()) return Expr::constant(0);
  if (terms.size() == 1) return terms[0];
  return Expr::apply(Op::Add, terms);
}

}  // namespace

Expr to_expr(const Poly& p, const std::function<Expr(const std::string&)>& sym_expr) {
  std::vector<Expr> terms;
  for (const auto& [m, c] : p.terms()) terms.push_back(term_expr(m, c, sym_expr));
  return sum_expr(terms);
}

std::pair<Expr, Expr> to_equal_sides(const Poly& p,
                                     const std::function<Expr(const std::string&)>& sym_expr) {
  std::vector<Expr> lhs;
  std::vector<Expr> rhs;
  for (const auto& [m, c] : p.terms()) {
    if (c.sign() > 0) {
      lhs.push_back(term_expr(m, c, sym_expr));
    } else {
      rhs.push_back(term_expr(m, -c, sym_expr));
    }
  }
  return {sum_expr(lhs), sum_expr(rhs)};
}

}  // namespace geoform
