#include "geoform/expr.hpp"

#include <cctype>

namespace geoform {

ParseError::ParseError(const std::string& message, int line, int column)
    : std::runtime_error(line > 0 ? message + " (line " + std::to_string(line) + ", column " +
                                        std::to_string(column) + ")"
                                  : message),
      line_(line),
      column_(column) {}

const char* op_name(Op op) {
  switch (op) {
    case Op::Add: return "Add";
    case Op::Sub: return "Sub";
    case Op::Mul: return "Mul";
    case Op::Div: return "Div";
    case Op::Pow: return "Pow";
    case Op::Mod: return "Mod";
    case Op::Sqrt: return "Sqrt";
    case Op::Sin: return "Sin";
    case Op::Cos: return "Cos";
    case Op::Tan: return "Tan";
  }
  return "?";
}

Expr Expr::constant(const Rational& q) {
  Expr e;
  e.kind = Kind::Number;
  e.number = q;
  return e;
}

Expr Expr::free(std::string symbol) {
  Expr e;
  e.kind = Kind::Free;
  e.name = std::move(symbol);
  return e;
}

Expr Expr::attr(std::string attribution, std::vector<std::string> point_groups) {
  Expr e;
  e.kind = Kind::Attr;
  e.name = std::move(attribution);
  e.groups = std::move(point_groups);
  return e;
}

Expr Expr::apply(Op op, std::vector<Expr> args) {
  Expr e;
  e.kind = Kind::Op;
  e.op = op;
  e.args = std::move(args);
  return e;
}

std::string Expr::points() const {
  std::string out;
  for (const auto& g : groups) out += g;
  return out;
}

bool operator==(const Expr& x, const Expr& y) {
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Expr::Kind::Number: return x.number == y.number;
    case Expr::Kind::Free: return x.name == y.name;
    case Expr::Kind::Attr: return x.name == y.name && x.groups == y.groups;
    case Expr::Kind::Op: return x.op == y.op && x.args == y.args;
  }
  return false;
}

namespace {

bool lookup_op(const std::string& name, Op& op) {
  static const std::pair<const char*, Op> kOps[] = {
      {"Add", Op::Add}, {"Sub", Op::Sub},   {"Mul", Op::Mul}, {"Div", Op::Div},
      {"Pow", Op::Pow}, {"Mod", Op::Mod},   {"Sqrt", Op::Sqrt}, {"Sin", Op::Sin},
      {"Cos", Op::Cos}, {"Tan", Op::Tan}};
  for (const auto& [n, o] : kOps) {
    if (name == n) {
      op = o;
      return true;
    }
  }
  return false;
}

void check_arity(Op op, std::size_t n, int column) {
  bool ok = true;
  switch (op) {
    case Op::Add:
    case Op::Mul: ok = n >= 2; break;
    case Op::Sub:
    case Op::Div:
    case Op::Pow:
    case Op::Mod: ok = n == 2; break;
    default: ok = n == 1; break;
  }
  if (!ok) {
    throw ParseError(std::string("arity mismatch: ") + op_name(op) + " given " + std::to_string(n) +
                         " argument(s)",
                     1, column);
  }
}

bool all_numbers(const std::vector<Expr>& args) {
  for (const auto& a : args) {
    if (a.kind != Expr::Kind::Number) return false;
  }
  return true;
}

// Folds an operator node whose arguments are all exact numbers.
Expr fold(Expr e, int column) {
  if (e.kind != Expr::Kind::Op || !all_numbers(e.args)) return e;
  const auto& a = e.args;
  switch (e.op) {
    case Op::Add: {
      Rational s = 0;
      for (const auto& x : a) s += x.number;
      return Expr::constant(s);
    }
    case Op::Mul: {
      Rational p = 1;
      for (const auto& x : a) p *= x.number;
      return Expr::constant(p);
    }
    case Op::Sub: return Expr::constant(a[0].number - a[1].number);
    case Op::Div:
      if (a[1].number == 0) throw ParseError("division by zero", 1, column);
      return Expr::constant(a[0].number / a[1].number);
    case Op::Pow: {
      const Rational& ex = a[1].number;
      if (ex.get_den() != 1 || !ex.get_num().fits_slong_p()) return e;
      long k = ex.get_num().get_si();
      if (k > 64 || k < -64) return e;
      if (k < 0 && a[0].number == 0) throw ParseError("division by zero", 1, column);
      Number v = Number(a[0].number).pow(k);
      return Expr::constant(v.rational_part());
    }
    case Op::Mod: {
      if (a[0].number.get_den() != 1 || a[1].number.get_den() != 1 || a[1].number == 0) return e;
      Integer r;
      mpz_fdiv_r(r.get_mpz_t(), a[0].number.get_num_mpz_t(), a[1].number.get_num_mpz_t());
      return Expr::constant(Rational(r));
    }
    case Op::Sqrt: {
      if (a[0].number < 0) return e;
      auto r = Number(a[0].number).sqrt();
      if (r && r->rational()) return Expr::constant(r->rational_part());
      return e;
    }
    default: return e;
  }
}

class ExprParser {
 public:
  explicit ExprParser(const std::string& text) : s_(text) {}

  Expr parse() {
    Expr e = parse_sum();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, 1, static_cast<int>(pos_) + 1);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (c == ')') fail("unbalanced parentheses");
      fail(std::string("expected '") + c + "'");
    }
  }

  std::string identifier() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    return s_.substr(start, pos_ - start);
  }

  Expr parse_sum() {
    Expr first = parse_product();
    std::vector<Expr> addends{first};
    bool any = false;
    while (true) {
      if (accept('+')) {
        addends.push_back(parse_product());
        any = true;
      } else if (accept('-')) {
        Expr rhs = parse_product();
        Expr lhs = addends.size() == 1 ? addends[0]
                                       : fold(Expr::apply(Op::Add, addends), column());
        addends = {fold(Expr::apply(Op::Sub, {lhs, rhs}), column())};
        any = false;
      } else {
        break;
      }
    }
    if (any) return fold(Expr::apply(Op::Add, addends), column());
    return addends[0];
  }

  Expr parse_product() {
    Expr lhs = parse_power();
    std::vector<Expr> factors{lhs};
    bool any = false;
    while (true) {
      if (accept('*')) {
        factors.push_back(parse_power());
        any = true;
      } else if (accept('/')) {
        Expr rhs = parse_power();
        Expr num = factors.size() == 1 ? factors[0]
                                       : fold(Expr::apply(Op::Mul, factors), column());
        factors = {fold(Expr::apply(Op::Div, {num, rhs}), column())};
        any = false;
      } else {
        break;
      }
    }
    if (any) return fold(Expr::apply(Op::Mul, factors), column());
    return factors[0];
  }

  Expr parse_power() {
    Expr base = parse_unary();
    if (accept('^')) {
      Expr ex = parse_power();
      return fold(Expr::apply(Op::Pow, {base, ex}), column());
    }
    return base;
  }

  Expr parse_unary() {
    if (accept('-')) {
      Expr inner = parse_unary();
      if (inner.kind == Expr::Kind::Number) return Expr::constant(-inner.number);
      return Expr::apply(Op::Mul, {Expr::constant(-1), inner});
    }
    return parse_primary();
  }

  int column() const { return static_cast<int>(pos_) + 1; }

  Expr parse_primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ < s_.size() && s_[pos_] == '.') {
        ++pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
      return Expr::constant(parse_rational(s_.substr(start, pos_ - start)));
    }
    if (!std::isalpha(static_cast<unsigned char>(c)) && c != '_') fail("unexpected '" + std::string(1, c) + "'");
    std::size_t ident_start = pos_;
    std::string name = identifier();
    skip_ws();
    bool call = pos_ < s_.size() && s_[pos_] == '(';
    if (!call) {
      if (std::islower(static_cast<unsigned char>(name[0]))) return Expr::free(name);
      pos_ = ident_start;
      fail("bare point sequence '" + name + "' in expression");
    }
    ++pos_;
    Op op{};
    if (lookup_op(name, op)) {
      int col = static_cast<int>(ident_start) + 1;
      std::vector<Expr> args;
      if (!accept(')')) {
        do {
          args.push_back(parse_sum());
        } while (accept(','));
        expect(')');
      }
      check_arity(op, args.size(), col);
      return fold(Expr::apply(op, std::move(args)), col);
    }
    if (name == "Free") {
      std::string sym = identifier();
      if (sym.empty() || !std::islower(static_cast<unsigned char>(sym[0]))) fail("Free expects a lowercase symbol");
      expect(')');
      return Expr::free(sym);
    }
    if (!std::isupper(static_cast<unsigned char>(name[0]))) fail("unknown function '" + name + "'");
    std::vector<std::string> groups;
    do {
      std::string g = identifier();
      if (g.empty()) fail("malformed point sequence");
      for (char p : g) {
        if (!std::isupper(static_cast<unsigned char>(p))) fail("malformed point sequence '" + g + "'");
      }
      groups.push_back(g);
    } while (accept(','));
    expect(')');
    return Expr::attr(name, std::move(groups));
  }
};

}  // namespace

Expr parse_expr(const std::string& text) { return ExprParser(text).parse(); }

std::string to_text(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Number: return rational_to_string(e.number);
    case Expr::Kind::Free: return e.name;
    case Expr::Kind::Attr: {
      std::string out = e.name + "(";
      for (std::size_t i = 0; i < e.groups.size(); ++i) {
        if (i) out += ",";
        out += e.groups[i];
      }
      return out + ")";
    }
    case Expr::Kind::Op: {
      std::string out = std::string(op_name(e.op)) + "(";
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ",";
        out += to_text(e.args[i]);
      }
      return out + ")";
    }
  }
  return {};
}

}  // namespace geoform
