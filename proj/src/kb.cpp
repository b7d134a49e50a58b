#include "geoform/kb.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "geoform/gpl.hpp"

namespace geoform {

const char* kind_name(PredicateKind k) {
  switch (k) {
    case PredicateKind::Structure: return "structure";
    case PredicateKind::BasicEntity: return "basic-entity";
    case PredicateKind::Entity: return "entity";
    case PredicateKind::Relation: return "relation";
    case PredicateKind::Attribution: return "attribution";
    case PredicateKind::Algebra: return "algebra";
  }
  return "?";
}

std::string RelAtom::vars() const {
  std::string out;
  for (const auto& g : groups) out += g;
  return out;
}

std::string RelAtom::text() const {
  std::string out = predicate + "(";
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (i) out += ",";
    out += groups[i];
  }
  return out + ")";
}

std::string Fact::text() const {
  if (equation) return "Equal(" + to_text(lhs) + "," + to_text(rhs) + ")";
  return atom.text();
}

GplExpr GplExpr::rel(RelAtom a) {
  GplExpr e;
  e.kind = Kind::Rel;
  e.atom = std::move(a);
  return e;
}

GplExpr GplExpr::alg(Expr l, Expr r) {
  GplExpr e;
  e.kind = Kind::Alg;
  e.lhs = std::move(l);
  e.rhs = std::move(r);
  return e;
}

GplExpr GplExpr::conj(std::vector<GplExpr> c) {
  if (c.size() == 1) return c.front();
  GplExpr e;
  e.kind = Kind::And;
  e.children = std::move(c);
  return e;
}

GplExpr GplExpr::disj(std::vector<GplExpr> c) {
  if (c.size() == 1) return c.front();
  GplExpr e;
  e.kind = Kind::Or;
  e.children = std::move(c);
  return e;
}

GplExpr GplExpr::negate(GplExpr c) {
  GplExpr e;
  e.kind = Kind::Not;
  e.children.push_back(std::move(c));
  return e;
}

std::string GplExpr::text() const {
  switch (kind) {
    case Kind::Rel: return atom.text();
    case Kind::Alg: return "Equal(" + to_text(lhs) + "," + to_text(rhs) + ")";
    case Kind::Not: return "~" + children.front().text();
    case Kind::And: {
      std::string out;
      for (const auto& c : children) {
        if (!out.empty()) out += "&";
        out += c.kind == Kind::Or ? "(" + c.text() + ")" : c.text();
      }
      return out;
    }
    case Kind::Or: {
      std::string out;
      for (const auto& c : children) {
        if (!out.empty()) out += "|";
        out += c.text();
      }
      return out;
    }
  }
  return {};
}

namespace {

std::string attr_letters(const Expr& e) {
  std::string out;
  for_each_attr(e, [&](const Expr& a) {
    for (char c : a.points()) {
      if (out.find(c) == std::string::npos) out += c;
    }
  });
  return out;
}

}  // namespace

std::string BranchAtom::vars() const {
  if (kind != Kind::Alg) return atom.vars();
  std::string out = attr_letters(lhs);
  for (char c : attr_letters(rhs)) {
    if (out.find(c) == std::string::npos) out += c;
  }
  return out;
}

std::string BranchAtom::text() const {
  switch (kind) {
    case Kind::Rel: return atom.text();
    case Kind::NotRel: return "~" + atom.text();
    case Kind::Alg: return "Equal(" + to_text(lhs) + "," + to_text(rhs) + ")";
  }
  return {};
}

std::string TheoremBranch::text() const {
  std::string out;
  for (const auto& a : atoms) {
    if (!out.empty()) out += "&";
    out += a.text();
  }
  return out;
}

std::string PredicateDef::vars() const {
  std::string out;
  for (const auto& g : var_pattern) out += g;
  return out;
}

// ---------------------------------------------------------------------------
// Built-in predicates

namespace {

PredicateDef builtin_def(const std::string& name, PredicateKind kind, std::vector<std::string> pattern,
                         bool variadic) {
  PredicateDef d;
  d.name = name;
  d.kind = kind;
  d.var_pattern = std::move(pattern);
  d.variadic = variadic;
  d.builtin = true;
  return d;
}

std::vector<PredicateDef> builtin_predicates() {
  std::vector<PredicateDef> out;
  out.push_back(builtin_def("Shape", PredicateKind::Structure, {"ABC"}, true));
  out.push_back(builtin_def("Collinear", PredicateKind::Structure, {"ABC"}, true));
  out.push_back(builtin_def("Cocircular", PredicateKind::Structure, {"O", "ABC"}, true));
  out.push_back(builtin_def("Point", PredicateKind::BasicEntity, {"A"}, false));
  auto line = builtin_def("Line", PredicateKind::BasicEntity, {"AB"}, false);
  line.multi = {"BA"};
  out.push_back(line);
  out.push_back(builtin_def("Arc", PredicateKind::BasicEntity, {"OAB"}, false));
  out.push_back(builtin_def("Angle", PredicateKind::BasicEntity, {"ABC"}, false));
  out.push_back(builtin_def("Polygon", PredicateKind::BasicEntity, {"ABC"}, true));
  out.push_back(builtin_def("Circle", PredicateKind::BasicEntity, {"O"}, false));
  out.push_back(builtin_def("Equal", PredicateKind::Algebra, {}, true));
  out.push_back(builtin_def("Equation", PredicateKind::Algebra, {}, true));
  out.push_back(builtin_def("Free", PredicateKind::Algebra, {}, true));
  return out;
}

}  // namespace

KnowledgeBase::KnowledgeBase() {
  for (auto& d : builtin_predicates()) predicates_.emplace(d.name, d);
}

void KnowledgeBase::add(GdlDefinitions defs) {
  for (auto& p : defs.predicates) {
    if (predicates_.count(p.name)) throw ParseError("duplicate predicate " + p.name, p.line, 1);
    if (p.kind == PredicateKind::Attribution) sym_index_[p.sym] = p.name;
    std::string name = p.name;
    predicates_.emplace(name, std::move(p));
  }
  for (auto& t : defs.theorems) {
    if (theorem_index_.count(t.name)) throw ParseError("duplicate theorem " + t.name, t.line, 1);
    theorem_index_[t.name] = theorems_.size();
    theorems_.push_back(std::move(t));
  }
}

const PredicateDef* KnowledgeBase::predicate(const std::string& name) const {
  auto it = predicates_.find(name);
  return it == predicates_.end() ? nullptr : &it->second;
}

const TheoremDef* KnowledgeBase::theorem(const std::string& name) const {
  auto it = theorem_index_.find(name);
  return it == theorem_index_.end() ? nullptr : &theorems_[it->second];
}

const PredicateDef* KnowledgeBase::attribution_by_sym(const std::string& sym) const {
  auto it = sym_index_.find(sym);
  return it == sym_index_.end() ? nullptr : predicate(it->second);
}

// ---------------------------------------------------------------------------
// Item helpers

std::string instantiate(const std::string& vars, const std::map<char, char>& binding) {
  std::string out = vars;
  for (auto& c : out) {
    auto it = binding.find(c);
    if (it != binding.end()) c = it->second;
  }
  return out;
}

std::vector<std::string> multi_items(const PredicateDef& def, const std::string& item) {
  std::vector<std::string> out{item};
  auto push = [&](const std::string& s) {
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  };
  if (def.builtin) {
    if (def.name == "Shape" || def.name == "Polygon") {
      std::string cur = item;
      for (std::size_t i = 1; i < item.size(); ++i) {
        cur = cur.substr(1) + cur[0];
        push(cur);
      }
      return out;
    }
    if (def.name == "Collinear") {
      push(std::string(item.rbegin(), item.rend()));
      return out;
    }
    if (def.name == "Cocircular") {
      if (item.size() < 3) return out;
      std::string rest = item.substr(1);
      for (std::size_t i = 1; i < rest.size(); ++i) {
        rest = rest.substr(1) + rest[0];
        push(item[0] + rest);
      }
      return out;
    }
  }
  std::string vars = def.vars();
  if (vars.size() != item.size()) return out;
  std::map<char, char> binding;
  for (std::size_t i = 0; i < vars.size(); ++i) binding[vars[i]] = item[i];
  for (const auto& perm : def.multi) push(instantiate(perm, binding));
  return out;
}

std::string canonical_item(const PredicateDef& def, const std::string& item) {
  auto reps = multi_items(def, item);
  return *std::min_element(reps.begin(), reps.end());
}

std::vector<std::string> split_groups(const PredicateDef& def, const std::string& item) {
  if (def.builtin) {
    if (def.name == "Shape") {
      std::vector<std::string> edges;
      for (std::size_t i = 0; i < item.size(); ++i) {
        edges.push_back(std::string{item[i], item[(i + 1) % item.size()]});
      }
      return edges;
    }
    if (def.name == "Cocircular") return {item.substr(0, 1), item.substr(1)};
    if (def.variadic) return {item};
  }
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (const auto& g : def.var_pattern) {
    if (pos + g.size() > item.size()) return {item};
    out.push_back(item.substr(pos, g.size()));
    pos += g.size();
  }
  if (pos != item.size()) return {item};
  return out;
}

// ---------------------------------------------------------------------------
// Text-level parsing

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Splits at top-level occurrences of sep. Throws on unbalanced parentheses.
std::vector<std::string> split_top(const std::string& text, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '(') ++depth;
    if (c == ')') {
      if (--depth < 0) throw ParseError("unbalanced parentheses", 1, static_cast<int>(i) + 1);
    }
    if (c == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (depth != 0) throw ParseError("unbalanced parentheses", 1, static_cast<int>(text.size()));
  out.push_back(trim(cur));
  return out;
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

bool is_point_run(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isupper(static_cast<unsigned char>(c)); });
}

// "Name(inner)" -> (Name, inner).
std::pair<std::string, std::string> split_call(const std::string& raw) {
  std::string text = trim(raw);
  std::size_t open = text.find('(');
  if (open == std::string::npos || text.back() != ')') {
    throw ParseError("expected Name(...) but got '" + text + "'", 1, 1);
  }
  std::string name = trim(text.substr(0, open));
  if (!is_identifier(name)) throw ParseError("malformed identifier '" + name + "'", 1, 1);
  std::string inner = text.substr(open + 1, text.size() - open - 2);
  split_top(inner, ',');  // balance check
  return {name, inner};
}

std::vector<std::string> parse_groups(const std::string& inner) {
  std::vector<std::string> groups;
  if (trim(inner).empty()) return groups;
  for (const auto& g : split_top(inner, ',')) {
    if (!is_point_run(g)) throw ParseError("malformed point sequence '" + g + "'", 1, 1);
    groups.push_back(g);
  }
  return groups;
}

}  // namespace

RelAtom parse_rel_atom(const std::string& text) {
  auto [name, inner] = split_call(text);
  return RelAtom{name, parse_groups(inner)};
}

Fact parse_fact(const std::string& text) {
  auto [name, inner] = split_call(text);
  Fact f;
  if (name == "Equal") {
    auto parts = split_top(inner, ',');
    if (parts.size() != 2) throw ParseError("Equal takes two expressions", 1, 1);
    f.equation = true;
    f.lhs = parse_expr(parts[0]);
    f.rhs = parse_expr(parts[1]);
  } else if (name == "Equation") {
    f.equation = true;
    f.lhs = parse_expr(inner);
    f.rhs = Expr::constant(0);
  } else {
    f.atom = RelAtom{name, parse_groups(inner)};
  }
  return f;
}

namespace {

class GplParser {
 public:
  explicit GplParser(const std::string& text) : s_(text) {}

  GplExpr parse() {
    GplExpr e = parse_or();
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

  GplExpr parse_or() {
    std::vector<GplExpr> parts{parse_and()};
    while (accept('|')) parts.push_back(parse_and());
    return GplExpr::disj(std::move(parts));
  }

  GplExpr parse_and() {
    std::vector<GplExpr> parts{parse_unary()};
    while (accept('&')) parts.push_back(parse_unary());
    // Flatten nested conjunctions produced by parentheses.
    std::vector<GplExpr> flat;
    for (auto& p : parts) {
      if (p.kind == GplExpr::Kind::And) {
        for (auto& c : p.children) flat.push_back(std::move(c));
      } else {
        flat.push_back(std::move(p));
      }
    }
    return GplExpr::conj(std::move(flat));
  }

  GplExpr parse_unary() {
    if (accept('~')) {
      std::size_t at = pos_;
      GplExpr inner = parse_unary();
      if (inner.kind != GplExpr::Kind::Rel) {
        pos_ = at;
        fail("~ applies to a single relation atom only");
      }
      return GplExpr::negate(std::move(inner));
    }
    if (accept('(')) {
      GplExpr e = parse_or();
      if (!accept(')')) fail("unbalanced parentheses");
      return e;
    }
    return parse_atom();
  }

  GplExpr parse_atom() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    if (pos_ == start) fail("expected a predicate");
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != '(') fail("expected '('");
    int depth = 0;
    do {
      if (s_[pos_] == '(') ++depth;
      if (s_[pos_] == ')') --depth;
      ++pos_;
    } while (pos_ < s_.size() && depth > 0);
    if (depth != 0) fail("unbalanced parentheses");
    std::string text = s_.substr(start, pos_ - start);
    try {
      Fact f = parse_fact(text);
      if (f.equation) return GplExpr::alg(f.lhs, f.rhs);
      return GplExpr::rel(f.atom);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), 1, static_cast<int>(start) + std::max(e.column(), 1));
    }
  }
};

}  // namespace

GplExpr parse_gpl(const std::string& text) { return GplParser(text).parse(); }

// ---------------------------------------------------------------------------
// GDL documents

namespace {

struct Entry {
  std::string key;
  std::string value;
  int line;
  int column;
};

struct RawBlock {
  std::string keyword;
  std::string header;
  int line;
  std::string source;
  std::vector<Entry> entries;
};

const std::set<std::string> kPredicateKeys = {"ee_check", "fv_check", "multi", "extend", "sym", "domain"};
const std::set<std::string> kTheoremKeys = {"premise", "conclusion"};

std::vector<RawBlock> split_blocks(const std::string& source, const std::string& text) {
  std::vector<RawBlock> blocks;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    bool indented = std::isspace(static_cast<unsigned char>(line[0])) != 0;
    if (!indented) {
      std::string t = trim(line);
      std::size_t sp = t.find_first_of(" \t");
      std::string kw = sp == std::string::npos ? t : t.substr(0, sp);
      if (kw != "entity" && kw != "relation" && kw != "attribution" && kw != "theorem") {
        throw ParseError(source + ": expected entity/relation/attribution/theorem, got '" + kw + "'", line_no, 1);
      }
      if (sp == std::string::npos) throw ParseError(source + ": missing definition header", line_no, 1);
      blocks.push_back(RawBlock{kw, trim(t.substr(sp)), line_no, source, {}});
      continue;
    }
    if (blocks.empty()) throw ParseError(source + ": indented line outside a definition", line_no, 1);
    std::size_t first = line.find_first_not_of(" \t");
    std::size_t colon = line.find(':');
    std::string key = colon == std::string::npos ? "" : trim(line.substr(first, colon - first));
    const auto& keys = blocks.back().keyword == "theorem" ? kTheoremKeys : kPredicateKeys;
    if (!key.empty() && is_identifier(key)) {
      if (!keys.count(key)) {
        throw ParseError(source + ": unknown key '" + key + "'", line_no, static_cast<int>(first) + 1);
      }
      std::size_t vstart = line.find_first_not_of(" \t", colon + 1);
      std::string value = vstart == std::string::npos ? "" : trim(line.substr(vstart));
      int column = vstart == std::string::npos ? static_cast<int>(colon) + 2 : static_cast<int>(vstart) + 1;
      blocks.back().entries.push_back(Entry{key, value, line_no, column});
    } else {
      // Continuation of the previous value.
      if (blocks.back().entries.empty()) {
        throw ParseError(source + ": expected 'key: value'", line_no, static_cast<int>(first) + 1);
      }
      blocks.back().entries.back().value += " " + trim(line);
    }
  }
  return blocks;
}

template <typename F>
auto at_entry(const RawBlock& b, const Entry& e, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError& err) {
    std::string msg = err.what();
    // Strip the nested single-line location; the entry provides the real one.
    std::size_t loc = msg.rfind(" (line ");
    if (loc != std::string::npos) msg = msg.substr(0, loc);
    throw ParseError(b.source + ": " + msg, e.line, e.column + std::max(err.column(), 1) - 1);
  }
}

RelAtom parse_header(const RawBlock& b) {
  Entry fake{"", b.header, b.line, static_cast<int>(b.keyword.size()) + 2};
  return at_entry(b, fake, [&] { return parse_rel_atom(b.header); });
}

PredicateDef build_predicate(const RawBlock& b) {
  PredicateDef d;
  RelAtom head = parse_header(b);
  d.name = head.predicate;
  d.var_pattern = head.groups;
  d.line = b.line;
  if (b.keyword == "entity") d.kind = PredicateKind::Entity;
  if (b.keyword == "relation") d.kind = PredicateKind::Relation;
  if (b.keyword == "attribution") d.kind = PredicateKind::Attribution;
  for (const auto& e : b.entries) {
    at_entry(b, e, [&] {
      if (e.key == "ee_check") {
        for (const auto& part : split_top(e.value, '&')) d.ee_check.push_back(parse_rel_atom(part));
      } else if (e.key == "fv_check") {
        d.fv_check.push_back(parse_groups(e.value));
      } else if (e.key == "multi") {
        std::string perm;
        for (const auto& g : parse_groups(e.value)) perm += g;
        d.multi.push_back(perm);
      } else if (e.key == "extend") {
        for (const auto& part : split_top(e.value, '&')) d.extend.push_back(parse_fact(part));
      } else if (e.key == "sym") {
        if (!is_identifier(e.value)) throw ParseError("malformed sym '" + e.value + "'", 1, 1);
        d.sym = e.value;
      } else if (e.key == "domain") {
        if (e.value == "angle") {
          d.domain = SymbolDomain::Angle;
        } else if (e.value == "nonnegative") {
          d.domain = SymbolDomain::NonNegative;
        } else if (e.value == "real") {
          d.domain = SymbolDomain::Real;
        } else {
          throw ParseError("domain must be angle, nonnegative or real", 1, 1);
        }
      }
      return 0;
    });
  }
  return d;
}

TheoremDef build_theorem(const RawBlock& b) {
  TheoremDef t;
  RelAtom head = parse_header(b);
  t.name = head.predicate;
  t.var_pattern = head.groups;
  t.line = b.line;
  bool has_premise = false;
  for (const auto& e : b.entries) {
    at_entry(b, e, [&] {
      if (e.key == "premise") {
        if (has_premise) throw ParseError("premise given twice", 1, 1);
        has_premise = true;
        t.premise = parse_gpl(e.value);
      } else {
        for (const auto& part : split_top(e.value, '&')) t.conclusions.push_back(parse_fact(part));
      }
      return 0;
    });
  }
  if (!has_premise) throw ParseError(b.source + ": theorem " + t.name + " has no premise", b.line, 1);
  if (t.conclusions.empty()) throw ParseError(b.source + ": theorem " + t.name + " has no conclusion", b.line, 1);
  return t;
}

// -- validation -------------------------------------------------------------

struct Validator {
  std::map<std::string, const PredicateDef*> preds;
  std::map<std::string, std::string> sources;  // definition name -> source file

  [[noreturn]] void fail(const std::string& where, int line, const std::string& msg) const {
    throw ParseError(where + ": " + msg, line, 1);
  }

  const PredicateDef* known(const std::string& name, const std::string& where, int line) const {
    auto it = preds.find(name);
    if (it == preds.end()) fail(where, line, "unknown predicate " + name);
    return it->second;
  }

  void check_atom(const RelAtom& a, const std::string& where, int line) const {
    const PredicateDef* d = known(a.predicate, where, line);
    if (d->kind == PredicateKind::Algebra || d->kind == PredicateKind::Attribution) {
      fail(where, line, a.predicate + " cannot be used as a relation");
    }
    std::string v = a.vars();
    if (v.empty()) fail(where, line, a.text() + " has no points");
    if (!d->variadic && v.size() != d->arity()) {
      fail(where, line, a.text() + " has " + std::to_string(v.size()) + " points, expected " +
                            std::to_string(d->arity()));
    }
  }

  void check_expr(const Expr& e, const std::string& where, int line) const {
    for_each_attr(e, [&](const Expr& a) {
      const PredicateDef* d = known(a.name, where, line);
      if (d->kind != PredicateKind::Attribution) fail(where, line, a.name + " is not an attribution");
      if (a.points().size() != d->arity()) fail(where, line, "wrong number of points in " + to_text(a));
    });
  }

  void check_fact(const Fact& f, const std::string& where, int line) const {
    if (f.equation) {
      check_expr(f.lhs, where, line);
      check_expr(f.rhs, where, line);
    } else {
      check_atom(f.atom, where, line);
    }
  }

  static std::string fact_vars(const Fact& f) {
    if (!f.equation) return f.atom.vars();
    return attr_letters(f.lhs) + attr_letters(f.rhs);
  }

  static bool covered(const std::string& vars, const std::string& by) {
    return std::all_of(vars.begin(), vars.end(), [&](char c) { return by.find(c) != std::string::npos; });
  }

  void check_predicate(const PredicateDef& d) const {
    const std::string where = sources.at(d.name) + ": " + d.name;
    std::string vars = d.vars();
    if (vars.empty()) fail(where, d.line, "predicate needs point variables");
    std::set<char> distinct(vars.begin(), vars.end());
    if (distinct.size() != vars.size()) fail(where, d.line, "variables must be distinct");
    if (d.kind == PredicateKind::Attribution && d.sym.empty()) fail(where, d.line, "attribution without sym");
    if (d.kind != PredicateKind::Attribution && !d.sym.empty()) fail(where, d.line, "sym on a non-attribution");
    for (const auto& a : d.ee_check) {
      check_atom(a, where, d.line);
      if (!covered(a.vars(), vars)) fail(where, d.line, "ee_check " + a.text() + " uses undeclared variables");
    }
    for (const auto& layout : d.fv_check) {
      std::string flat;
      for (const auto& g : layout) flat += g;
      if (flat.size() != vars.size()) fail(where, d.line, "fv_check layout does not match the variable count");
    }
    for (const auto& perm : d.multi) {
      std::string a = perm;
      std::string b = vars;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (a != b) fail(where, d.line, "multi " + perm + " is not a permutation of " + vars);
    }
    for (const auto& f : d.extend) {
      check_fact(f, where, d.line);
      if (!covered(fact_vars(f), vars)) fail(where, d.line, "extend " + f.text() + " uses undeclared variables");
      if (!f.equation) {
        const PredicateDef* target = preds.at(f.atom.predicate);
        if (target->kind == PredicateKind::Structure || target->kind == PredicateKind::BasicEntity) {
          fail(where, d.line, "extend may not assert construction predicate " + target->name);
        }
      }
    }
  }

  void check_premise(const GplExpr& e, const std::string& where, int line) const {
    switch (e.kind) {
      case GplExpr::Kind::Rel: check_atom(e.atom, where, line); break;
      case GplExpr::Kind::Alg:
        check_expr(e.lhs, where, line);
        check_expr(e.rhs, where, line);
        break;
      default:
        for (const auto& c : e.children) check_premise(c, where, line);
    }
  }

  void check_theorem(TheoremDef& t) const {
    const std::string where = sources.at("theorem " + t.name) + ": " + t.name;
    check_premise(t.premise, where, t.line);
    for (const auto& f : t.conclusions) {
      check_fact(f, where, t.line);
      if (!f.equation && preds.at(f.atom.predicate)->kind == PredicateKind::Structure) {
        fail(where, t.line, "theorems may not conclude construction predicate " + f.atom.predicate);
      }
    }
    try {
      t.branches = to_dnf(t.premise);
    } catch (const std::invalid_argument& err) {
      fail(where, t.line, err.what());
    }
    for (const auto& b : t.branches) {
      std::string bound;
      for (const auto& a : b.atoms) {
        if (a.kind == BranchAtom::Kind::Rel) bound += a.vars();
      }
      for (const auto& a : b.atoms) {
        if (a.kind == BranchAtom::Kind::Alg && !covered(a.vars(), bound)) {
          fail(where, t.line, "constraint " + a.text() + " uses variables no relation binds");
        }
      }
      for (const auto& f : t.conclusions) {
        if (!covered(fact_vars(f), bound)) {
          fail(where, t.line, "conclusion " + f.text() + " uses variables the premise does not bind");
        }
      }
      std::string head;
      for (const auto& g : t.var_pattern) head += g;
      if (!covered(head, bound)) fail(where, t.line, "header variables not bound by every branch");
    }
  }

  void check_cycles(const std::vector<PredicateDef>& defs) const {
    std::map<std::string, std::set<std::string>> edges;
    for (const auto& d : defs) {
      for (const auto& f : d.extend) {
        if (!f.equation) edges[d.name].insert(f.atom.predicate);
      }
    }
    std::map<std::string, int> state;  // 0 new, 1 on stack, 2 done
    std::function<void(const std::string&, std::vector<std::string>&)> dfs = [&](const std::string& n,
                                                                                std::vector<std::string>& path) {
      state[n] = 1;
      path.push_back(n);
      for (const auto& m : edges[n]) {
        if (state[m] == 1) {
          std::string cycle;
          for (const auto& p : path) cycle += p + " -> ";
          const PredicateDef* d = preds.at(n);
          fail(sources.at(n), d->line, "extend cycle: " + cycle + m);
        }
        if (state[m] == 0) dfs(m, path);
      }
      path.pop_back();
      state[n] = 2;
    };
    for (const auto& d : defs) {
      std::vector<std::string> path;
      if (state[d.name] == 0) dfs(d.name, path);
    }
  }
};

}  // namespace

GdlDefinitions parse_gdl_sources(const std::vector<std::pair<std::string, std::string>>& sources) {
  GdlDefinitions defs;
  Validator v;
  static const std::vector<PredicateDef> builtins = builtin_predicates();
  for (const auto& b : builtins) v.preds[b.name] = &b;

  for (const auto& [name, text] : sources) {
    for (const auto& block : split_blocks(name, text)) {
      if (block.keyword == "theorem") {
        TheoremDef t = build_theorem(block);
        if (v.sources.count("theorem " + t.name)) {
          throw ParseError(name + ": duplicate theorem " + t.name, block.line, 1);
        }
        v.sources["theorem " + t.name] = name;
        defs.theorems.push_back(std::move(t));
      } else {
        PredicateDef d = build_predicate(block);
        bool builtin = std::any_of(builtins.begin(), builtins.end(), [&](const auto& b) { return b.name == d.name; });
        if (builtin || v.sources.count(d.name)) {
          throw ParseError(name + ": duplicate predicate " + d.name, block.line, 1);
        }
        v.sources[d.name] = name;
        defs.predicates.push_back(std::move(d));
      }
    }
  }
  for (const auto& d : defs.predicates) v.preds[d.name] = &d;
  std::set<std::string> syms;
  for (const auto& d : defs.predicates) {
    v.check_predicate(d);
    if (!d.sym.empty() && !syms.insert(d.sym).second) {
      throw ParseError(v.sources.at(d.name) + ": duplicate sym " + d.sym, d.line, 1);
    }
  }
  v.check_cycles(defs.predicates);
  for (auto& t : defs.theorems) v.check_theorem(t);
  return defs;
}

GdlDefinitions parse_gdl(const std::string& text) { return parse_gdl_sources({{"<gdl>", text}}); }

KnowledgeBase load_kb(const std::filesystem::path& path) {
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(path)) {
    for (const auto& entry : std::filesystem::directory_iterator(path)) {
      if (entry.path().extension() == ".gdl") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }
  std::vector<std::pair<std::string, std::string>> sources;
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw std::runtime_error("cannot read " + f.string());
    std::stringstream ss;
    ss << in.rdbuf();
    sources.emplace_back(f.filename().string(), ss.str());
  }
  KnowledgeBase kb;
  kb.add(parse_gdl_sources(sources));
  return kb;
}

}  // namespace geoform
