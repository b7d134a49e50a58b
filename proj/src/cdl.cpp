#include "geoform/cdl.hpp"

#include <cctype>
#include <fstream>
#include <stdexcept>

namespace geoform {

const char* goal_kind_name(GoalKind k) {
  switch (k) {
    case GoalKind::Value: return "Value";
    case GoalKind::Equal: return "Equal";
    case GoalKind::Relation: return "Relation";
  }
  return "?";
}

bool operator==(const CdlStatement& a, const CdlStatement& b) {
  if (a.category != b.category || a.predicate != b.predicate || a.groups != b.groups || a.exprs != b.exprs) {
    return false;
  }
  return a.category != CdlCategory::Goal || a.goal_kind == b.goal_kind;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct Call {
  std::string name;
  std::string inner;
  int inner_column;  // 1-based column of inner text in the statement
};

[[noreturn]] void fail(const std::string& statement, const std::string& msg, int column = 1) {
  throw ParseError(msg + " in '" + statement + "'", 0, column);
}

Call split_call(const std::string& text) {
  std::size_t open = text.find('(');
  if (open == std::string::npos || text.back() != ')') fail(text, "expected Predicate(...)");
  std::string name = trim(text.substr(0, open));
  if (name.empty() || !std::all_of(name.begin(), name.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
      })) {
    fail(text, "malformed predicate name");
  }
  int depth = 0;
  for (std::size_t i = open; i < text.size(); ++i) {
    if (text[i] == '(') ++depth;
    if (text[i] == ')' && --depth == 0 && i + 1 != text.size()) {
      fail(text, "unexpected text after ')'", static_cast<int>(i) + 2);
    }
    if (depth < 0) fail(text, "unbalanced parentheses", static_cast<int>(i) + 1);
  }
  if (depth != 0) fail(text, "unbalanced parentheses", static_cast<int>(text.size()));
  return Call{name, text.substr(open + 1, text.size() - open - 2), static_cast<int>(open) + 2};
}

std::vector<std::string> split_args(const std::string& inner) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : inner) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::size_t top_comma(const std::string& inner) {
  int depth = 0;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    if (inner[i] == '(') ++depth;
    if (inner[i] == ')') --depth;
    if (inner[i] == ',' && depth == 0) return i;
  }
  return 0;
}

std::vector<std::string> point_groups(const std::string& statement, const std::string& inner) {
  std::vector<std::string> groups;
  for (const auto& g : split_args(inner)) {
    if (g.empty() || !std::all_of(g.begin(), g.end(), [](char c) { return std::isupper(static_cast<unsigned char>(c)); })) {
      fail(statement, "malformed point sequence '" + g + "'");
    }
    groups.push_back(g);
  }
  return groups;
}

Expr expression(const std::string& statement, const std::string& text, int column, const KnowledgeBase* kb) {
  Expr e;
  try {
    e = parse_expr(text);
  } catch (const ParseError& err) {
    std::string msg = err.what();
    std::size_t loc = msg.rfind(" (line ");
    if (loc != std::string::npos) msg = msg.substr(0, loc);
    fail(statement, "malformed expression: " + msg, column + std::max(err.column(), 1) - 1);
  }
  if (kb) {
    for_each_attr(e, [&](const Expr& a) {
      const PredicateDef* d = kb->predicate(a.name);
      if (!d) fail(statement, "unknown predicate " + a.name);
      if (d->kind != PredicateKind::Attribution) fail(statement, a.name + " is not an attribution");
      if (a.points().size() != d->arity()) fail(statement, "wrong number of points in " + to_text(a));
    });
  }
  return e;
}

void check_relation(const std::string& statement, const KnowledgeBase* kb, const std::string& pred,
                    const std::vector<std::string>& groups) {
  if (!kb) return;
  const PredicateDef* d = kb->predicate(pred);
  if (!d) fail(statement, "unknown predicate " + pred);
  if (d->kind == PredicateKind::Attribution || d->kind == PredicateKind::Algebra ||
      d->kind == PredicateKind::Structure) {
    fail(statement, pred + " cannot be stated as a relation here");
  }
  std::size_t n = 0;
  for (const auto& g : groups) n += g.size();
  if (!d->variadic && n != d->arity()) {
    fail(statement, pred + " expects " + std::to_string(d->arity()) + " points");
  }
}

}  // namespace

CdlStatement parse_cdl(const std::string& raw, const KnowledgeBase* kb, std::optional<CdlCategory> hint) {
  const std::string text = trim(raw);
  if (text.empty()) fail(raw, "empty statement");
  Call call = split_call(text);
  CdlStatement s;
  s.predicate = call.name;

  if (call.name == "Shape" || call.name == "Collinear" || call.name == "Cocircular") {
    if (hint && *hint != CdlCategory::Construction) fail(text, call.name + " is a construction statement");
    s.category = CdlCategory::Construction;
    s.groups = point_groups(text, call.inner);
    if (call.name == "Shape") {
      if (s.groups.size() < 3) fail(text, "a shape needs at least three edges");
      for (std::size_t i = 0; i < s.groups.size(); ++i) {
        const auto& e = s.groups[i];
        const auto& next = s.groups[(i + 1) % s.groups.size()];
        if (e.size() != 2) fail(text, "shape edges are point pairs, got '" + e + "'");
        if (e[1] != next[0]) fail(text, "shape edges do not form a closed chain");
      }
    } else if (call.name == "Collinear") {
      if (s.groups.size() != 1 || s.groups[0].size() < 3) fail(text, "Collinear needs one run of >= 3 points");
    } else {
      if (s.groups.size() != 2 || s.groups[0].size() != 1) fail(text, "Cocircular takes a centre and points");
    }
    return s;
  }
  if (hint && *hint == CdlCategory::Construction) fail(text, "not a construction predicate: " + call.name);

  bool goal = hint && *hint == CdlCategory::Goal;
  if (call.name == "Value") {
    s.category = CdlCategory::Goal;
    s.goal_kind = GoalKind::Value;
    s.exprs.push_back(expression(text, call.inner, call.inner_column, kb));
    return s;
  }
  if (call.name == "Relation") {
    s.category = CdlCategory::Goal;
    s.goal_kind = GoalKind::Relation;
    Call inner = split_call(trim(call.inner));
    s.predicate = inner.name;
    s.groups = point_groups(text, inner.inner);
    check_relation(text, kb, s.predicate, s.groups);
    return s;
  }
  if (call.name == "Equal") {
    auto parts = split_args(call.inner);
    if (parts.size() != 2) fail(text, "Equal takes two expressions");
    s.category = goal ? CdlCategory::Goal : CdlCategory::Condition;
    s.goal_kind = GoalKind::Equal;
    int col = call.inner_column;
    s.exprs.push_back(expression(text, parts[0], col, kb));
    s.exprs.push_back(expression(text, parts[1], col + static_cast<int>(top_comma(call.inner)) + 1, kb));
    return s;
  }
  if (goal) fail(text, "goal must be Value, Equal or Relation");
  if (call.name == "Equation") {
    s.category = CdlCategory::Condition;
    s.exprs.push_back(expression(text, call.inner, call.inner_column, kb));
    return s;
  }
  if (call.name == "Free") {
    s.category = CdlCategory::Condition;
    std::string name = trim(call.inner);
    if (name.empty() || !std::islower(static_cast<unsigned char>(name[0]))) fail(text, "Free expects a lowercase symbol");
    s.exprs.push_back(Expr::free(name));
    return s;
  }
  s.category = CdlCategory::Condition;
  s.groups = point_groups(text, call.inner);
  check_relation(text, kb, s.predicate, s.groups);
  return s;
}

std::string format_cdl(const CdlStatement& s) {
  auto groups = [&]() {
    std::string out;
    for (std::size_t i = 0; i < s.groups.size(); ++i) {
      if (i) out += ",";
      out += s.groups[i];
    }
    return out;
  };
  if (s.category == CdlCategory::Goal) {
    switch (s.goal_kind) {
      case GoalKind::Value: return "Value(" + to_text(s.exprs.at(0)) + ")";
      case GoalKind::Equal: return "Equal(" + to_text(s.exprs.at(0)) + "," + to_text(s.exprs.at(1)) + ")";
      case GoalKind::Relation: return "Relation(" + s.predicate + "(" + groups() + "))";
    }
  }
  if (s.predicate == "Equal") return "Equal(" + to_text(s.exprs.at(0)) + "," + to_text(s.exprs.at(1)) + ")";
  if (s.predicate == "Equation") return "Equation(" + to_text(s.exprs.at(0)) + ")";
  if (s.predicate == "Free") return "Free(" + s.exprs.at(0).name + ")";
  return s.predicate + "(" + groups() + ")";
}

namespace {

std::vector<std::string> string_list(const nlohmann::json& j, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key) || j[key].is_null()) return out;
  if (!j[key].is_array()) throw std::runtime_error(std::string("field ") + key + " must be a list of strings");
  for (const auto& v : j[key]) out.push_back(v.get<std::string>());
  return out;
}

std::string scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

ProblemRecord problem_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::runtime_error("problem must be a JSON object");
  ProblemRecord r;
  if (!j.contains("problem_id")) throw std::runtime_error("missing field problem_id");
  r.problem_id = scalar_text(j["problem_id"]);
  if (j.contains("description") && j["description"].is_string()) r.description = j["description"];
  r.construction_cdl = string_list(j, "construction_cdl");
  r.text_cdl = string_list(j, "text_cdl");
  if (!j.contains("goal_cdl") || !j["goal_cdl"].is_string()) throw std::runtime_error("missing field goal_cdl");
  r.goal_cdl = j["goal_cdl"];
  r.has_theorem_seqs = j.contains("theorem_seqs") && j["theorem_seqs"].is_array();
  r.theorem_seqs = string_list(j, "theorem_seqs");
  if (j.contains("problem_answer") && !j["problem_answer"].is_null()) r.problem_answer = scalar_text(j["problem_answer"]);
  return r;
}

nlohmann::json problem_to_json(const ProblemRecord& r) {
  nlohmann::json j;
  j["problem_id"] = r.problem_id;
  j["description"] = r.description;
  j["construction_cdl"] = r.construction_cdl;
  j["text_cdl"] = r.text_cdl;
  j["goal_cdl"] = r.goal_cdl;
  j["theorem_seqs"] = r.theorem_seqs;
  if (r.problem_answer) j["problem_answer"] = *r.problem_answer;
  return j;
}

ProblemRecord load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  return problem_from_json(j);
}

}  // namespace geoform
