#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "geoform/expr.hpp"
#include "geoform/kb.hpp"

namespace geoform {

enum class CdlCategory { Construction, Condition, Goal };
enum class GoalKind { Value, Equal, Relation };

const char* goal_kind_name(GoalKind k);

/// One parsed CDL line.
///
/// Construction and relation conditions keep their point groups. Equal and
/// Equation conditions keep their expressions. Goals set goal_kind; a
/// Relation goal stores the inner predicate and groups.
struct CdlStatement {
  CdlCategory category = CdlCategory::Condition;
  std::string predicate;
  std::vector<std::string> groups;
  std::vector<Expr> exprs;
  GoalKind goal_kind = GoalKind::Value;

  friend bool operator==(const CdlStatement&, const CdlStatement&);
};

/// Parses one statement. With a knowledge base, predicates and attribute
/// terms are checked against it. hint disambiguates Equal(...), which is a
/// condition unless it appears as a goal.
CdlStatement parse_cdl(const std::string& text, const KnowledgeBase* kb = nullptr,
                       std::optional<CdlCategory> hint = std::nullopt);

/// Formal text of a statement; parse_cdl(format_cdl(s)) == s.
std::string format_cdl(const CdlStatement& s);

/// Problem file record.
struct ProblemRecord {
  std::string problem_id;
  std::string description;
  std::vector<std::string> construction_cdl;
  std::vector<std::string> text_cdl;
  std::string goal_cdl;
  std::vector<std::string> theorem_seqs;
  std::optional<std::string> problem_answer;
  bool has_theorem_seqs = false;
};

ProblemRecord problem_from_json(const nlohmann::json& j);
nlohmann::json problem_to_json(const ProblemRecord& r);
ProblemRecord load_problem(const std::filesystem::path& path);

}  // namespace geoform
