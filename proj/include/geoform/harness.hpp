#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "geoform/search.hpp"

namespace geoform {

inline constexpr int kBinCount = 6;

/// Difficulty bin 1..6 from the annotated sequence length (<=2, 3-4, 5-6,
/// 7-8, 9-10, >=11); nullopt when no sequence is annotated.
std::optional<int> difficulty_of(const ProblemRecord& record);
/// "l1".."l6", or "unbinned".
std::string bin_name(std::optional<int> bin);

/// True when answer equals the expected text, read as an exact expression
/// ("12+4*sqrt(2)") when it parses and as plain text otherwise.
bool answer_matches(const Number& answer, const std::string& expected);

struct CheckResult {
  std::string problem_id;
  bool solved = false;
  std::optional<std::string> answer;
  /// Empty when no expected answer is recorded or the answers agree.
  std::string mismatch;
  std::string error;

  bool ok() const { return solved && mismatch.empty() && error.empty(); }
};

/// Replays the annotated theorem_seqs on a fresh problem.
CheckResult check_problem(const KnowledgeBase& kb, const ProblemRecord& record);

struct ProblemRun {
  std::string problem_id;
  std::string file;
  std::optional<int> bin;
  Outcome outcome = Outcome::Unsolved;
  /// A search reported solved but its sequence did not replay.
  bool replay_failed = false;
  double elapsed_seconds = 0.0;
  std::size_t steps = 0;
  std::vector<std::string> theorem_seqs;
};

struct SkippedFile {
  std::string file;
  std::string error;
};

struct BatchReport {
  SearchConfig config;
  std::vector<ProblemRun> runs;
  std::vector<SkippedFile> skipped;
};

/// One row of the summary tables: a whole batch or one difficulty bin.
struct ReportRow {
  std::string label;
  std::size_t problems = 0;
  std::size_t solved = 0;
  std::size_t unsolved = 0;
  std::size_t timeout = 0;
  double solved_pct = 0.0;
  double unsolved_pct = 0.0;
  double timeout_pct = 0.0;
  /// Means over solved runs; 0 when nothing was solved.
  double avg_time = 0.0;
  double avg_steps = 0.0;
};

/// Percentage rounded to two decimals; 0 for an empty denominator.
double percent(std::size_t part, std::size_t whole);

ReportRow summarize(const std::vector<ProblemRun>& runs, const std::string& label);
/// The batch row followed by rows l1..l6 and, if present, "unbinned".
std::vector<ReportRow> summary_rows(const BatchReport& report);

/// Problem files (*.json) of a directory, sorted by name.
std::vector<std::filesystem::path> problem_files(const std::filesystem::path& dir);

/// Runs every problem under config, each with its own time budget. Solved
/// results count only after an independent replay. Unreadable files are
/// listed in skipped. Results do not depend on the worker count.
BatchReport run_batch(const KnowledgeBase& kb, const std::filesystem::path& dir, const SearchConfig& config,
                      unsigned workers = 1);

/// Summary table: method, strategy, counts, percentages, per-bin success,
/// mean time and steps.
std::string report_summary_csv(const BatchReport& report);
/// Per-bin table: bin, counts, success percentage, mean time and steps.
std::string report_bins_csv(const BatchReport& report);
/// Per-problem table.
std::string report_problems_csv(const BatchReport& report);
nlohmann::json report_json(const BatchReport& report);
/// Writes <stem>_summary.csv, <stem>_bins.csv, <stem>_problems.csv and
/// <stem>.json; throws std::runtime_error on an unwritable path.
void write_report(const BatchReport& report, const std::filesystem::path& stem);

/// Derived problems of a solved record: for each proper prefix of the
/// annotated sequence, the newest condition it adds on the path to the goal
/// becomes a new goal. Every returned record replays to solved.
std::vector<ProblemRecord> augment_problem(const KnowledgeBase& kb, const ProblemRecord& record);

struct AugmentSummary {
  std::size_t parents = 0;
  std::size_t multi_step = 0;
  std::vector<ProblemRecord> derived;
  std::vector<std::string> notes;
};

AugmentSummary augment_directory(const KnowledgeBase& kb, const std::filesystem::path& dir);

}  // namespace geoform
