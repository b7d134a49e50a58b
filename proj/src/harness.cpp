#include "geoform/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace geoform {

std::optional<int> difficulty_of(const ProblemRecord& record) {
  const std::size_t n = record.theorem_seqs.size();
  if (n == 0) return std::nullopt;
  if (n >= 11) return 6;
  return static_cast<int>((n + 1) / 2);
}

std::string bin_name(std::optional<int> bin) { return bin ? "l" + std::to_string(*bin) : "unbinned"; }

bool answer_matches(const Number& answer, const std::string& expected) {
  try {
    Poly p = to_poly(parse_expr(expected), [](const Expr&) -> std::string {
      throw std::invalid_argument("attribute in answer");
    });
    if (p.is_constant()) return p.constant_value() == answer;
  } catch (const std::exception&) {
  }
  return answer.to_string() == expected;
}

CheckResult check_problem(const KnowledgeBase& kb, const ProblemRecord& record) {
  CheckResult r;
  r.problem_id = record.problem_id;
  try {
    Problem p = replay_theorem_seqs(kb, record, record.theorem_seqs);
    const Goal& g = p.goal();
    r.solved = g.status == GoalStatus::Solved;
    if (g.answer) r.answer = g.answer->to_string();
    if (r.solved && g.answer && record.problem_answer && !answer_matches(*g.answer, *record.problem_answer)) {
      r.mismatch = "expected " + *record.problem_answer + ", got " + *r.answer;
    }
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

// ---------------------------------------------------------------------------
// Batch

double percent(std::size_t part, std::size_t whole) {
  if (whole == 0) return 0.0;
  return std::round(10000.0 * static_cast<double>(part) / static_cast<double>(whole)) / 100.0;
}

namespace {

double round_to(double v, int digits) {
  const double scale = std::pow(10.0, digits);
  return std::round(v * scale) / scale;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// CSV field; quotes only when needed.
std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

ReportRow summarize(const std::vector<ProblemRun>& runs, const std::string& label) {
  ReportRow row;
  row.label = label;
  row.problems = runs.size();
  double time = 0.0;
  double steps = 0.0;
  for (const auto& r : runs) {
    switch (r.outcome) {
      case Outcome::Solved:
        ++row.solved;
        time += r.elapsed_seconds;
        steps += static_cast<double>(r.steps);
        break;
      case Outcome::Unsolved: ++row.unsolved; break;
      case Outcome::Timeout: ++row.timeout; break;
    }
  }
  row.solved_pct = percent(row.solved, row.problems);
  row.unsolved_pct = percent(row.unsolved, row.problems);
  row.timeout_pct = percent(row.timeout, row.problems);
  if (row.solved > 0) {
    row.avg_time = round_to(time / static_cast<double>(row.solved), 4);
    row.avg_steps = round_to(steps / static_cast<double>(row.solved), 2);
  }
  return row;
}

std::vector<ReportRow> summary_rows(const BatchReport& report) {
  std::vector<ReportRow> rows{summarize(report.runs, "all")};
  std::vector<ProblemRun> unbinned;
  for (int b = 1; b <= kBinCount; ++b) {
    std::vector<ProblemRun> in;
    for (const auto& r : report.runs) {
      if (r.bin == b) in.push_back(r);
    }
    rows.push_back(summarize(in, bin_name(b)));
  }
  for (const auto& r : report.runs) {
    if (!r.bin) unbinned.push_back(r);
  }
  if (!unbinned.empty()) rows.push_back(summarize(unbinned, bin_name(std::nullopt)));
  return rows;
}

std::vector<std::filesystem::path> problem_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

BatchReport run_batch(const KnowledgeBase& kb, const std::filesystem::path& dir, const SearchConfig& config,
                      unsigned workers) {
  BatchReport report;
  report.config = config;
  const auto files = problem_files(dir);

  struct Slot {
    std::optional<ProblemRun> run;
    std::optional<SkippedFile> skipped;
  };
  std::vector<Slot> slots(files.size());
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      const std::string file = files[i].filename().string();
      try {
        ProblemRecord record = load_problem(files[i]);
        Problem problem(kb, record);
        SearchResult res = run_search(problem, config);
        ProblemRun run;
        run.problem_id = record.problem_id;
        run.file = file;
        run.bin = difficulty_of(record);
        run.outcome = res.outcome;
        run.elapsed_seconds = res.elapsed_seconds;
        run.steps = res.steps;
        run.theorem_seqs = res.theorem_seqs;
        if (run.outcome == Outcome::Solved && !replay_solves(kb, record, res.theorem_seqs)) {
          run.outcome = Outcome::Unsolved;
          run.replay_failed = true;
        }
        slots[i].run = std::move(run);
      } catch (const std::exception& e) {
        slots[i].skipped = SkippedFile{file, e.what()};
      }
    }
  };

  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(files.size(), 1))));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  for (auto& s : slots) {
    if (s.run) report.runs.push_back(std::move(*s.run));
    if (s.skipped) report.skipped.push_back(std::move(*s.skipped));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Reports

std::string report_summary_csv(const BatchReport& report) {
  const auto rows = summary_rows(report);
  std::ostringstream out;
  out << "method,strategy,problems,solved,unsolved,timeout,solved_pct,unsolved_pct,timeout_pct";
  for (int b = 1; b <= kBinCount; ++b) out << ",l" << b << "_pct";
  out << ",avg_time,avg_steps\n";
  const ReportRow& all = rows[0];
  out << method_name(report.config.method) << ',' << strategy_name(report.config.strategy) << ',' << all.problems
      << ',' << all.solved << ',' << all.unsolved << ',' << all.timeout << ',' << fixed(all.solved_pct, 2) << ','
      << fixed(all.unsolved_pct, 2) << ',' << fixed(all.timeout_pct, 2);
  for (int b = 1; b <= kBinCount; ++b) out << ',' << fixed(rows[static_cast<std::size_t>(b)].solved_pct, 2);
  out << ',' << fixed(all.avg_time, 4) << ',' << fixed(all.avg_steps, 2) << '\n';
  return out.str();
}

std::string report_bins_csv(const BatchReport& report) {
  std::ostringstream out;
  out << "bin,problems,solved,unsolved,timeout,solved_pct,avg_time,avg_steps\n";
  const auto rows = summary_rows(report);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const ReportRow& r = rows[i];
    out << r.label << ',' << r.problems << ',' << r.solved << ',' << r.unsolved << ',' << r.timeout << ','
        << fixed(r.solved_pct, 2) << ',' << fixed(r.avg_time, 4) << ',' << fixed(r.avg_steps, 2) << '\n';
  }
  return out.str();
}

std::string report_problems_csv(const BatchReport& report) {
  std::ostringstream out;
  out << "problem_id,file,bin,outcome,replay_failed,time,steps,theorem_seqs\n";
  for (const auto& r : report.runs) {
    std::string seqs;
    for (const auto& t : r.theorem_seqs) seqs += (seqs.empty() ? "" : ";") + t;
    out << field(r.problem_id) << ',' << field(r.file) << ',' << bin_name(r.bin) << ',' << outcome_name(r.outcome)
        << ',' << (r.replay_failed ? 1 : 0) << ',' << fixed(r.elapsed_seconds, 4) << ',' << r.steps << ','
        << field(seqs) << '\n';
  }
  return out.str();
}

nlohmann::json report_json(const BatchReport& report) {
  using nlohmann::json;
  json j;
  j["config"] = {{"method", method_name(report.config.method)},
                 {"strategy", strategy_name(report.config.strategy)},
                 {"max_depth", report.config.max_depth},
                 {"beam_size", report.config.beam_size},
                 {"timeout_seconds", report.config.timeout_seconds},
                 {"seed", report.config.seed}};
  json rows = json::array();
  for (const auto& r : summary_rows(report)) {
    rows.push_back({{"label", r.label},
                    {"problems", r.problems},
                    {"solved", r.solved},
                    {"unsolved", r.unsolved},
                    {"timeout", r.timeout},
                    {"solved_pct", r.solved_pct},
                    {"unsolved_pct", r.unsolved_pct},
                    {"timeout_pct", r.timeout_pct},
                    {"avg_time", r.avg_time},
                    {"avg_steps", r.avg_steps}});
  }
  j["summary"] = rows;
  json runs = json::array();
  for (const auto& r : report.runs) {
    runs.push_back({{"problem_id", r.problem_id},
                    {"file", r.file},
                    {"bin", bin_name(r.bin)},
                    {"outcome", outcome_name(r.outcome)},
                    {"replay_failed", r.replay_failed},
                    {"time", round_to(r.elapsed_seconds, 4)},
                    {"steps", r.steps},
                    {"theorem_seqs", r.theorem_seqs}});
  }
  j["problems"] = runs;
  json skipped = json::array();
  for (const auto& s : report.skipped) skipped.push_back({{"file", s.file}, {"error", s.error}});
  j["skipped"] = skipped;
  return j;
}

void write_report(const BatchReport& report, const std::filesystem::path& stem) {
  auto put = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path.string());
  };
  const std::string base = stem.string();
  put(base + "_summary.csv", report_summary_csv(report));
  put(base + "_bins.csv", report_bins_csv(report));
  put(base + "_problems.csv", report_problems_csv(report));
  put(base + ".json", report_json(report).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Augmentation

namespace {

// Goal text for a stored condition, or nullopt when it cannot be a goal.
std::optional<std::string> goal_text(const Problem& p, const Condition& c) {
  if (!c.is_equation()) {
    const PredicateDef* def = p.kb().predicate(c.predicate);
    if (!def || (def->kind != PredicateKind::Entity && def->kind != PredicateKind::Relation)) return std::nullopt;
    return "Relation(" + p.inverse_parse(c) + ")";
  }
  CdlStatement s = parse_cdl(p.inverse_parse(c), &p.kb());
  if (s.exprs.size() != 2) return std::nullopt;
  if (s.exprs[0].kind == Expr::Kind::Attr && s.exprs[1].kind == Expr::Kind::Number) {
    return "Value(" + to_text(s.exprs[0]) + ")";
  }
  return "Equal(" + to_text(s.exprs[0]) + "," + to_text(s.exprs[1]) + ")";
}

}  // namespace

std::vector<ProblemRecord> augment_problem(const KnowledgeBase& kb, const ProblemRecord& record) {
  const std::size_t n = record.theorem_seqs.size();
  if (n < 2) return {};

  // Replay step by step, remembering the id range each step added.
  Problem p(kb, record);
  std::vector<std::pair<int, int>> added;
  for (const auto& label : record.theorem_seqs) {
    const int before = static_cast<int>(p.size());
    interactive_apply(p, label);
    added.emplace_back(before, static_cast<int>(p.size()));
  }
  if (p.goal().status != GoalStatus::Solved) return {};
  const std::vector<int> closure = p.goal_closure();
  const std::set<int> on_path(closure.begin(), closure.end());

  std::vector<ProblemRecord> out;
  std::set<std::string> seen_goals{record.goal_cdl};
  for (std::size_t k = 1; k < n; ++k) {
    for (int id = added[k - 1].second - 1; id >= added[k - 1].first; --id) {
      if (!on_path.count(id)) continue;
      auto goal = goal_text(p, p.conditions()[static_cast<std::size_t>(id)]);
      if (!goal || seen_goals.count(*goal)) continue;
      ProblemRecord derived = record;
      derived.problem_id = record.problem_id + "_a" + std::to_string(k);
      derived.goal_cdl = *goal;
      derived.theorem_seqs.assign(record.theorem_seqs.begin(), record.theorem_seqs.begin() + static_cast<long>(k));
      derived.problem_answer.reset();
      try {
        Problem check = replay_theorem_seqs(kb, derived, derived.theorem_seqs);
        if (check.goal().status != GoalStatus::Solved) continue;
        if (check.goal().answer) derived.problem_answer = check.goal().answer->to_string();
      } catch (const std::exception&) {
        continue;
      }
      seen_goals.insert(*goal);
      out.push_back(std::move(derived));
      break;
    }
  }
  return out;
}

AugmentSummary augment_directory(const KnowledgeBase& kb, const std::filesystem::path& dir) {
  AugmentSummary s;
  for (const auto& file : problem_files(dir)) {
    try {
      ProblemRecord record = load_problem(file);
      ++s.parents;
      if (record.theorem_seqs.size() >= 2) ++s.multi_step;
      auto derived = augment_problem(kb, record);
      if (record.theorem_seqs.size() >= 2 && derived.empty()) {
        s.notes.push_back(record.problem_id + ": no derivable intermediate goal");
      }
      for (auto& d : derived) s.derived.push_back(std::move(d));
    } catch (const std::exception& e) {
      s.notes.push_back(file.filename().string() + ": " + e.what());
    }
  }
  return s;
}

}  // namespace geoform
