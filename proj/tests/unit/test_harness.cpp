#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "../support/report_check.hpp"
#include "geoform/harness.hpp"

using namespace geoform;
namespace fs = std::filesystem;

namespace {

const KnowledgeBase& bundled() {
  static const KnowledgeBase kb = load_kb(std::string(GEOFORM_DATA_DIR) + "/kb");
  return kb;
}

const fs::path kProblems = fs::path(GEOFORM_DATA_DIR) / "problems";

fs::path scratch_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("geoform_" + name + "_" + std::to_string(std::random_device{}()));
  fs::create_directories(d);
  return d;
}

ProblemRun run(Outcome o, std::optional<int> bin, double t = 1.0, std::size_t steps = 4) {
  ProblemRun r;
  r.outcome = o;
  r.bin = bin;
  r.elapsed_seconds = t;
  r.steps = steps;
  return r;
}

}  // namespace

TEST_CASE("difficulty bins follow the annotated length") {
  auto with = [](std::size_t n) {
    ProblemRecord r;
    r.theorem_seqs.assign(n, "t");
    r.has_theorem_seqs = n > 0;
    return difficulty_of(r);
  };
  CHECK(with(1) == 1);
  CHECK(with(2) == 1);
  CHECK(with(3) == 2);
  CHECK(with(4) == 2);
  CHECK(with(6) == 3);
  CHECK(with(10) == 5);
  CHECK(with(11) == 6);
  CHECK(with(40) == 6);
  CHECK_FALSE(with(0).has_value());
  CHECK(bin_name(2) == "l2");
  CHECK(bin_name(std::nullopt) == "unbinned");
}

TEST_CASE("answers compare as exact values") {
  CHECK(answer_matches(Number(80), "80"));
  CHECK(answer_matches(Number(80), "80.0"));
  CHECK(answer_matches(*Number(32).sqrt(), "4*sqrt(2)"));
  CHECK(answer_matches(Number(12) + *Number(32).sqrt(), "12+4*sqrt(2)"));
  CHECK(answer_matches(Number(Rational(1, 2)), "1/2"));
  CHECK_FALSE(answer_matches(Number(81), "80"));
}

TEST_CASE("summaries count outcomes and round percentages") {
  std::vector<ProblemRun> runs;
  for (int i = 0; i < 8; ++i) runs.push_back(run(Outcome::Solved, 1, 0.5 + i, 3));
  runs.push_back(run(Outcome::Unsolved, 1));
  runs.push_back(run(Outcome::Timeout, 2));
  ReportRow r = summarize(runs, "all");
  CHECK(r.problems == 10);
  CHECK(r.solved_pct == doctest::Approx(80.0));
  CHECK(r.unsolved_pct == doctest::Approx(10.0));
  CHECK(r.timeout_pct == doctest::Approx(10.0));
  CHECK(r.avg_time == doctest::Approx(4.0));
  CHECK(r.avg_steps == doctest::Approx(3.0));
  CHECK(percent(1, 3) == doctest::Approx(33.33));
  CHECK(percent(2, 3) == doctest::Approx(66.67));
  CHECK(percent(0, 0) == 0.0);
  BatchReport b;
  b.runs = runs;
  auto rows = summary_rows(b);
  REQUIRE(rows.size() == 7);
  CHECK(rows[1].label == "l1");
  CHECK(rows[1].solved_pct == doctest::Approx(88.89));
  CHECK(rows[2].timeout == 1);
  b.runs.push_back(run(Outcome::Solved, std::nullopt));
  CHECK(summary_rows(b).back().label == "unbinned");
}

TEST_CASE("report tables agree with the per-problem rows") {
  BatchReport b;
  std::mt19937 rng(2);
  for (int i = 0; i < 37; ++i) {
    const Outcome o = static_cast<Outcome>(rng() % 3);
    std::optional<int> bin;
    if (rng() % 5) bin = static_cast<int>(rng() % 6) + 1;
    ProblemRun r = run(o, bin, (rng() % 1000) / 100.0, rng() % 50);
    r.problem_id = "q" + std::to_string(i);
    r.file = "q,\"" + std::to_string(i) + "\".json";
    b.runs.push_back(r);
  }
  CHECK(oracle::recompute_mismatches(report_summary_csv(b), report_bins_csv(b), report_problems_csv(b)).empty());
  auto j = report_json(b);
  CHECK(j.at("problems").size() == 37);
  const auto summary = oracle::read_csv(report_summary_csv(b));
  CHECK(std::to_string(j.at("summary")[0].at("solved").get<std::size_t>()) == summary[0].at("solved"));
  CHECK(oracle::read_csv(report_problems_csv(b))[5].at("file") == b.runs[5].file);
}

TEST_CASE("empty and unreadable directories") {
  fs::path d = scratch_dir("empty");
  SearchConfig c;
  BatchReport b = run_batch(bundled(), d, c);
  CHECK(b.runs.empty());
  CHECK(summary_rows(b)[0].solved_pct == 0.0);
  std::ofstream(d / "bad.json") << "{ not json";
  b = run_batch(bundled(), d, c);
  CHECK(b.runs.empty());
  CHECK(b.skipped.size() == 1);
  write_report(b, d / "out");
  CHECK(fs::exists(d / "out_summary.csv"));
  CHECK(fs::exists(d / "out.json"));
  CHECK_THROWS(write_report(b, d / "missing" / "deeper" / "out"));
  fs::remove_all(d);
}

TEST_CASE("batch results do not depend on the worker count") {
  fs::path d = scratch_dir("batch");
  for (const char* id : {"p01", "p02", "p04", "p08", "p12"}) fs::copy(kProblems / (std::string(id) + ".json"), d);
  SearchConfig c;
  c.timeout_seconds = 20;
  BatchReport one = run_batch(bundled(), d, c, 1);
  BatchReport two = run_batch(bundled(), d, c, 3);
  REQUIRE(one.runs.size() == 5);
  REQUIRE(two.runs.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(one.runs[i].problem_id == two.runs[i].problem_id);
    CHECK(one.runs[i].outcome == Outcome::Solved);
    CHECK(one.runs[i].outcome == two.runs[i].outcome);
    CHECK(one.runs[i].theorem_seqs == two.runs[i].theorem_seqs);
    CHECK(one.runs[i].steps == two.runs[i].steps);
  }
  fs::remove_all(d);
}

TEST_CASE("check replays annotated sequences") {
  for (const auto& f : problem_files(kProblems)) {
    CheckResult r = check_problem(bundled(), load_problem(f));
    INFO(f.string(), " ", r.error, " ", r.mismatch);
    CHECK(r.ok());
  }
  ProblemRecord wrong = load_problem(kProblems / "p01.json");
  wrong.problem_answer = "81";
  CheckResult r = check_problem(bundled(), wrong);
  CHECK(r.solved);
  CHECK_FALSE(r.ok());
  CHECK_FALSE(r.mismatch.empty());
}

TEST_CASE("augmentation derives replayable problems") {
  ProblemRecord parent = load_problem(kProblems / "p17.json");
  auto derived = augment_problem(bundled(), parent);
  REQUIRE_FALSE(derived.empty());
  CHECK(derived.size() <= parent.theorem_seqs.size() - 1);
  std::set<std::string> goals;
  for (const auto& d : derived) {
    CHECK(d.problem_id.rfind("p17_a", 0) == 0);
    CHECK(d.theorem_seqs.size() < parent.theorem_seqs.size());
    CHECK(d.construction_cdl == parent.construction_cdl);
    CHECK(goals.insert(d.goal_cdl).second);
    CHECK(goals.count(parent.goal_cdl) == 0);
    CHECK(replay_solves(bundled(), d, d.theorem_seqs));
  }
  CHECK(augment_problem(bundled(), load_problem(kProblems / "p01.json")).empty());
}
