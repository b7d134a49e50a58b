// Command-line front end: solve, batch, augment, check and serve.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <thread>

#include "geoform/harness.hpp"
#include "geoform/session.hpp"

namespace {

struct SearchFlags {
  std::string method = "fw";
  std::string strategy = "bfs";
  double timeout = 30.0;
  int depth = 15;
  int beam = 20;
  std::uint64_t seed = 0;

  void add(CLI::App* app) {
    app->add_option("--method", method, "fw or bw")->check(CLI::IsMember({"fw", "bw", "forward", "backward"}));
    app->add_option("--strategy", strategy, "bfs, dfs, rs or bs")
        ->check(CLI::IsMember({"bfs", "dfs", "rs", "bs"}, CLI::ignore_case));
    app->add_option("--timeout", timeout, "seconds per problem")->check(CLI::PositiveNumber);
    app->add_option("--depth", depth, "maximum search depth")->check(CLI::PositiveNumber);
    app->add_option("--beam", beam, "beam size")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "random seed");
  }

  geoform::SearchConfig config() const {
    geoform::SearchConfig c;
    c.method = geoform::parse_method(method);
    c.strategy = geoform::parse_strategy(strategy);
    c.timeout_seconds = timeout;
    c.max_depth = depth;
    c.beam_size = beam;
    c.seed = seed;
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Formal plane geometry reasoning engine"};
  app.require_subcommand(1);
  std::string kb_dir = GEOFORM_DATA_DIR "/kb";
  app.add_option("--kb", kb_dir, "knowledge base directory")->check(CLI::ExistingDirectory);

  SearchFlags solve_flags;
  std::string solve_file;
  bool solve_json = false;
  auto* solve = app.add_subcommand("solve", "search for a solution of one problem");
  solve->add_option("problem", solve_file, "problem file")->required()->check(CLI::ExistingFile);
  solve->add_flag("--json", solve_json, "print the result as JSON");
  solve_flags.add(solve);

  SearchFlags batch_flags;
  std::string batch_dir;
  std::string batch_out;
  unsigned batch_workers = 1;
  auto* batch = app.add_subcommand("batch", "search every problem of a directory and write a report");
  batch->add_option("dir", batch_dir, "problem directory")->required()->check(CLI::ExistingDirectory);
  batch->add_option("--out", batch_out, "report path stem (writes <stem>.json and <stem>_*.csv)");
  batch->add_option("--workers", batch_workers, "parallel workers")->check(CLI::PositiveNumber);
  batch_flags.add(batch);

  std::string augment_dir;
  std::string augment_out;
  auto* augment = app.add_subcommand("augment", "derive new problems from intermediate goals");
  augment->add_option("dir", augment_dir, "problem directory")->required()->check(CLI::ExistingDirectory);
  augment->add_option("--out", augment_out, "directory for derived problem files");

  std::string check_file;
  auto* check = app.add_subcommand("check", "replay the annotated theorem sequence");
  check->add_option("problem", check_file, "problem file or directory")->required()->check(CLI::ExistingPath);

  geoform::ServeOptions serve_opts;
  std::string problem_dir = GEOFORM_DATA_DIR "/problems";
  auto* serve = app.add_subcommand("serve", "start the session HTTP service");
  serve->add_option("--host", serve_opts.host, "bind address")->envname("GEOFORM_HOST");
  serve->add_option("--port", serve_opts.port, "port")->envname("GEOFORM_PORT");
  serve->add_option("--problems", problem_dir, "problem directory")->envname("GEOFORM_PROBLEMS");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) {
      serve_opts.kb_dir = kb_dir;
      serve_opts.problem_dir = problem_dir;
      return geoform::serve(serve_opts);
    }

    const geoform::KnowledgeBase kb = geoform::load_kb(kb_dir);

    if (*solve) {
      const auto record = geoform::load_problem(solve_file);
      geoform::Problem problem(kb, record);
      const auto config = solve_flags.config();
      const auto result = geoform::run_search(problem, config);
      const bool verified =
          result.outcome == geoform::Outcome::Solved && geoform::replay_solves(kb, record, result.theorem_seqs);
      if (solve_json) {
        nlohmann::json j{{"problem_id", record.problem_id},
                         {"method", geoform::method_name(config.method)},
                         {"strategy", geoform::strategy_name(config.strategy)},
                         {"outcome", geoform::outcome_name(result.outcome)},
                         {"replay_verified", verified},
                         {"theorem_seqs", result.theorem_seqs},
                         {"elapsed_seconds", result.elapsed_seconds},
                         {"steps", result.steps}};
        std::cout << j.dump(2) << '\n';
      } else {
        std::cout << record.problem_id << ": " << geoform::outcome_name(result.outcome) << " in " << result.steps
                  << " steps, " << result.elapsed_seconds << " s" << (verified ? " (replay verified)" : "") << '\n';
        for (const auto& t : result.theorem_seqs) std::cout << "  " << t << '\n';
      }
      return 0;
    }

    if (*batch) {
      const auto report = geoform::run_batch(kb, batch_dir, batch_flags.config(), batch_workers);
      for (const auto& s : report.skipped) std::cerr << "skipped " << s.file << ": " << s.error << '\n';
      if (!batch_out.empty()) geoform::write_report(report, batch_out);
      std::cout << geoform::report_summary_csv(report) << '\n' << geoform::report_bins_csv(report);
      return 0;
    }

    if (*augment) {
      const auto summary = geoform::augment_directory(kb, augment_dir);
      for (const auto& n : summary.notes) std::cerr << "note: " << n << '\n';
      if (!augment_out.empty()) {
        std::filesystem::create_directories(augment_out);
        for (const auto& d : summary.derived) {
          std::ofstream out(std::filesystem::path(augment_out) / (d.problem_id + ".json"));
          out << geoform::problem_to_json(d).dump(2) << '\n';
        }
      } else {
        for (const auto& d : summary.derived) std::cout << geoform::problem_to_json(d).dump() << '\n';
      }
      std::cerr << summary.parents << " problems, " << summary.multi_step << " multi-step, "
                << summary.derived.size() << " derived\n";
      return 0;
    }

    if (*check) {
      std::vector<std::filesystem::path> files;
      if (std::filesystem::is_directory(check_file)) {
        files = geoform::problem_files(check_file);
      } else {
        files.push_back(check_file);
      }
      std::size_t ok = 0;
      for (const auto& f : files) {
        geoform::CheckResult r;
        try {
          r = geoform::check_problem(kb, geoform::load_problem(f));
        } catch (const std::exception& e) {
          r.problem_id = f.filename().string();
          r.error = e.what();
        }
        ok += r.ok() ? 1 : 0;
        std::cout << r.problem_id << ": " << (r.ok() ? "solved" : "FAILED");
        if (r.answer) std::cout << " answer " << *r.answer;
        if (!r.mismatch.empty()) std::cout << " (" << r.mismatch << ')';
        if (!r.error.empty()) std::cout << " (" << r.error << ')';
        std::cout << '\n';
      }
      std::cout << ok << '/' << files.size() << " replayed to solved\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
