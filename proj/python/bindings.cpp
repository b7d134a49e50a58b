// Python module: problems, results and hypertrees cross the boundary as
// JSON text; the Python package decodes them.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "geoform/harness.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

geoform::ProblemRecord record_of(const std::string& problem_json) {
  return geoform::problem_from_json(json::parse(problem_json));
}

class Engine {
 public:
  explicit Engine(const std::string& kb_path) : kb_(geoform::load_kb(kb_path)) {}

  std::vector<std::string> theorems() const {
    std::vector<std::string> out;
    for (const auto& t : kb_.theorems()) out.push_back(t.name);
    return out;
  }

  std::string check(const std::string& problem_json) const {
    geoform::CheckResult r;
    {
      py::gil_scoped_release release;
      r = geoform::check_problem(kb_, record_of(problem_json));
    }
    json j{{"problem_id", r.problem_id}, {"solved", r.solved}, {"ok", r.ok()},
           {"mismatch", r.mismatch},     {"error", r.error}};
    j["answer"] = r.answer ? json(*r.answer) : json(nullptr);
    return j.dump();
  }

  std::string solve(const std::string& problem_json, const std::string& method, const std::string& strategy,
                    double timeout, int depth, int beam, std::uint64_t seed) const {
    geoform::SearchConfig c;
    c.method = geoform::parse_method(method);
    c.strategy = geoform::parse_strategy(strategy);
    c.timeout_seconds = timeout;
    c.max_depth = depth;
    c.beam_size = beam;
    c.seed = seed;
    const auto record = record_of(problem_json);
    geoform::SearchResult r;
    {
      py::gil_scoped_release release;
      geoform::Problem p(kb_, record);
      r = geoform::run_search(p, c);
    }
    return json{{"outcome", geoform::outcome_name(r.outcome)},
                {"theorem_seqs", r.theorem_seqs},
                {"elapsed_seconds", r.elapsed_seconds},
                {"steps", r.steps}}
        .dump();
  }

  bool replay_solves(const std::string& problem_json, const std::vector<std::string>& seqs) const {
    return geoform::replay_solves(kb_, record_of(problem_json), seqs);
  }

  std::vector<std::string> augment(const std::string& problem_json) const {
    std::vector<std::string> out;
    for (const auto& d : geoform::augment_problem(kb_, record_of(problem_json))) {
      out.push_back(geoform::problem_to_json(d).dump());
    }
    return out;
  }

  const geoform::KnowledgeBase& kb() const { return kb_; }

 private:
  geoform::KnowledgeBase kb_;
};

/// Interactive state of one problem.
class State {
 public:
  State(const Engine& engine, const std::string& problem_json) : problem_(engine.kb(), record_of(problem_json)) {}

  std::string apply(const std::string& theorem) {
    auto rep = geoform::interactive_apply(problem_, theorem);
    return json{{"added", rep.added}, {"bindings", rep.bindings}, {"goal_solved", rep.goal_solved}}.dump();
  }
  std::vector<std::string> applicable() const {
    std::vector<std::string> out;
    for (const auto& c : problem_.applicable()) out.push_back(c.text());
    return out;
  }
  std::string hypertree() const { return problem_.export_hypertree().dump(); }
  bool solved() const { return problem_.goal().status == geoform::GoalStatus::Solved; }
  std::size_t size() const { return problem_.size(); }
  void truncate(std::size_t n) { problem_.truncate(n); }

 private:
  geoform::Problem problem_;
};

}  // namespace

PYBIND11_MODULE(_geoform, m) {
  m.doc() = "Formal plane geometry reasoning engine";

  py::register_exception<geoform::ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<geoform::ProblemError>(m, "ProblemError", PyExc_ValueError);

  py::class_<Engine>(m, "Engine")
      .def(py::init<const std::string&>(), py::arg("kb_path"))
      .def("theorems", &Engine::theorems)
      .def("check", &Engine::check, py::arg("problem_json"))
      .def("solve", &Engine::solve, py::arg("problem_json"), py::arg("method") = "fw", py::arg("strategy") = "bfs",
           py::arg("timeout") = 30.0, py::arg("depth") = 15, py::arg("beam") = 20, py::arg("seed") = 0)
      .def("replay_solves", &Engine::replay_solves, py::arg("problem_json"), py::arg("theorem_seqs"))
      .def("augment", &Engine::augment, py::arg("problem_json"));

  py::class_<State>(m, "State")
      .def(py::init<const Engine&, const std::string&>(), py::arg("engine"), py::arg("problem_json"),
           py::keep_alive<1, 2>())
      .def("apply", &State::apply, py::arg("theorem"))
      .def("applicable", &State::applicable)
      .def("hypertree", &State::hypertree)
      .def_property_readonly("solved", &State::solved)
      .def("__len__", &State::size)
      .def("truncate", &State::truncate, py::arg("length"));

#ifdef GEOFORM_VERSION
  m.attr("__version__") = GEOFORM_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
