#pragma once

// Corpus case loading and execution, shared by the corpus regression test
// and the acceptance suite. Doctest-free: failures come back as strings.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hyperbmc/check.hpp"
#include "hyperbmc/oracle.hpp"
#include "hyperbmc/smv.hpp"

namespace corpus_runner {

using namespace hyperbmc;

struct TraceExpect {
  std::string tid;
  std::string var;
  std::vector<long> values;
};

struct CorpusCase {
  std::string dir;
  std::string expect_file;
  std::vector<std::string> model_files;
  std::string formula_file;
  int k = 0;
  Semantics sem = Semantics::Pes;
  Mode mode = Mode::BugHunt;
  Answer answer = Answer::Holds;
  SolveStatus status = SolveStatus::Sat;
  std::vector<TraceExpect> traces;

  std::string name() const {
    return std::filesystem::path(dir).filename().string() + "/" +
           std::filesystem::path(expect_file).filename().string();
  }
};

inline Semantics parse_sem(const std::string& s) {
  if (s == "pes") return Semantics::Pes;
  if (s == "opt") return Semantics::Opt;
  if (s == "hpes") return Semantics::HPes;
  if (s == "hopt") return Semantics::HOpt;
  throw std::runtime_error("bad semantics in expect file: " + s);
}

inline CorpusCase parse_expect(const std::filesystem::path& path) {
  CorpusCase c;
  c.dir = path.parent_path().string();
  c.expect_file = path.string();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "models:") {
      std::string m;
      while (ls >> m) c.model_files.push_back(m);
    } else if (key == "formula:") {
      ls >> c.formula_file;
    } else if (key == "k:") {
      ls >> c.k;
    } else if (key == "semantics:") {
      std::string s;
      ls >> s;
      c.sem = parse_sem(s);
    } else if (key == "mode:") {
      std::string s;
      ls >> s;
      c.mode = s == "find" ? Mode::Find : Mode::BugHunt;
    } else if (key == "answer:") {
      std::string s;
      ls >> s;
      c.answer = s == "holds"      ? Answer::Holds
                 : s == "violated" ? Answer::Violated
                                   : Answer::Inconclusive;
    } else if (key == "status:") {
      std::string s;
      ls >> s;
      c.status = s == "SAT" ? SolveStatus::Sat : SolveStatus::Unsat;
    } else if (key == "trace:") {
      TraceExpect t;
      ls >> t.tid >> t.var;
      long v;
      while (ls >> v) t.values.push_back(v);
      c.traces.push_back(std::move(t));
    }
  }
  return c;
}

inline std::vector<CorpusCase> all_cases(const std::string& corpus_dir) {
  namespace fs = std::filesystem;
  std::vector<fs::path> expects;
  for (const auto& dir : fs::directory_iterator(corpus_dir)) {
    if (!dir.is_directory()) continue;
    for (const auto& f : fs::directory_iterator(dir.path())) {
      std::string name = f.path().filename().string();
      if (name == "expect" || name.rfind("expect_", 0) == 0) expects.push_back(f.path());
    }
  }
  std::sort(expects.begin(), expects.end());
  std::vector<CorpusCase> cases;
  for (const auto& e : expects) cases.push_back(parse_expect(e));
  return cases;
}

// Runs one case end to end, cross-checks the frozen verdict and the brute
// oracle, and collects mismatches as human-readable strings.
inline std::vector<std::string> run_case(const CorpusCase& c) {
  std::vector<std::string> fails;
  auto fail = [&](const std::string& msg) { fails.push_back(c.name() + ": " + msg); };

  std::vector<std::shared_ptr<SymbolicKripke>> models;
  std::vector<const SymbolicKripke*> raw;
  for (const auto& m : c.model_files) {
    models.push_back(std::make_shared<SymbolicKripke>(parse_model_file(c.dir + "/" + m)));
    raw.push_back(models.back().get());
  }
  HyperFormula f = parse_formula_file(c.dir + "/" + c.formula_file);

  Verdict v = check(models, f, c.k, c.sem, c.mode);
  if (!v.qbf_status) {
    fail("no solver verdict (" + v.note + ")");
    return fails;
  }
  if (v.answer != c.answer)
    fail(std::string("answer: expected ") + answer_name(c.answer) + ", got " +
         answer_name(v.answer));
  if (*v.qbf_status != c.status)
    fail(std::string("status: expected ") +
         (c.status == SolveStatus::Sat ? "SAT" : "UNSAT") + ", got " +
         (*v.qbf_status == SolveStatus::Sat ? "SAT" : "UNSAT"));

  for (const auto& te : c.traces) {
    bool found = false;
    for (const auto& tr : v.traces) {
      if (tr.tid != te.tid) continue;
      found = true;
      auto vi = tr.model->var_index(te.var);
      if (!vi) {
        fail("trace check: unknown variable " + te.var);
        continue;
      }
      if (tr.steps.size() != te.values.size()) {
        fail("trace check: step count mismatch for " + te.var);
        continue;
      }
      for (size_t i = 0; i < te.values.size(); ++i)
        if (tr.steps[i][*vi] != te.values[i])
          fail("trace " + te.tid + "." + te.var + " step " + std::to_string(i) +
               ": expected " + std::to_string(te.values[i]) + ", got " +
               std::to_string(tr.steps[i][*vi]));
    }
    if (!found) fail("no decoded trace for tid " + te.tid);
  }

  // Independent confirmation through the explicit-state oracle.
  HyperFormula query = c.mode == Mode::BugHunt ? negate(f) : to_nnf(f);
  bool oracle_sat = check_brute(raw, query, c.k, c.sem);
  if (oracle_sat != (c.status == SolveStatus::Sat))
    fail("brute-force oracle disagrees with the frozen status");
  return fails;
}

}  // namespace corpus_runner
