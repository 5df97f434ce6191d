#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hyperbmc/external.hpp"
#include "hyperbmc/hyperltl.hpp"
#include "hyperbmc/qbf.hpp"
#include "hyperbmc/solver.hpp"

namespace hyperbmc {

enum class Mode { BugHunt, Find };
enum class Answer { Holds, Violated, Inconclusive };

const char* mode_name(Mode m);
const char* answer_name(Answer a);

// Per-step decoded valuation of every declared variable of one model.
struct Trace {
  std::string tid;
  std::string model_name;
  const SymbolicKripke* model = nullptr;
  std::vector<std::vector<long>> steps;  // steps[i][var_index]
};

struct Verdict {
  Answer answer = Answer::Inconclusive;
  std::optional<SolveStatus> qbf_status;  // empty when solving failed
  std::vector<Trace> traces;              // one per leading existential tid
  int k = 0;
  Semantics sem = Semantics::Pes;
  Mode mode = Mode::BugHunt;
  std::string note;                       // diagnostics (budget, certificates)
  uint64_t decisions = 0;
  double seconds = 0.0;
};

// The semantics-sound interpretation of a solver status. Normative table:
//   bughunt: (pes|hpes, SAT) -> violated; (opt|hopt, UNSAT) -> holds
//   find:    (pes|hpes, SAT) -> holds;    (opt|hopt, UNSAT) -> violated
// every other cell is inconclusive.
Answer decision_table(Mode mode, Semantics sem, SolveStatus status);

// The raw YES/NO line: the answer to "does the model satisfy the formula?"
// implied by mode and solver status alone, before the soundness filter.
const char* yes_no(Mode mode, SolveStatus status);

struct CheckOptions {
  SolveLimits limits;
  std::optional<std::string> external_command;
  ExternalFormat external_format = ExternalFormat::Qdimacs;
  std::chrono::seconds external_timeout = std::chrono::seconds(300);
};

// End-to-end: negates the formula in bug-hunt mode, assembles the QBF under
// the chosen semantics, solves, interprets and decodes certificates.
Verdict check(const std::vector<std::shared_ptr<SymbolicKripke>>& models,
              const HyperFormula& f, int k, Semantics sem, Mode mode,
              const CheckOptions& opt = {});

// Per-step integer reassembly from a leading-run assignment, with validation
// against the model's init/trans (an inconsistent trace signals an encoder
// bug and raises InternalError).
Trace decode_trace(const QbfInstance& q, const std::vector<std::pair<int, bool>>& assignment,
                   int block_index);

std::string dump_verdict_text(const Verdict& v);
std::string dump_verdict_json(const Verdict& v);

}  // namespace hyperbmc
