#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "hyperbmc/qbf.hpp"
#include "hyperbmc/solver.hpp"

namespace hyperbmc {

enum class ExternalFormat { Qcir, Qdimacs };

// Outcome of one external-solver run. Non-answers (spawn failure, timeout,
// unparseable output) are distinct conditions, never mapped to UNSAT.
struct ExternalOutcome {
  enum class Kind { Sat, Unsat, SpawnFailure, Timeout, Unparseable } kind;
  std::string detail;
  std::optional<std::vector<std::pair<int, bool>>> outer_assignment;
  double seconds = 0.0;
};

// Writes the emitted query to a temp file, runs `command <path>` through the
// shell, and classifies the result: exit code 10 / "s cnf 1" / "r SAT" mean
// SAT, exit code 20 / "s cnf 0" / "r UNSAT" mean UNSAT. Certificate lines
// ("V ..." or "v ...") are decoded into leading-run atom assignments.
ExternalOutcome solve_external(const QbfInstance& q, const std::string& command,
                               ExternalFormat format,
                               std::chrono::seconds timeout = std::chrono::seconds(300));

}  // namespace hyperbmc
