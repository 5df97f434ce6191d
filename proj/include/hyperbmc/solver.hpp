#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hyperbmc/qbf.hpp"

namespace hyperbmc {

enum class SolveStatus { Sat, Unsat };

struct SolveLimits {
  // Counts cofactor node visits and branch decisions together.
  uint64_t step_budget = 200'000'000;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Unsat;
  // Assignment to the leading maximal run of same-quantifier blocks: present
  // for SAT when that run is existential (a witness making the rest true) and
  // for UNSAT when it is universal (a refutation making the rest false).
  // Pairs of (atom id, value), ascending by atom id.
  std::optional<std::vector<std::pair<int, bool>>> outer_assignment;
  uint64_t decisions = 0;
  double seconds = 0.0;
};

// Sound and complete on closed instances. Recursive block expansion in atom
// order (block order, step-major within a block), with unit propagation on
// the matrix spine, memoized cofactor evaluation and early termination.
// Throws BudgetExceeded instead of ever returning a wrong answer.
SolveResult solve(const QbfInstance& q, const SolveLimits& limits = {});

// Ground truth by full truth-table fold, sharing nothing with solve()'s
// search: evaluates the matrix on every assignment and folds quantifiers
// innermost-first. Requires total atom count <= 24.
SolveStatus brute_eval(const QbfInstance& q);

}  // namespace hyperbmc
