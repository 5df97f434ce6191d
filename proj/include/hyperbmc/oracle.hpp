#pragma once

#include <vector>

#include "hyperbmc/hyperltl.hpp"
#include "hyperbmc/model.hpp"
#include "hyperbmc/unroll.hpp"

namespace hyperbmc {

// Brute-force implementation of the bounded semantics over explicit trace
// prefixes. Deliberately shares nothing with the unroller/QBF path: it
// recurses over concrete state valuations and never builds circuits, which
// is what makes it a useful differential oracle.

// One explicit trace prefix per trace variable, aligned with a formula's
// quantifier prefix. paths[t] has k+1 state indices into explicits[t].
struct TraceTuple {
  std::vector<const ExplicitKripke*> models;
  std::vector<std::vector<int>> paths;
};

// Direct recursive evaluation of an NNF body at position i with bound k.
// Past k the semantics' base assumption applies; the halting variants
// consult halt at step k over `halted_tids` (indices into the tuple) with
// the stutter reading of U/R/X at the bound.
bool eval_bounded(const TraceTuple& tuple, const std::vector<std::string>& tids,
                  const LtlRef& nnf_body, int i, int k, Semantics sem,
                  const std::vector<int>& halted_tids);

// Convenience: halted_tids derived from the body.
bool eval_bounded(const TraceTuple& tuple, const std::vector<std::string>& tids,
                  const LtlRef& nnf_body, int i, int k, Semantics sem);

struct BruteOptions {
  long max_states = 4096;
  size_t max_paths_per_tid = 100000;
  // Cap on the product of per-tid prefix counts (the quantifier recursion's
  // worst-case leaf count).
  size_t max_tuples = 4000000;
};

// ⊨*_k by construction: quantifier recursion over all length-(k+1) path
// prefixes per trace variable, evaluating the NNF body on each tuple.
// The formula is normalized internally. Throws BudgetExceeded when a model
// or its prefix set is too large.
bool check_brute(const std::vector<const SymbolicKripke*>& models, const HyperFormula& f,
                 int k, Semantics sem, const BruteOptions& opt = {});

// Same, over pre-enumerated explicit models (avoids re-enumeration in
// sweeps).
bool check_brute(const std::vector<const ExplicitKripke*>& explicits, const HyperFormula& f,
                 int k, Semantics sem, const BruteOptions& opt = {});

}  // namespace hyperbmc
