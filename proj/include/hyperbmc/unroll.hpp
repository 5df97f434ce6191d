#pragma once

#include <map>
#include <string>
#include <vector>

#include "hyperbmc/expr.hpp"
#include "hyperbmc/hyperltl.hpp"
#include "hyperbmc/model.hpp"

namespace hyperbmc {

// Bounded semantics: what to assume about the unseen future past step k.
// The halting variants consult each trace's halt proposition at k.
enum class Semantics { Pes, Opt, HPes, HOpt };

const char* semantics_name(Semantics s);
bool is_halting(Semantics s);

struct UnrolledAtom {
  int tid_index = 0;
  int var_index = 0;
  int bit = 0;       // semantic position, 0 = LSB
  int step = 0;
};

// Numbering of the unrolled atom space: one block per trace variable in
// prefix order; within a block step-major, then declaration order with the
// most significant bit first. This order is also the solver's branch order.
class UnrollContext {
 public:
  UnrollContext(std::vector<const SymbolicKripke*> models, std::vector<std::string> tids, int k);

  int k() const { return k_; }
  int tid_count() const { return static_cast<int>(models_.size()); }
  const SymbolicKripke& model(int tid_index) const { return *models_[tid_index]; }
  const std::string& tid(int tid_index) const { return tids_[tid_index]; }
  int tid_index(const std::string& tid) const;

  int block_first(int tid_index) const { return base_[tid_index]; }
  int block_size(int tid_index) const { return bits_[tid_index] * (k_ + 1); }
  int total_atoms() const { return total_; }

  // (tid, flat model bit, step) -> global atom id.
  int atom_id(int tid_index, int flat_bit, int step) const {
    return base_[tid_index] + step * bits_[tid_index] + flat_bit;
  }
  int atom_id(int tid_index, const Atom& a, int step) const {
    return atom_id(tid_index, models_[tid_index]->flat_bit(a.var_index, a.bit), step);
  }
  UnrolledAtom decode(int id) const;
  std::string atom_name(int id) const;

 private:
  std::vector<const SymbolicKripke*> models_;
  std::vector<std::string> tids_;
  int k_;
  std::vector<int> base_, bits_;
  int total_;
};

// I(x^0) ∧ δ(x^0,x^1) ∧ ... ∧ δ(x^{k-1},x^k); k = 0 yields I(x^0) alone.
ExprId unroll_model(ExprArena& arena, const UnrollContext& ctx, int tid_index);

// Conjunction of halt atoms at step k for the given trace variables.
ExprId halted_predicate(ExprArena& arena, const UnrollContext& ctx,
                        const std::vector<int>& tid_indices);

// Unrolling of an NNF body from position i. Memoized per (subformula, i), so
// the result is a DAG of size O(|body|·k). The halting base case gates on the
// conjunction of halt atoms at step k over the tids occurring in the body and
// evaluates the body at k under the stutter assumption: on a halted trace,
// Until and Release both resolve to their right operand, Next to its operand.
ExprId unroll_body(ExprArena& arena, const UnrollContext& ctx, const LtlRef& body, int i,
                   Semantics sem);

}  // namespace hyperbmc
