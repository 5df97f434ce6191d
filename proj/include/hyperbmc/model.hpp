#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hyperbmc/expr.hpp"

namespace hyperbmc {

enum class VarKind { Boolean, Range };

// A state variable. Ranged variables use a raw binary encoding of the value
// itself (no offset by lo), so bit_count = ceil(log2(hi+1)) and lo >= 0.
struct VarDecl {
  std::string name;
  VarKind kind = VarKind::Boolean;
  long lo = 0;
  long hi = 1;
  int bit_count = 1;

  long domain_size() const { return kind == VarKind::Boolean ? 2 : hi - lo + 1; }
};

// Number of bits for values 0..hi. Rejects hi >= 2^30 (model too large).
int bit_count_for(long hi);

VarDecl make_bool_var(std::string name);
VarDecl make_range_var(std::string name, long lo, long hi);

// One Boolean atom of a variable. `bit` is the semantic position (0 = least
// significant); `primed` distinguishes the next-state copy.
struct Atom {
  int var_index = 0;
  int bit = 0;
  bool primed = false;
};

// A symbolic transition system: init over unprimed atoms, trans over
// unprimed + primed atoms, all in one arena. Var ids in the arena are flat
// bit indices, declaration order, most significant bit first; primed copies
// live at flat index + total_bits. Immutable after construction.
class SymbolicKripke {
 public:
  SymbolicKripke(std::vector<VarDecl> vars, std::shared_ptr<ExprArena> arena, ExprId init,
                 ExprId trans, std::optional<int> halt_var, std::string name = "");

  const std::vector<VarDecl>& vars() const { return vars_; }
  const VarDecl& var(int i) const { return vars_[i]; }
  std::optional<int> var_index(const std::string& name) const;
  std::optional<int> halt_var() const { return halt_var_; }
  const std::string& name() const { return name_; }

  ExprArena& arena() const { return *arena_; }
  std::shared_ptr<ExprArena> arena_ptr() const { return arena_; }
  ExprId init() const { return init_; }
  ExprId trans() const { return trans_; }

  int total_bits() const { return total_bits_; }
  int bit_offset(int var_index) const { return bit_offsets_[var_index]; }
  // Flat index of (var, semantic bit position); MSB of a var comes first.
  int flat_bit(int var_index, int bit) const {
    return bit_offsets_[var_index] + (vars_[var_index].bit_count - 1 - bit);
  }
  int atom_id(const Atom& a) const {
    return flat_bit(a.var_index, a.bit) + (a.primed ? total_bits_ : 0);
  }
  Atom atom_of(int id) const;
  std::string atom_name(int id) const;

  long domain_product() const;

 private:
  std::vector<VarDecl> vars_;
  std::shared_ptr<ExprArena> arena_;
  ExprId init_, trans_;
  std::optional<int> halt_var_;
  std::string name_;
  std::vector<int> bit_offsets_;
  int total_bits_;
};

// Atoms of one variable, most significant bit first, named <var>_<i>
// (booleans keep the bare variable name).
std::vector<Atom> bit_blast(const std::vector<VarDecl>& vars, int var_index);
std::string atom_display_name(const VarDecl& decl, int bit);

// Conjunction of bit literals characterizing value v of the variable,
// most significant literal first. Throws InputError for v outside [lo, hi].
ExprId encode_value(ExprArena& arena, const SymbolicKripke& k, int var_index, long v,
                    bool primed = false);

// Same, but over caller-provided atom var-ids (MSB first).
ExprId encode_value_bits(ExprArena& arena, const std::vector<ExprId>& bit_vars,
                         const VarDecl& decl, long v);

// lo <= v <= hi as a circuit over the variable's atoms.
ExprId domain_constraint(ExprArena& arena, const SymbolicKripke& k, int var_index, bool primed);

long decode_value(const VarDecl& decl, const std::vector<bool>& bits_msb_first);

// Explicit-state expansion at desk scale. `states` holds every
// domain-respecting assignment; reachability is computed from `initial`.
struct ExplicitKripke {
  const SymbolicKripke* model = nullptr;
  std::vector<std::vector<long>> states;       // per state, per var decoded value
  std::vector<int> initial;                    // indices into states
  std::vector<std::vector<int>> edges;         // adjacency, state index -> successors
  std::vector<bool> reachable;
  std::vector<int> totality_violations;        // reachable states with out-degree 0

  int state_count() const { return static_cast<int>(states.size()); }
  std::vector<int> reachable_states() const;
};

// Enumerates all domain-respecting assignments, evaluates init on each and
// trans on each pair. Throws BudgetExceeded when the domain product exceeds
// max_states.
ExplicitKripke enumerate_states(const SymbolicKripke& k, long max_states = 4096);

// All length-(len) state-index paths starting in an initial state. Dead-end
// prefixes (totality violations) are dropped: only full-length paths count.
std::vector<std::vector<int>> enumerate_paths(const ExplicitKripke& ek, int len,
                                              size_t max_paths = 100000);

// Assignment vector (unprimed block) for one explicit state.
std::vector<int8_t> state_assignment(const ExplicitKripke& ek, int state);

}  // namespace hyperbmc
