#pragma once

// Shared helpers for the test suites: deterministic random generators for
// expressions, models, formulas and QBF instances, plus small independent
// evaluators used as oracles against the library's own code paths.

#include <algorithm>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "hyperbmc/expr.hpp"
#include "hyperbmc/hyperltl.hpp"
#include "hyperbmc/model.hpp"
#include "hyperbmc/qbf.hpp"

namespace testutil {

using namespace hyperbmc;

using Rng = std::mt19937;

inline int pick(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}
inline bool coin(Rng& rng) { return pick(rng, 0, 1) == 1; }

// ---------------------------------------------------------------- exprs ---

// Random propositional tree over vars [0, nvars).
inline ExprId random_expr(Rng& rng, ExprArena& a, int nvars, int depth) {
  if (depth == 0 || pick(rng, 0, 5) == 0) {
    ExprId v = a.var(pick(rng, 0, nvars - 1));
    return coin(rng) ? v : a.mk_not(v);
  }
  switch (pick(rng, 0, 5)) {
    case 0: return a.mk_not(random_expr(rng, a, nvars, depth - 1));
    case 1:
      return a.mk_and(random_expr(rng, a, nvars, depth - 1),
                      random_expr(rng, a, nvars, depth - 1));
    case 2:
      return a.mk_or(random_expr(rng, a, nvars, depth - 1),
                     random_expr(rng, a, nvars, depth - 1));
    case 3:
      return a.mk_implies(random_expr(rng, a, nvars, depth - 1),
                          random_expr(rng, a, nvars, depth - 1));
    case 4:
      return a.mk_iff(random_expr(rng, a, nvars, depth - 1),
                      random_expr(rng, a, nvars, depth - 1));
    default: {
      std::vector<ExprId> kids;
      int n = pick(rng, 2, 3);
      for (int i = 0; i < n; ++i) kids.push_back(random_expr(rng, a, nvars, depth - 1));
      return coin(rng) ? a.mk_and(std::move(kids)) : a.mk_or(std::move(kids));
    }
  }
}

// Plain recursive evaluator, written independently of ExprArena::eval.
inline bool naive_eval(const ExprArena& a, ExprId e, const std::vector<int8_t>& asg) {
  const ExprNode& n = a.node(e);
  switch (n.op) {
    case Op::False: return false;
    case Op::True: return true;
    case Op::Var: return asg[n.var] != 0;
    case Op::Not: return !naive_eval(a, n.kids[0], asg);
    case Op::And:
      for (ExprId k : n.kids)
        if (!naive_eval(a, k, asg)) return false;
      return true;
    case Op::Or:
      for (ExprId k : n.kids)
        if (naive_eval(a, k, asg)) return true;
      return false;
    case Op::Implies:
      return !naive_eval(a, n.kids[0], asg) || naive_eval(a, n.kids[1], asg);
    case Op::Iff:
      return naive_eval(a, n.kids[0], asg) == naive_eval(a, n.kids[1], asg);
  }
  return false;
}

// Truth-table equality over the union of both supports (must stay small).
inline bool truth_table_equal(const ExprArena& a, ExprId e1, ExprId e2, int max_support = 22) {
  std::vector<int32_t> s1 = a.support(e1), s2 = a.support(e2);
  std::set<int32_t> su(s1.begin(), s1.end());
  su.insert(s2.begin(), s2.end());
  std::vector<int32_t> vars(su.begin(), su.end());
  if (static_cast<int>(vars.size()) > max_support)
    throw std::runtime_error("truth_table_equal: support too large");
  int32_t maxv = vars.empty() ? 0 : vars.back();
  std::vector<int8_t> asg(maxv + 1, 0);
  for (uint64_t m = 0; m < (uint64_t{1} << vars.size()); ++m) {
    for (size_t i = 0; i < vars.size(); ++i) asg[vars[i]] = (m >> i) & 1;
    if (naive_eval(a, e1, asg) != naive_eval(a, e2, asg)) return false;
  }
  return true;
}

// --------------------------------------------------------------- models ---

// A random symbolic Kripke structure built from an explicit skeleton:
// distinct state labelings over (p, q?, halt, n?), a nonempty initial set
// and a total successor relation with bounded branching. Reachable states
// are total by construction.
struct RandomModelOpts {
  int min_states = 2;
  int max_states = 6;
  bool second_bool = true;
  bool ranged = true;
  int max_out_degree = 2;
  int max_init = 2;
};

inline SymbolicKripke random_model(Rng& rng, const RandomModelOpts& o = {},
                                   const std::string& name = "random") {
  std::vector<VarDecl> vars;
  vars.push_back(make_bool_var("p"));
  if (o.second_bool) vars.push_back(make_bool_var("q"));
  long hi = 0;
  if (o.ranged) {
    hi = pick(rng, 1, 3);
    vars.push_back(make_range_var("n", 0, hi));
  }
  vars.push_back(make_bool_var("halt"));
  int halt_index = static_cast<int>(vars.size()) - 1;

  int want = pick(rng, o.min_states, o.max_states);
  std::set<std::vector<long>> labels;
  int guard = 0;
  while (static_cast<int>(labels.size()) < want && ++guard < 1000) {
    std::vector<long> st;
    for (const auto& v : vars)
      st.push_back(v.kind == VarKind::Boolean ? pick(rng, 0, 1) : pick(rng, 0, static_cast<int>(v.hi)));
    labels.insert(st);
  }
  std::vector<std::vector<long>> states(labels.begin(), labels.end());
  int n = static_cast<int>(states.size());

  std::vector<int> initial;
  int ninit = pick(rng, 1, std::min(o.max_init, n));
  while (static_cast<int>(initial.size()) < ninit) {
    int s = pick(rng, 0, n - 1);
    if (std::find(initial.begin(), initial.end(), s) == initial.end()) initial.push_back(s);
  }
  std::sort(initial.begin(), initial.end());

  std::vector<std::vector<int>> succ(n);
  for (int s = 0; s < n; ++s) {
    int d = pick(rng, 1, std::min(o.max_out_degree, n));
    std::set<int> targets;
    while (static_cast<int>(targets.size()) < d) targets.insert(pick(rng, 0, n - 1));
    succ[s].assign(targets.begin(), targets.end());
  }

  auto arena = std::make_shared<ExprArena>();
  SymbolicKripke shape(vars, arena, arena->t(), arena->t(), halt_index, name);
  auto state_conj = [&](int s, bool primed) {
    std::vector<ExprId> lits;
    for (size_t v = 0; v < vars.size(); ++v)
      lits.push_back(encode_value(*arena, shape, static_cast<int>(v), states[s][v], primed));
    return arena->mk_and(std::move(lits));
  };
  std::vector<ExprId> init_alts;
  for (int s : initial) init_alts.push_back(state_conj(s, false));
  std::vector<ExprId> trans_alts;
  for (int s = 0; s < n; ++s)
    for (int t : succ[s])
      trans_alts.push_back(arena->mk_and(state_conj(s, false), state_conj(t, true)));
  return SymbolicKripke(vars, arena, arena->mk_or(std::move(init_alts)),
                        arena->mk_or(std::move(trans_alts)), halt_index, name);
}

// ------------------------------------------------------------- formulas ---

// Random LTL body over the tids, using props p/q/halt and comparisons on n.
inline LtlRef random_body(Rng& rng, const std::vector<std::string>& tids, int depth,
                          bool allow_cmp = true, bool bools_only = false) {
  auto tid = [&]() { return tids[pick(rng, 0, static_cast<int>(tids.size()) - 1)]; };
  if (depth == 0 || pick(rng, 0, 4) == 0) {
    if (allow_cmp && !bools_only && pick(rng, 0, 3) == 0) {
      CmpOperand lhs, rhs;
      lhs.var = "n";
      lhs.tid = tid();
      if (coin(rng)) {
        rhs.is_literal = true;
        rhs.value = pick(rng, 0, 1);
      } else {
        rhs.var = "n";
        rhs.tid = tid();
      }
      return ltl_cmp(coin(rng), lhs, rhs);
    }
    static const char* props[] = {"p", "q", "halt"};
    LtlRef e = ltl_prop(props[pick(rng, 0, bools_only ? 1 : 2)], tid());
    return coin(rng) ? e : ltl_not(e);
  }
  switch (pick(rng, 0, 9)) {
    case 0: return ltl_not(random_body(rng, tids, depth - 1, allow_cmp, bools_only));
    case 1:
      return ltl_and(random_body(rng, tids, depth - 1, allow_cmp, bools_only),
                     random_body(rng, tids, depth - 1, allow_cmp, bools_only));
    case 2:
      return ltl_or(random_body(rng, tids, depth - 1, allow_cmp, bools_only),
                    random_body(rng, tids, depth - 1, allow_cmp, bools_only));
    case 3:
      return ltl_implies(random_body(rng, tids, depth - 1, allow_cmp, bools_only),
                         random_body(rng, tids, depth - 1, allow_cmp, bools_only));
    case 4:
      return ltl_iff(random_body(rng, tids, depth - 1, allow_cmp, bools_only),
                     random_body(rng, tids, depth - 1, allow_cmp, bools_only));
    case 5: return ltl_next(random_body(rng, tids, depth - 1, allow_cmp, bools_only));
    case 6:
      return ltl_until(random_body(rng, tids, depth - 1, allow_cmp, bools_only),
                       random_body(rng, tids, depth - 1, allow_cmp, bools_only));
    case 7:
      return ltl_release(random_body(rng, tids, depth - 1, allow_cmp, bools_only),
                         random_body(rng, tids, depth - 1, allow_cmp, bools_only));
    case 8: return ltl_globally(random_body(rng, tids, depth - 1, allow_cmp, bools_only));
    default: return ltl_finally(random_body(rng, tids, depth - 1, allow_cmp, bools_only));
  }
}

inline HyperFormula random_formula(Rng& rng, int nquant, int depth, bool force_alternation,
                                   bool allow_cmp = true) {
  static const char* names[] = {"A", "B", "C"};
  HyperFormula f;
  std::vector<std::string> tids;
  for (int i = 0; i < nquant; ++i) {
    Quantifier q;
    q.tid = names[i];
    if (force_alternation && i > 0)
      q.kind = f.prefix[i - 1].kind == QuantKind::Forall ? QuantKind::Exists
                                                         : QuantKind::Forall;
    else
      q.kind = coin(rng) ? QuantKind::Forall : QuantKind::Exists;
    f.prefix.push_back(q);
    tids.push_back(q.tid);
  }
  f.body = random_body(rng, tids, depth, allow_cmp);
  return f;
}

// ------------------------------------------------------- QBF instances ---

// Random prenex instance over a handful of atoms for solver/emitter tests.
inline QbfInstance random_instance(Rng& rng, int max_atoms = 12) {
  QbfInstance q;
  q.arena = std::make_shared<ExprArena>();
  int n = pick(rng, 1, max_atoms);
  int nblocks = pick(rng, 1, std::min(3, n));
  q.blocks.clear();
  int used = 0;
  for (int b = 0; b < nblocks; ++b) {
    int remaining_blocks = nblocks - b - 1;
    int max_here = n - used - remaining_blocks;
    int size = b == nblocks - 1 ? n - used : pick(rng, 1, max_here);
    QbfBlock blk;
    blk.quant = coin(rng) ? QuantKind::Exists : QuantKind::Forall;
    blk.tid = "q" + std::to_string(b + 1);
    blk.first_atom = used;
    blk.num_atoms = size;
    q.blocks.push_back(blk);
    used += size;
  }
  q.matrix = random_expr(rng, *q.arena, n, pick(rng, 2, 4));
  return q;
}

}  // namespace testutil
