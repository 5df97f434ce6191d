#include "hyperbmc/oracle.hpp"

#include <unordered_map>

#include "hyperbmc/diag.hpp"

namespace hyperbmc {

namespace {

class BoundedEval {
 public:
  BoundedEval(const TraceTuple& tuple, const std::vector<std::string>& tids, int k,
              Semantics sem, const std::vector<int>& halted_tids)
      : tuple_(tuple), tids_(tids), k_(k), sem_(sem), halted_tids_(halted_tids) {}

  bool eval(const LtlRef& e, int i) {
    if (i > k_ + 1) throw InternalError("eval_bounded past base case");
    if (i == k_ + 1) return base(e);
    auto key = std::make_pair(e.get(), i);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    bool r = compute(e, i);
    memo_.emplace(key, r);
    return r;
  }

 private:
  int tid_index(const std::string& tid) const {
    for (size_t t = 0; t < tids_.size(); ++t)
      if (tids_[t] == tid) return static_cast<int>(t);
    throw InternalError("eval_bounded: unbound trace variable '" + tid + "'");
  }

  long var_value(const std::string& var, const std::string& tid, int i) const {
    int t = tid_index(tid);
    const ExplicitKripke& ek = *tuple_.models[t];
    auto vi = ek.model->var_index(var);
    if (!vi) throw InternalError("eval_bounded: unknown variable '" + var + "'");
    return ek.states[tuple_.paths[t][i]][*vi];
  }

  bool state_pred(const LtlRef& e, int i) const {
    if (e->op == LtlOp::Prop) return var_value(e->var, e->tid, i) != 0;
    auto side = [&](const CmpOperand& o) {
      return o.is_literal ? o.value : var_value(o.var, o.tid, i);
    };
    bool eq = side(e->lhs) == side(e->rhs);
    return e->op == LtlOp::CmpEq ? eq : !eq;
  }

  bool halted() const {
    for (int t : halted_tids_) {
      const ExplicitKripke& ek = *tuple_.models[t];
      auto hv = ek.model->halt_var();
      if (!hv) throw InputError("halting semantics require a halt variable in model '" +
                                ek.model->name() + "'");
      if (ek.states[tuple_.paths[t][k_]][*hv] == 0) return false;
    }
    return true;
  }

  bool base(const LtlRef& e) {
    switch (sem_) {
      case Semantics::Pes: return false;
      case Semantics::Opt: return true;
      case Semantics::HPes: return halted() && stutter(e);
      case Semantics::HOpt: return !halted() || stutter(e);
    }
    throw InternalError("base: unreachable");
  }

  // Body value at step k when the trace repeats its last state forever.
  bool stutter(const LtlRef& e) {
    switch (e->op) {
      case LtlOp::True: return true;
      case LtlOp::False: return false;
      case LtlOp::Prop:
      case LtlOp::CmpEq:
      case LtlOp::CmpNe: return state_pred(e, k_);
      case LtlOp::Not:
        if (e->kids[0]->op != LtlOp::Prop)
          throw InternalError("eval_bounded expects NNF (negation on literals only)");
        return !stutter(e->kids[0]);
      case LtlOp::And: return stutter(e->kids[0]) && stutter(e->kids[1]);
      case LtlOp::Or: return stutter(e->kids[0]) || stutter(e->kids[1]);
      case LtlOp::Iff: return stutter(e->kids[0]) == stutter(e->kids[1]);
      case LtlOp::Next: return stutter(e->kids[0]);
      case LtlOp::Until: return stutter(e->kids[1]);
      case LtlOp::Release: return stutter(e->kids[1]);
      default: throw InternalError("eval_bounded: body not in NNF");
    }
  }

  bool compute(const LtlRef& e, int i) {
    switch (e->op) {
      case LtlOp::True: return true;
      case LtlOp::False: return false;
      case LtlOp::Prop:
      case LtlOp::CmpEq:
      case LtlOp::CmpNe: return state_pred(e, i);
      case LtlOp::Not:
        if (e->kids[0]->op != LtlOp::Prop)
          throw InternalError("eval_bounded expects NNF (negation on literals only)");
        return !eval(e->kids[0], i);
      case LtlOp::And: return eval(e->kids[0], i) && eval(e->kids[1], i);
      case LtlOp::Or: return eval(e->kids[0], i) || eval(e->kids[1], i);
      case LtlOp::Iff: return eval(e->kids[0], i) == eval(e->kids[1], i);
      case LtlOp::Next: return eval(e->kids[0], i + 1);
      case LtlOp::Until:
        return eval(e->kids[1], i) || (eval(e->kids[0], i) && eval(e, i + 1));
      case LtlOp::Release:
        return eval(e->kids[1], i) && (eval(e->kids[0], i) || eval(e, i + 1));
      default: throw InternalError("eval_bounded: body not in NNF");
    }
  }

  const TraceTuple& tuple_;
  const std::vector<std::string>& tids_;
  int k_;
  Semantics sem_;
  const std::vector<int>& halted_tids_;
  struct KeyHash {
    size_t operator()(const std::pair<const LtlExpr*, int>& k) const {
      return std::hash<const void*>()(k.first) * 31 + std::hash<int>()(k.second);
    }
  };
  std::unordered_map<std::pair<const LtlExpr*, int>, bool, KeyHash> memo_;
};

std::vector<int> body_halted_tids(const LtlRef& body, const std::vector<std::string>& tids) {
  std::vector<int> out;
  for (const auto& t : ltl_tids(body))
    for (size_t i = 0; i < tids.size(); ++i)
      if (tids[i] == t) out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace

bool eval_bounded(const TraceTuple& tuple, const std::vector<std::string>& tids,
                  const LtlRef& nnf_body, int i, int k, Semantics sem,
                  const std::vector<int>& halted_tids) {
  BoundedEval ev(tuple, tids, k, sem, halted_tids);
  return ev.eval(nnf_body, i);
}

bool eval_bounded(const TraceTuple& tuple, const std::vector<std::string>& tids,
                  const LtlRef& nnf_body, int i, int k, Semantics sem) {
  std::vector<int> htids = body_halted_tids(nnf_body, tids);
  return eval_bounded(tuple, tids, nnf_body, i, k, sem, htids);
}

bool check_brute(const std::vector<const ExplicitKripke*>& explicits, const HyperFormula& f,
                 int k, Semantics sem, const BruteOptions& opt) {
  HyperFormula g = to_nnf(f);
  std::vector<std::string> tids;
  for (const auto& q : g.prefix) tids.push_back(q.tid);
  std::vector<int> halted_tids = body_halted_tids(g.body, tids);

  std::vector<std::vector<std::vector<int>>> prefixes;
  size_t tuple_product = 1;
  for (const auto* ek : explicits) {
    prefixes.push_back(enumerate_paths(*ek, k + 1, opt.max_paths_per_tid));
    size_t count = std::max<size_t>(prefixes.back().size(), 1);
    if (tuple_product > opt.max_tuples / count)
      throw BudgetExceeded("trace tuple count exceeds " + std::to_string(opt.max_tuples));
    tuple_product *= count;
  }

  TraceTuple tuple;
  tuple.models = explicits;
  tuple.paths.resize(explicits.size());

  // Quantifier recursion, outermost first.
  std::function<bool(size_t)> go = [&](size_t level) -> bool {
    if (level == g.prefix.size())
      return eval_bounded(tuple, tids, g.body, 0, k, sem, halted_tids);
    bool exists = g.prefix[level].kind == QuantKind::Exists;
    for (const auto& path : prefixes[level]) {
      tuple.paths[level] = path;
      bool v = go(level + 1);
      if (exists && v) return true;
      if (!exists && !v) return false;
    }
    return !exists;  // ∃ over empty/failed set is false, ∀ is true
  };
  return go(0);
}

bool check_brute(const std::vector<const SymbolicKripke*>& models, const HyperFormula& f,
                 int k, Semantics sem, const BruteOptions& opt) {
  if (models.size() != f.prefix.size())
    throw InputError("formula has " + std::to_string(f.prefix.size()) +
                     " quantifiers but " + std::to_string(models.size()) +
                     " models were supplied");
  std::vector<ExplicitKripke> eks;
  eks.reserve(models.size());
  for (const auto* m : models) eks.push_back(enumerate_states(*m, opt.max_states));
  std::vector<const ExplicitKripke*> ptrs;
  for (const auto& ek : eks) ptrs.push_back(&ek);
  return check_brute(ptrs, f, k, sem, opt);
}

}  // namespace hyperbmc
