#include "hyperbmc/unroll.hpp"

#include <cassert>

#include "hyperbmc/diag.hpp"

namespace hyperbmc {

const char* semantics_name(Semantics s) {
  switch (s) {
    case Semantics::Pes: return "pes";
    case Semantics::Opt: return "opt";
    case Semantics::HPes: return "hpes";
    case Semantics::HOpt: return "hopt";
  }
  return "?";
}

bool is_halting(Semantics s) { return s == Semantics::HPes || s == Semantics::HOpt; }

UnrollContext::UnrollContext(std::vector<const SymbolicKripke*> models,
                             std::vector<std::string> tids, int k)
    : models_(std::move(models)), tids_(std::move(tids)), k_(k) {
  assert(models_.size() == tids_.size());
  if (k_ < 0) throw InputError("unrolling bound must be >= 0");
  int off = 0;
  for (const auto* m : models_) {
    base_.push_back(off);
    bits_.push_back(m->total_bits());
    off += m->total_bits() * (k_ + 1);
  }
  total_ = off;
}

int UnrollContext::tid_index(const std::string& tid) const {
  for (size_t i = 0; i < tids_.size(); ++i)
    if (tids_[i] == tid) return static_cast<int>(i);
  throw InternalError("unknown trace variable '" + tid + "'");
}

UnrolledAtom UnrollContext::decode(int id) const {
  for (size_t t = 0; t < models_.size(); ++t) {
    if (id < base_[t] + bits_[t] * (k_ + 1)) {
      int rel = id - base_[t];
      int step = rel / bits_[t];
      int flat = rel % bits_[t];
      Atom a = models_[t]->atom_of(flat);
      return UnrolledAtom{static_cast<int>(t), a.var_index, a.bit, step};
    }
  }
  throw InternalError("unrolled atom id out of range");
}

std::string UnrollContext::atom_name(int id) const {
  UnrolledAtom a = decode(id);
  const SymbolicKripke& m = *models_[a.tid_index];
  return atom_display_name(m.var(a.var_index), a.bit) + "[" + tids_[a.tid_index] + "]@" +
         std::to_string(a.step);
}

ExprId unroll_model(ExprArena& arena, const UnrollContext& ctx, int tid_index) {
  const SymbolicKripke& m = ctx.model(tid_index);
  int nbits = m.total_bits();
  auto at_step = [&](ExprId e, int step) {
    // Model var ids: [0, nbits) unprimed, [nbits, 2*nbits) primed.
    return m.arena().rewrite_vars(e, arena, [&](int32_t v) {
      int flat = v % nbits;
      int s = step + (v >= nbits ? 1 : 0);
      return static_cast<int32_t>(ctx.atom_id(tid_index, flat, s));
    });
  };
  std::vector<ExprId> parts{at_step(m.init(), 0)};
  for (int i = 0; i < ctx.k(); ++i) parts.push_back(at_step(m.trans(), i));
  return arena.mk_and(std::move(parts));
}

ExprId halted_predicate(ExprArena& arena, const UnrollContext& ctx,
                        const std::vector<int>& tid_indices) {
  std::vector<ExprId> lits;
  for (int t : tid_indices) {
    const SymbolicKripke& m = ctx.model(t);
    if (!m.halt_var())
      throw InputError("halting semantics require a halt variable in model '" + m.name() +
                       "' (declare 'halt' or use the -- @halt: pragma)");
    lits.push_back(arena.var(ctx.atom_id(t, Atom{*m.halt_var(), 0, false}, ctx.k())));
  }
  return arena.mk_and(std::move(lits));
}

namespace {

class BodyUnroller {
 public:
  BodyUnroller(ExprArena& arena, const UnrollContext& ctx, const LtlRef& body, Semantics sem)
      : arena_(arena), ctx_(ctx), sem_(sem) {
    if (is_halting(sem_)) {
      std::vector<int> tids;
      for (const auto& t : ltl_tids(body)) tids.push_back(ctx_.tid_index(t));
      halted_ = halted_predicate(arena_, ctx_, tids);
    }
  }

  ExprId unroll(const LtlRef& e, int i) {
    if (i > ctx_.k() + 1) throw InternalError("unroll past base case");
    if (i == ctx_.k() + 1) return base_case(e);
    auto key = std::make_pair(e.get(), i);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    ExprId r = compute(e, i);
    memo_.emplace(key, r);
    return r;
  }

 private:
  ExprId compute(const LtlRef& e, int i) {
    switch (e->op) {
      case LtlOp::True: return arena_.t();
      case LtlOp::False: return arena_.f();
      case LtlOp::Prop: return prop_at(e, i);
      case LtlOp::CmpEq:
      case LtlOp::CmpNe: return cmp_at(e, i);
      case LtlOp::Not:
        if (e->kids[0]->op != LtlOp::Prop)
          throw InternalError("unroll_body expects NNF (negation on literals only)");
        return arena_.mk_not(unroll(e->kids[0], i));
      case LtlOp::And: return arena_.mk_and(unroll(e->kids[0], i), unroll(e->kids[1], i));
      case LtlOp::Or: return arena_.mk_or(unroll(e->kids[0], i), unroll(e->kids[1], i));
      case LtlOp::Iff:
        // NNF keeps Iff only over state-level operands.
        return arena_.mk_iff(unroll(e->kids[0], i), unroll(e->kids[1], i));
      case LtlOp::Next: return unroll(e->kids[0], i + 1);
      case LtlOp::Until:
        return arena_.mk_or(unroll(e->kids[1], i),
                            arena_.mk_and(unroll(e->kids[0], i), unroll(e, i + 1)));
      case LtlOp::Release:
        return arena_.mk_and(unroll(e->kids[1], i),
                             arena_.mk_or(unroll(e->kids[0], i), unroll(e, i + 1)));
      case LtlOp::Implies:
      case LtlOp::Globally:
      case LtlOp::Finally:
        throw InternalError("unroll_body expects NNF (no ->, G, F)");
    }
    throw InternalError("unroll: unreachable");
  }

  ExprId base_case(const LtlRef& e) {
    switch (sem_) {
      case Semantics::Pes: return arena_.f();
      case Semantics::Opt: return arena_.t();
      case Semantics::HPes: return arena_.mk_and(halted_, stutter_eval(e));
      case Semantics::HOpt: return arena_.mk_implies(halted_, stutter_eval(e));
    }
    throw InternalError("base_case: unreachable");
  }

  // Evaluation of the body at step k assuming the state repeats forever:
  // U and R collapse to their right operand, Next to its operand.
  ExprId stutter_eval(const LtlRef& e) {
    auto it = stutter_memo_.find(e.get());
    if (it != stutter_memo_.end()) return it->second;
    ExprId r;
    switch (e->op) {
      case LtlOp::True: r = arena_.t(); break;
      case LtlOp::False: r = arena_.f(); break;
      case LtlOp::Prop: r = prop_at(e, ctx_.k()); break;
      case LtlOp::CmpEq:
      case LtlOp::CmpNe: r = cmp_at(e, ctx_.k()); break;
      case LtlOp::Not:
        if (e->kids[0]->op != LtlOp::Prop)
          throw InternalError("unroll_body expects NNF (negation on literals only)");
        r = arena_.mk_not(stutter_eval(e->kids[0]));
        break;
      case LtlOp::And:
        r = arena_.mk_and(stutter_eval(e->kids[0]), stutter_eval(e->kids[1]));
        break;
      case LtlOp::Or:
        r = arena_.mk_or(stutter_eval(e->kids[0]), stutter_eval(e->kids[1]));
        break;
      case LtlOp::Iff:
        r = arena_.mk_iff(stutter_eval(e->kids[0]), stutter_eval(e->kids[1]));
        break;
      case LtlOp::Next: r = stutter_eval(e->kids[0]); break;
      case LtlOp::Until: r = stutter_eval(e->kids[1]); break;
      case LtlOp::Release: r = stutter_eval(e->kids[1]); break;
      default:
        throw InternalError("stutter_eval expects NNF");
    }
    stutter_memo_.emplace(e.get(), r);
    return r;
  }

  ExprId prop_at(const LtlRef& e, int i) {
    int t = ctx_.tid_index(e->tid);
    const SymbolicKripke& m = ctx_.model(t);
    auto vi = m.var_index(e->var);
    if (!vi || m.var(*vi).kind != VarKind::Boolean)
      throw InputError(e->loc, "'" + e->var + "[" + e->tid + "]' is not a boolean variable");
    return arena_.var(ctx_.atom_id(t, Atom{*vi, 0, false}, i));
  }

  // Integer comparison lowered to a bitwise iff conjunction; operands of
  // different widths are zero-extended.
  std::vector<ExprId> operand_bits(const CmpOperand& o, int i, int width) {
    std::vector<ExprId> bits;
    if (o.is_literal) {
      for (int b = width - 1; b >= 0; --b)
        bits.push_back(((o.value >> b) & 1) ? arena_.t() : arena_.f());
      return bits;
    }
    int t = ctx_.tid_index(o.tid);
    const SymbolicKripke& m = ctx_.model(t);
    auto vi = m.var_index(o.var);
    if (!vi || m.var(*vi).kind != VarKind::Range)
      throw InputError("'" + o.var + "[" + o.tid + "]' is not an integer variable");
    const VarDecl& d = m.var(*vi);
    for (int b = width - 1; b >= 0; --b) {
      if (b >= d.bit_count)
        bits.push_back(arena_.f());
      else
        bits.push_back(arena_.var(ctx_.atom_id(t, Atom{*vi, b, false}, i)));
    }
    return bits;
  }

  int operand_width(const CmpOperand& o) {
    if (o.is_literal) {
      int w = 1;
      while ((1L << w) <= o.value) ++w;
      return w;
    }
    int t = ctx_.tid_index(o.tid);
    auto vi = ctx_.model(t).var_index(o.var);
    if (!vi) throw InputError("'" + o.var + "[" + o.tid + "]' is not defined");
    return ctx_.model(t).var(*vi).bit_count;
  }

  ExprId cmp_at(const LtlRef& e, int i) {
    int w = std::max(operand_width(e->lhs), operand_width(e->rhs));
    std::vector<ExprId> a = operand_bits(e->lhs, i, w);
    std::vector<ExprId> b = operand_bits(e->rhs, i, w);
    std::vector<ExprId> iffs;
    for (int j = 0; j < w; ++j) iffs.push_back(arena_.mk_iff(a[j], b[j]));
    ExprId eq = arena_.mk_and(std::move(iffs));
    return e->op == LtlOp::CmpEq ? eq : arena_.mk_not(eq);
  }

  ExprArena& arena_;
  const UnrollContext& ctx_;
  Semantics sem_;
  ExprId halted_ = expr_true;
  struct KeyHash {
    size_t operator()(const std::pair<const LtlExpr*, int>& k) const {
      return std::hash<const void*>()(k.first) * 31 + std::hash<int>()(k.second);
    }
  };
  std::unordered_map<std::pair<const LtlExpr*, int>, ExprId, KeyHash> memo_;
  std::unordered_map<const LtlExpr*, ExprId> stutter_memo_;
};

}  // namespace

ExprId unroll_body(ExprArena& arena, const UnrollContext& ctx, const LtlRef& body, int i,
                   Semantics sem) {
  BodyUnroller u(arena, ctx, body, sem);
  return u.unroll(body, i);
}

}  // namespace hyperbmc
