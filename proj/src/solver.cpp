#include "hyperbmc/solver.hpp"

#include <chrono>
#include <unordered_map>

#include "hyperbmc/diag.hpp"

namespace hyperbmc {

namespace {

class Engine {
 public:
  Engine(const QbfInstance& q, const SolveLimits& limits)
      : q_(q), arena_(*q.arena), limits_(limits) {
    int n = q_.total_atoms();
    if (arena_.node(q_.matrix).high_var >= n)
      throw InternalError("solve: matrix references an atom outside every block");
    quant_.resize(n);
    for (const auto& b : q_.blocks)
      for (int i = 0; i < b.num_atoms; ++i)
        quant_[b.first_atom + i] = b.quant;
  }

  bool value(ExprId m) {
    if (m == expr_true) return true;
    if (m == expr_false) return false;
    auto it = value_memo_.find(m);
    if (it != value_memo_.end()) return it->second;

    ExprId r = propagate(m);
    bool res;
    if (r == expr_true) {
      res = true;
    } else if (r == expr_false) {
      res = false;
    } else {
      int32_t v = arena_.node(r).low_var;  // first free atom in branch order
      bump();
      ++decisions_;
      bool vt = value(restrict_counted(r, v, true));
      if (quant_[v] == QuantKind::Exists)
        res = vt || value(restrict_counted(r, v, false));
      else
        res = vt && value(restrict_counted(r, v, false));
    }
    value_memo_.emplace(m, res);
    if (r != m) value_memo_.emplace(r, res);
    return res;
  }

  // Greedy witness extraction over the leading run, one atom at a time. The
  // value memo built during the main search makes the re-evaluations cheap.
  std::vector<std::pair<int, bool>> leading_assignment(bool overall) {
    int run = q_.leading_run_length();
    int first = q_.blocks[0].first_atom;
    int last = q_.blocks[run - 1].first_atom + q_.blocks[run - 1].num_atoms;
    std::vector<std::pair<int, bool>> out;
    ExprId m = q_.matrix;
    for (int v = first; v < last; ++v) {
      ExprId mt = restrict_counted(m, v, true);
      bool keep_true = value(mt) == overall;
      out.emplace_back(v, keep_true);
      m = keep_true ? mt : restrict_counted(m, v, false);
    }
    return out;
  }

  uint64_t decisions() const { return decisions_; }

 private:
  void bump() {
    if (++steps_ > limits_.step_budget)
      throw BudgetExceeded("solver budget exceeded (" + std::to_string(limits_.step_budget) +
                           " steps)");
  }

  ExprId restrict_counted(ExprId m, int32_t v, bool val) {
    ExprId r = arena_.restrict1(m, v, val, &steps_);
    if (steps_ > limits_.step_budget)
      throw BudgetExceeded("solver budget exceeded (" + std::to_string(limits_.step_budget) +
                           " steps)");
    return r;
  }

  // Literals forced by the matrix shape. On a conjunctive spine an
  // existential literal can be assigned to satisfy it and a universal literal
  // falsifies the whole matrix; on a disjunctive spine dually. The rules hold
  // for a literal of any block: it depends on its own atom alone, so the
  // forced value is position-independent.
  ExprId propagate(ExprId m) {
    while (m != expr_true && m != expr_false) {
      lits_.clear();
      bool and_spine = spine_root_is_and(m);
      collect(m, true, and_spine);
      ExprId next = m;
      bool changed = false;
      for (const auto& [v, pol] : lits_) {
        if (and_spine) {
          if (quant_[v] == QuantKind::Exists) {
            next = restrict_counted(next, v, pol);
            changed = true;
          } else {
            return expr_false;
          }
        } else {
          if (quant_[v] == QuantKind::Forall) {
            next = restrict_counted(next, v, !pol);
            changed = true;
          } else {
            return expr_true;
          }
        }
        if (next == expr_true || next == expr_false) return next;
      }
      if (!changed) return next;
      m = next;
    }
    return m;
  }

  bool spine_root_is_and(ExprId m) {
    const ExprNode& n = arena_.node(m);
    switch (n.op) {
      case Op::And: return true;
      case Op::Or:
      case Op::Implies: return false;
      case Op::Not: return !spine_root_is_and_neg(n.kids[0]);
      default: return true;  // literal-only "spine"
    }
  }
  bool spine_root_is_and_neg(ExprId m) {
    const ExprNode& n = arena_.node(m);
    switch (n.op) {
      case Op::And: return true;
      case Op::Or:
      case Op::Implies: return false;
      default: return true;
    }
  }

  // Collects literal entries of the maximal and-spine (or or-spine) through
  // nested gates of the same effective kind, with polarity tracking.
  void collect(ExprId m, bool pol, bool want_and) {
    const ExprNode& n = arena_.node(m);
    switch (n.op) {
      case Op::Var:
        lits_.emplace_back(n.var, pol);
        return;
      case Op::Not:
        collect(n.kids[0], !pol, want_and);
        return;
      case Op::And:
        if (pol == want_and)
          for (ExprId k : n.kids) collect(k, pol, want_and);
        return;
      case Op::Or:
        if (pol != want_and)
          for (ExprId k : n.kids) collect(k, pol, want_and);
        return;
      case Op::Implies:
        // a -> b is or(!a, b) under positive polarity, and(a, !b) negated.
        if (pol != want_and) {
          collect(n.kids[0], !pol, want_and);
          collect(n.kids[1], pol, want_and);
        }
        return;
      default:
        return;  // Iff and constants are opaque to the spine
    }
  }

  const QbfInstance& q_;
  ExprArena& arena_;
  SolveLimits limits_;
  std::vector<QuantKind> quant_;
  std::unordered_map<ExprId, bool> value_memo_;
  std::vector<std::pair<int32_t, bool>> lits_;
  uint64_t steps_ = 0;
  uint64_t decisions_ = 0;
};

}  // namespace

SolveResult solve(const QbfInstance& q, const SolveLimits& limits) {
  auto start = std::chrono::steady_clock::now();
  Engine eng(q, limits);
  SolveResult res;
  bool sat = eng.value(q.matrix);
  res.status = sat ? SolveStatus::Sat : SolveStatus::Unsat;

  if (!q.blocks.empty()) {
    QuantKind lead = q.blocks[0].quant;
    if ((sat && lead == QuantKind::Exists) || (!sat && lead == QuantKind::Forall))
      res.outer_assignment = eng.leading_assignment(sat);
  }
  res.decisions = eng.decisions();
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

namespace {

// Bit-parallel evaluation of the matrix over 64 assignments at a time.
// Assignment index bit layout: atom 0 (outermost) is the most significant
// index bit, the innermost atom is bit 0.
uint64_t eval_block(const ExprArena& a, ExprId root, int n, uint64_t block_index,
                    std::vector<uint64_t>& memo, std::vector<uint8_t>& stamp, uint8_t epoch) {
  static const uint64_t patterns[6] = {
      0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
      0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull,
  };
  if (stamp[root] == epoch) return memo[root];
  const ExprNode& node = a.node(root);
  uint64_t r = 0;
  switch (node.op) {
    case Op::False: r = 0; break;
    case Op::True: r = ~0ull; break;
    case Op::Var: {
      int pos = n - 1 - node.var;  // index bit position of this atom
      if (pos < 6)
        r = patterns[pos];
      else
        r = ((block_index >> (pos - 6)) & 1) ? ~0ull : 0;
      break;
    }
    case Op::Not:
      r = ~eval_block(a, node.kids[0], n, block_index, memo, stamp, epoch);
      break;
    case Op::And: {
      r = ~0ull;
      for (ExprId k : node.kids) r &= eval_block(a, k, n, block_index, memo, stamp, epoch);
      break;
    }
    case Op::Or: {
      r = 0;
      for (ExprId k : node.kids) r |= eval_block(a, k, n, block_index, memo, stamp, epoch);
      break;
    }
    case Op::Implies:
      r = ~eval_block(a, node.kids[0], n, block_index, memo, stamp, epoch) |
          eval_block(a, node.kids[1], n, block_index, memo, stamp, epoch);
      break;
    case Op::Iff:
      r = ~(eval_block(a, node.kids[0], n, block_index, memo, stamp, epoch) ^
            eval_block(a, node.kids[1], n, block_index, memo, stamp, epoch));
      break;
  }
  memo[root] = r;
  stamp[root] = epoch;
  return r;
}

}  // namespace

SolveStatus brute_eval(const QbfInstance& q) {
  int n = q.total_atoms();
  if (n > 24) throw BudgetExceeded("brute_eval supports at most 24 atoms, got " +
                                   std::to_string(n));
  const ExprArena& a = *q.arena;
  if (a.node(q.matrix).high_var >= n)
    throw InternalError("brute_eval: matrix references an atom outside every block");

  // Truth table of the matrix, one byte per assignment.
  size_t total = size_t{1} << n;
  std::vector<uint8_t> table(std::max<size_t>(total, 64));
  std::vector<uint64_t> memo(a.size());
  std::vector<uint8_t> stamp(a.size(), 0);
  uint8_t epoch = 0;
  size_t nblocks = (total + 63) / 64;
  for (size_t b = 0; b < nblocks; ++b) {
    if (++epoch == 0) {
      std::fill(stamp.begin(), stamp.end(), 0);
      epoch = 1;
    }
    uint64_t bits = eval_block(a, q.matrix, n, b, memo, stamp, epoch);
    for (int i = 0; i < 64 && b * 64 + i < total; ++i)
      table[b * 64 + i] = (bits >> i) & 1;
  }
  if (n < 6) table.resize(total);

  // Fold innermost atom first: adjacent pairs differ in index bit 0.
  std::vector<QuantKind> quant(n);
  for (const auto& blk : q.blocks)
    for (int i = 0; i < blk.num_atoms; ++i) quant[blk.first_atom + i] = blk.quant;
  size_t size = total;
  for (int v = n - 1; v >= 0; --v) {
    size /= 2;
    for (size_t i = 0; i < size; ++i) {
      uint8_t x = table[2 * i], y = table[2 * i + 1];
      table[i] = quant[v] == QuantKind::Exists ? (x | y) : (x & y);
    }
  }
  return table[0] ? SolveStatus::Sat : SolveStatus::Unsat;
}

}  // namespace hyperbmc
