#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hyperbmc/diag.hpp"
#include "hyperbmc/model.hpp"

namespace hyperbmc {

enum class LtlOp {
  True, False,
  Prop,          // var[tid], boolean model variable
  CmpEq, CmpNe,  // *lhs = rhs* / *lhs != rhs* over integer operands
  Not, And, Or, Implies, Iff,
  Next, Until, Release, Globally, Finally,
};

// One side of an arithmetic comparison: an integer variable of some trace,
// or an integer literal (grammar extension; see README).
struct CmpOperand {
  bool is_literal = false;
  long value = 0;
  std::string var;
  std::string tid;
};

struct LtlExpr;
using LtlRef = std::shared_ptr<const LtlExpr>;

struct LtlExpr {
  LtlOp op;
  std::string var, tid;       // Prop
  CmpOperand lhs, rhs;        // CmpEq/CmpNe
  std::vector<LtlRef> kids;   // unary: 1, binary: 2
  SourceLoc loc;
};

LtlRef ltl_true();
LtlRef ltl_false();
LtlRef ltl_prop(std::string var, std::string tid);
LtlRef ltl_cmp(bool eq, CmpOperand lhs, CmpOperand rhs);
LtlRef ltl_not(LtlRef a);
LtlRef ltl_and(LtlRef a, LtlRef b);
LtlRef ltl_or(LtlRef a, LtlRef b);
LtlRef ltl_implies(LtlRef a, LtlRef b);
LtlRef ltl_iff(LtlRef a, LtlRef b);
LtlRef ltl_next(LtlRef a);
LtlRef ltl_until(LtlRef a, LtlRef b);
LtlRef ltl_release(LtlRef a, LtlRef b);
LtlRef ltl_globally(LtlRef a);
LtlRef ltl_finally(LtlRef a);

bool ltl_equal(const LtlRef& a, const LtlRef& b);
std::string ltl_to_string(const LtlRef& e);
size_t ltl_size(const LtlRef& e);
bool ltl_is_temporal(const LtlRef& e);

// Trace variables actually used in a body, in first-occurrence order.
std::vector<std::string> ltl_tids(const LtlRef& e);

enum class QuantKind { Forall, Exists };

struct Quantifier {
  QuantKind kind;
  std::string tid;
  SourceLoc loc;
};

// Quantifier prefix over trace variables plus an LTL body. Closed by
// construction: the parser rejects tids missing from the prefix.
struct HyperFormula {
  std::vector<Quantifier> prefix;
  LtlRef body;
};

// Parses the .hq concrete syntax (see README for grammar and precedence).
HyperFormula parse_formula(const std::string& text, const std::string& origin = "");
HyperFormula parse_formula_file(const std::string& path);

// Negation normal form: negation only on Prop (comparisons flip between
// = and !=), G/F eliminated via R/U, Implies eliminated, Iff kept only over
// state-level (non-temporal) operands. Prefix unchanged.
HyperFormula to_nnf(const HyperFormula& f);

// Bug-hunt negation: every quantifier flipped, body negated, result in NNF.
// negate(negate(f)) is structurally equal to to_nnf(f).
HyperFormula negate(const HyperFormula& f);

bool ltl_is_nnf(const LtlRef& e);

// Checks the formula against its positionally bound models: variables
// defined, operand kinds match, comparison literals within range.
void typecheck(const HyperFormula& f, const std::vector<const SymbolicKripke*>& models);

}  // namespace hyperbmc
