#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hyperbmc/diag.hpp"
#include "hyperbmc/model.hpp"

namespace hyperbmc {

// Surface syntax of the SMV subset. Kept separate from SymbolicKripke so the
// pretty-printer can round-trip source and the lowering stays in one place.

enum class SmvOp {
  BoolConst, IntConst, VarRef, NextRef,
  Not, And, Or, Implies, Iff,
  Eq, Ne, Lt, Le, Gt, Ge,
  Add, Sub,
};

struct SmvExpr;
using SmvExprPtr = std::shared_ptr<const SmvExpr>;

struct SmvExpr {
  SmvOp op;
  long value = 0;          // BoolConst (0/1) and IntConst
  std::string name;        // VarRef / NextRef
  SmvExprPtr lhs, rhs;     // unary ops use lhs only
  SourceLoc loc;
};

struct SmvRhs;
using SmvRhsPtr = std::shared_ptr<const SmvRhs>;

// Right-hand side of init()/next(): a plain expression, a set of constant
// alternatives (nondeterministic choice), or a case ladder whose branches are
// again rhs (so sets may appear under case).
struct SmvRhs {
  enum class Kind { Expr, Set, Case } kind = Kind::Expr;
  SmvExprPtr expr;
  std::vector<SmvExprPtr> set_elems;
  std::vector<std::pair<SmvExprPtr, SmvRhsPtr>> cases;
  SourceLoc loc;
};

struct SmvVarDecl {
  std::string name;
  bool boolean = true;
  long lo = 0, hi = 0;
  SourceLoc loc;
};

struct SmvAssign {
  bool is_init = false;  // init(v) vs next(v)
  std::string var;
  SmvRhsPtr rhs;
  SourceLoc loc;
};

struct SmvModel {
  std::vector<SmvVarDecl> vars;
  std::vector<SmvAssign> assigns;
  std::vector<SmvExprPtr> init_constraints;   // INIT sections
  std::vector<SmvExprPtr> trans_constraints;  // TRANS sections, may use next(v)
  std::optional<std::string> halt_pragma;     // -- @halt: <name>
  std::string origin;
};

struct SmvModelSource {
  std::string text;
  std::string origin;
};

SmvModel parse_smv(const SmvModelSource& src);

// Canonical re-emission; parse(print(parse(s))) lowers to the same structure.
std::string print_smv(const SmvModel& m);

// Bit-blasts declarations and compiles assignments/constraints into init and
// trans circuits. All errors are InputError with source locations.
SymbolicKripke lower_smv(const SmvModel& m);

// Convenience: read file, parse, lower.
SymbolicKripke parse_model_file(const std::string& path);
SymbolicKripke parse_model(const SmvModelSource& src);

}  // namespace hyperbmc
