#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

namespace hyperbmc {

// Boolean circuit nodes. Hash-consed inside an ExprArena, so structurally
// equal expressions built in one arena share one id. Smart constructors do
// constant folding but never reassociate or flatten: the shape callers build
// is the shape they get back.
enum class Op : uint8_t { False, True, Var, Not, And, Or, Implies, Iff };

using ExprId = uint32_t;

constexpr ExprId expr_false = 0;
constexpr ExprId expr_true = 1;

struct ExprNode {
  Op op;
  int32_t var = -1;            // for Op::Var
  std::vector<ExprId> kids;
  int32_t low_var = INT32_MAX;   // smallest var in support
  int32_t high_var = -1;         // largest var in support
};

class ExprArena {
 public:
  ExprArena();

  ExprId f() const { return expr_false; }
  ExprId t() const { return expr_true; }
  ExprId var(int32_t v);
  ExprId mk_not(ExprId a);
  ExprId mk_and(std::vector<ExprId> kids);
  ExprId mk_and(ExprId a, ExprId b) { return mk_and(std::vector<ExprId>{a, b}); }
  ExprId mk_or(std::vector<ExprId> kids);
  ExprId mk_or(ExprId a, ExprId b) { return mk_or(std::vector<ExprId>{a, b}); }
  ExprId mk_implies(ExprId a, ExprId b);
  ExprId mk_iff(ExprId a, ExprId b);
  // (c -> t) & (!c -> e), folded when c is constant.
  ExprId mk_ite(ExprId c, ExprId t, ExprId e);

  const ExprNode& node(ExprId id) const { return nodes_[id]; }
  bool is_const(ExprId id) const { return id <= expr_true; }
  size_t size() const { return nodes_.size(); }

  // Standard propositional evaluation under a total assignment, indexed by
  // var id. Missing vars (id >= assignment size or value < 0) are an error.
  bool eval(ExprId root, const std::vector<int8_t>& assignment) const;

  // Cofactor: substitute one var by a constant and fold. Results are cached
  // for the lifetime of the arena. `steps`, when given, is incremented by the
  // number of nodes visited (resource accounting for the solver).
  ExprId restrict1(ExprId root, int32_t v, bool value, uint64_t* steps = nullptr);

  // Rewrite vars through `map` (old var -> new var id), copying the DAG into
  // `target`. Used to instantiate a model's step copies.
  ExprId rewrite_vars(ExprId root, ExprArena& target,
                      const std::function<int32_t(int32_t)>& map) const;

  // All distinct vars in the support of root, ascending.
  std::vector<int32_t> support(ExprId root) const;

  // Structural equality across arenas.
  static bool equal(const ExprArena& a, ExprId ea, const ExprArena& b, ExprId eb);

  // Render with vars printed through `name`. For diagnostics and tests.
  std::string to_string(ExprId root, const std::function<std::string(int32_t)>& name) const;

 private:
  ExprId intern(ExprNode n);

  struct KeyHash {
    size_t operator()(const ExprNode* n) const;
  };
  struct KeyEq {
    bool operator()(const ExprNode* a, const ExprNode* b) const;
  };

  // Deque keeps node addresses stable; cons_ keys point into it.
  std::deque<ExprNode> nodes_;
  std::unordered_map<const ExprNode*, ExprId, KeyHash, KeyEq> cons_;
  std::unordered_map<uint64_t, ExprId> restrict_cache_;
};

}  // namespace hyperbmc
