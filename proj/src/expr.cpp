#include "hyperbmc/expr.hpp"

#include <algorithm>
#include <cassert>
#include <set>

#include "hyperbmc/diag.hpp"

namespace hyperbmc {

size_t ExprArena::KeyHash::operator()(const ExprNode* n) const {
  size_t h = static_cast<size_t>(n->op) * 0x9e3779b97f4a7c15ull;
  h ^= std::hash<int32_t>()(n->var) + 0x9e3779b9 + (h << 6) + (h >> 2);
  for (ExprId k : n->kids) h ^= std::hash<uint32_t>()(k) + 0x9e3779b9 + (h << 6) + (h >> 2);
  return h;
}

bool ExprArena::KeyEq::operator()(const ExprNode* a, const ExprNode* b) const {
  return a->op == b->op && a->var == b->var && a->kids == b->kids;
}

ExprArena::ExprArena() {
  nodes_.push_back(ExprNode{Op::False, -1, {}, INT32_MAX, -1});
  nodes_.push_back(ExprNode{Op::True, -1, {}, INT32_MAX, -1});
}

ExprId ExprArena::intern(ExprNode n) {
  n.low_var = (n.op == Op::Var) ? n.var : INT32_MAX;
  n.high_var = (n.op == Op::Var) ? n.var : -1;
  for (ExprId k : n.kids) {
    n.low_var = std::min(n.low_var, nodes_[k].low_var);
    n.high_var = std::max(n.high_var, nodes_[k].high_var);
  }
  auto it = cons_.find(&n);
  if (it != cons_.end()) return it->second;
  nodes_.push_back(std::move(n));
  ExprId id = static_cast<ExprId>(nodes_.size() - 1);
  cons_.emplace(&nodes_[id], id);
  return id;
}

ExprId ExprArena::var(int32_t v) {
  assert(v >= 0);
  return intern(ExprNode{Op::Var, v, {}, 0, 0});
}

ExprId ExprArena::mk_not(ExprId a) {
  if (a == expr_false) return expr_true;
  if (a == expr_true) return expr_false;
  if (nodes_[a].op == Op::Not) return nodes_[a].kids[0];
  return intern(ExprNode{Op::Not, -1, {a}, 0, 0});
}

ExprId ExprArena::mk_and(std::vector<ExprId> kids) {
  std::vector<ExprId> keep;
  keep.reserve(kids.size());
  for (ExprId k : kids) {
    if (k == expr_false) return expr_false;
    if (k == expr_true) continue;
    keep.push_back(k);
  }
  if (keep.empty()) return expr_true;
  if (keep.size() == 1) return keep[0];
  return intern(ExprNode{Op::And, -1, std::move(keep), 0, 0});
}

ExprId ExprArena::mk_or(std::vector<ExprId> kids) {
  std::vector<ExprId> keep;
  keep.reserve(kids.size());
  for (ExprId k : kids) {
    if (k == expr_true) return expr_true;
    if (k == expr_false) continue;
    keep.push_back(k);
  }
  if (keep.empty()) return expr_false;
  if (keep.size() == 1) return keep[0];
  return intern(ExprNode{Op::Or, -1, std::move(keep), 0, 0});
}

ExprId ExprArena::mk_implies(ExprId a, ExprId b) {
  if (a == expr_false || b == expr_true) return expr_true;
  if (a == expr_true) return b;
  if (b == expr_false) return mk_not(a);
  if (a == b) return expr_true;
  return intern(ExprNode{Op::Implies, -1, {a, b}, 0, 0});
}

ExprId ExprArena::mk_iff(ExprId a, ExprId b) {
  if (a == expr_true) return b;
  if (b == expr_true) return a;
  if (a == expr_false) return mk_not(b);
  if (b == expr_false) return mk_not(a);
  if (a == b) return expr_true;
  if (nodes_[a].op == Op::Not && nodes_[a].kids[0] == b) return expr_false;
  if (nodes_[b].op == Op::Not && nodes_[b].kids[0] == a) return expr_false;
  return intern(ExprNode{Op::Iff, -1, {a, b}, 0, 0});
}

ExprId ExprArena::mk_ite(ExprId c, ExprId t, ExprId e) {
  if (c == expr_true) return t;
  if (c == expr_false) return e;
  if (t == e) return t;
  return mk_and(mk_implies(c, t), mk_implies(mk_not(c), e));
}

bool ExprArena::eval(ExprId root, const std::vector<int8_t>& assignment) const {
  // Iterative DFS; per-call memo keyed by node id.
  std::vector<int8_t> memo(nodes_.size(), -1);
  std::vector<ExprId> stack{root};
  while (!stack.empty()) {
    ExprId id = stack.back();
    const ExprNode& n = nodes_[id];
    if (memo[id] >= 0) {
      stack.pop_back();
      continue;
    }
    if (n.op == Op::False || n.op == Op::True) {
      memo[id] = (n.op == Op::True);
      stack.pop_back();
      continue;
    }
    if (n.op == Op::Var) {
      if (n.var < 0 || static_cast<size_t>(n.var) >= assignment.size() || assignment[n.var] < 0)
        throw InternalError("eval: assignment misses var " + std::to_string(n.var));
      memo[id] = assignment[n.var];
      stack.pop_back();
      continue;
    }
    bool ready = true;
    for (ExprId k : n.kids)
      if (memo[k] < 0) {
        stack.push_back(k);
        ready = false;
      }
    if (!ready) continue;
    stack.pop_back();
    switch (n.op) {
      case Op::Not:
        memo[id] = !memo[n.kids[0]];
        break;
      case Op::And: {
        bool v = true;
        for (ExprId k : n.kids) v = v && memo[k];
        memo[id] = v;
        break;
      }
      case Op::Or: {
        bool v = false;
        for (ExprId k : n.kids) v = v || memo[k];
        memo[id] = v;
        break;
      }
      case Op::Implies:
        memo[id] = !memo[n.kids[0]] || memo[n.kids[1]];
        break;
      case Op::Iff:
        memo[id] = memo[n.kids[0]] == memo[n.kids[1]];
        break;
      default:
        throw InternalError("eval: unexpected op");
    }
  }
  return memo[root] == 1;
}

ExprId ExprArena::restrict1(ExprId root, int32_t v, bool value, uint64_t* steps) {
  const ExprNode& n = nodes_[root];
  if (v < n.low_var || v > n.high_var) return root;  // not in support
  if (steps) ++*steps;
  uint64_t key = (static_cast<uint64_t>(root) << 32) | (static_cast<uint64_t>(v) << 1) |
                 (value ? 1u : 0u);
  auto it = restrict_cache_.find(key);
  if (it != restrict_cache_.end()) return it->second;

  ExprId res;
  if (n.op == Op::Var) {
    res = value ? expr_true : expr_false;
  } else {
    std::vector<ExprId> kids = n.kids;  // copy: restrict1 may reallocate nodes_
    Op op = n.op;
    for (ExprId& k : kids) k = restrict1(k, v, value, steps);
    switch (op) {
      case Op::Not: res = mk_not(kids[0]); break;
      case Op::And: res = mk_and(std::move(kids)); break;
      case Op::Or: res = mk_or(std::move(kids)); break;
      case Op::Implies: res = mk_implies(kids[0], kids[1]); break;
      case Op::Iff: res = mk_iff(kids[0], kids[1]); break;
      default: throw InternalError("restrict1: unexpected op");
    }
  }
  restrict_cache_.emplace(key, res);
  return res;
}

ExprId ExprArena::rewrite_vars(ExprId root, ExprArena& target,
                               const std::function<int32_t(int32_t)>& map) const {
  std::unordered_map<ExprId, ExprId> memo;
  std::function<ExprId(ExprId)> go = [&](ExprId id) -> ExprId {
    auto it = memo.find(id);
    if (it != memo.end()) return it->second;
    const ExprNode& n = nodes_[id];
    ExprId res;
    switch (n.op) {
      case Op::False: res = target.f(); break;
      case Op::True: res = target.t(); break;
      case Op::Var: res = target.var(map(n.var)); break;
      case Op::Not: res = target.mk_not(go(n.kids[0])); break;
      case Op::And: {
        std::vector<ExprId> kids;
        kids.reserve(n.kids.size());
        for (ExprId k : n.kids) kids.push_back(go(k));
        res = target.mk_and(std::move(kids));
        break;
      }
      case Op::Or: {
        std::vector<ExprId> kids;
        kids.reserve(n.kids.size());
        for (ExprId k : n.kids) kids.push_back(go(k));
        res = target.mk_or(std::move(kids));
        break;
      }
      case Op::Implies: res = target.mk_implies(go(n.kids[0]), go(n.kids[1])); break;
      case Op::Iff: res = target.mk_iff(go(n.kids[0]), go(n.kids[1])); break;
      default: throw InternalError("rewrite_vars: unexpected op");
    }
    memo.emplace(id, res);
    return res;
  };
  return go(root);
}

std::vector<int32_t> ExprArena::support(ExprId root) const {
  std::set<int32_t> vars;
  std::vector<ExprId> stack{root};
  std::vector<bool> seen(nodes_.size(), false);
  while (!stack.empty()) {
    ExprId id = stack.back();
    stack.pop_back();
    if (seen[id]) continue;
    seen[id] = true;
    const ExprNode& n = nodes_[id];
    if (n.op == Op::Var) vars.insert(n.var);
    for (ExprId k : n.kids) stack.push_back(k);
  }
  return {vars.begin(), vars.end()};
}

bool ExprArena::equal(const ExprArena& a, ExprId ea, const ExprArena& b, ExprId eb) {
  const ExprNode& na = a.nodes_[ea];
  const ExprNode& nb = b.nodes_[eb];
  if (na.op != nb.op || na.var != nb.var || na.kids.size() != nb.kids.size()) return false;
  for (size_t i = 0; i < na.kids.size(); ++i)
    if (!equal(a, na.kids[i], b, nb.kids[i])) return false;
  return true;
}

std::string ExprArena::to_string(ExprId root,
                                 const std::function<std::string(int32_t)>& name) const {
  const ExprNode& n = nodes_[root];
  auto join = [&](const char* sep) {
    std::string s = "(";
    for (size_t i = 0; i < n.kids.size(); ++i) {
      if (i) s += sep;
      s += to_string(n.kids[i], name);
    }
    return s + ")";
  };
  switch (n.op) {
    case Op::False: return "false";
    case Op::True: return "true";
    case Op::Var: return name(n.var);
    case Op::Not: return "!" + to_string(n.kids[0], name);
    case Op::And: return join(" & ");
    case Op::Or: return join(" | ");
    case Op::Implies: return join(" -> ");
    case Op::Iff: return join(" <-> ");
  }
  return "?";
}

}  // namespace hyperbmc
