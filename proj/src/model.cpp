#include "hyperbmc/model.hpp"

#include <algorithm>
#include <cassert>

#include "hyperbmc/diag.hpp"

namespace hyperbmc {

int bit_count_for(long hi) {
  if (hi >= (1L << 30))
    throw InputError("range upper bound " + std::to_string(hi) +
                     " too large (model too large, limit 2^30)");
  int bits = 1;
  while ((1L << bits) < hi + 1) ++bits;
  return bits;
}

VarDecl make_bool_var(std::string name) {
  return VarDecl{std::move(name), VarKind::Boolean, 0, 1, 1};
}

VarDecl make_range_var(std::string name, long lo, long hi) {
  if (lo < 0) throw InputError("range variable '" + name + "': lower bound must be >= 0");
  if (hi <= lo)
    throw InputError("range variable '" + name + "': upper bound must exceed lower bound");
  return VarDecl{std::move(name), VarKind::Range, lo, hi, bit_count_for(hi)};
}

SymbolicKripke::SymbolicKripke(std::vector<VarDecl> vars, std::shared_ptr<ExprArena> arena,
                               ExprId init, ExprId trans, std::optional<int> halt_var,
                               std::string name)
    : vars_(std::move(vars)),
      arena_(std::move(arena)),
      init_(init),
      trans_(trans),
      halt_var_(halt_var),
      name_(std::move(name)) {
  for (size_t i = 0; i < vars_.size(); ++i)
    for (size_t j = i + 1; j < vars_.size(); ++j)
      if (vars_[i].name == vars_[j].name)
        throw InputError("duplicate variable '" + vars_[i].name + "'");
  bit_offsets_.resize(vars_.size());
  int off = 0;
  for (size_t i = 0; i < vars_.size(); ++i) {
    bit_offsets_[i] = off;
    off += vars_[i].bit_count;
  }
  total_bits_ = off;
}

std::optional<int> SymbolicKripke::var_index(const std::string& name) const {
  for (size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].name == name) return static_cast<int>(i);
  return std::nullopt;
}

Atom SymbolicKripke::atom_of(int id) const {
  bool primed = id >= total_bits_;
  int flat = primed ? id - total_bits_ : id;
  for (size_t v = 0; v < vars_.size(); ++v) {
    if (flat < bit_offsets_[v] + vars_[v].bit_count) {
      int pos_from_msb = flat - bit_offsets_[v];
      return Atom{static_cast<int>(v), vars_[v].bit_count - 1 - pos_from_msb, primed};
    }
  }
  throw InternalError("atom_of: flat bit out of range");
}

std::string SymbolicKripke::atom_name(int id) const {
  Atom a = atom_of(id);
  std::string s = atom_display_name(vars_[a.var_index], a.bit);
  if (a.primed) s += "'";
  return s;
}

long SymbolicKripke::domain_product() const {
  long p = 1;
  for (const auto& v : vars_) {
    if (p > (1L << 40) / v.domain_size()) return 1L << 40;  // saturate
    p *= v.domain_size();
  }
  return p;
}

std::string atom_display_name(const VarDecl& decl, int bit) {
  if (decl.kind == VarKind::Boolean) return decl.name;
  return decl.name + "_" + std::to_string(bit);
}

std::vector<Atom> bit_blast(const std::vector<VarDecl>& vars, int var_index) {
  const VarDecl& d = vars[var_index];
  if (d.kind == VarKind::Range) (void)bit_count_for(d.hi);  // re-check size limit
  std::vector<Atom> atoms;
  atoms.reserve(d.bit_count);
  for (int bit = d.bit_count - 1; bit >= 0; --bit) atoms.push_back(Atom{var_index, bit, false});
  return atoms;
}

ExprId encode_value_bits(ExprArena& arena, const std::vector<ExprId>& bit_vars,
                         const VarDecl& decl, long v) {
  if (v < decl.lo || v > decl.hi)
    throw InputError("value out of bound: " + std::to_string(v) + " not in " +
                     std::to_string(decl.lo) + ".." + std::to_string(decl.hi) + " for '" +
                     decl.name + "'");
  std::vector<ExprId> lits;
  lits.reserve(bit_vars.size());
  for (size_t i = 0; i < bit_vars.size(); ++i) {
    int bit = decl.bit_count - 1 - static_cast<int>(i);
    bool set = (v >> bit) & 1;
    lits.push_back(set ? bit_vars[i] : arena.mk_not(bit_vars[i]));
  }
  return arena.mk_and(std::move(lits));
}

ExprId encode_value(ExprArena& arena, const SymbolicKripke& k, int var_index, long v,
                    bool primed) {
  const VarDecl& d = k.var(var_index);
  std::vector<ExprId> bit_vars;
  bit_vars.reserve(d.bit_count);
  for (int bit = d.bit_count - 1; bit >= 0; --bit)
    bit_vars.push_back(arena.var(k.atom_id(Atom{var_index, bit, primed})));
  return encode_value_bits(arena, bit_vars, d, v);
}

namespace {

// x >= c and x <= c over MSB-first bit vars, standard magnitude comparators.
ExprId ge_const(ExprArena& a, const std::vector<ExprId>& bits, long c, size_t i) {
  if (i == bits.size()) return a.t();
  int bit = static_cast<int>(bits.size() - 1 - i);
  ExprId rest = ge_const(a, bits, c, i + 1);
  if ((c >> bit) & 1) return a.mk_and(bits[i], rest);
  return a.mk_or(bits[i], rest);
}

ExprId le_const(ExprArena& a, const std::vector<ExprId>& bits, long c, size_t i) {
  if (i == bits.size()) return a.t();
  int bit = static_cast<int>(bits.size() - 1 - i);
  ExprId rest = le_const(a, bits, c, i + 1);
  if ((c >> bit) & 1) return a.mk_or(a.mk_not(bits[i]), rest);
  return a.mk_and(a.mk_not(bits[i]), rest);
}

}  // namespace

ExprId domain_constraint(ExprArena& arena, const SymbolicKripke& k, int var_index, bool primed) {
  const VarDecl& d = k.var(var_index);
  if (d.kind == VarKind::Boolean) return arena.t();
  std::vector<ExprId> bits;
  for (int bit = d.bit_count - 1; bit >= 0; --bit)
    bits.push_back(arena.var(k.atom_id(Atom{var_index, bit, primed})));
  return arena.mk_and(ge_const(arena, bits, d.lo, 0), le_const(arena, bits, d.hi, 0));
}

long decode_value(const VarDecl& decl, const std::vector<bool>& bits_msb_first) {
  assert(static_cast<int>(bits_msb_first.size()) == decl.bit_count);
  (void)decl;
  long v = 0;
  for (bool b : bits_msb_first) v = (v << 1) | (b ? 1 : 0);
  return v;
}

std::vector<int8_t> state_assignment(const ExplicitKripke& ek, int state) {
  const SymbolicKripke& k = *ek.model;
  std::vector<int8_t> asg(k.total_bits(), 0);
  for (size_t v = 0; v < k.vars().size(); ++v) {
    long value = ek.states[state][v];
    const VarDecl& d = k.var(static_cast<int>(v));
    for (int bit = 0; bit < d.bit_count; ++bit)
      asg[k.flat_bit(static_cast<int>(v), bit)] = static_cast<int8_t>((value >> bit) & 1);
  }
  return asg;
}

ExplicitKripke enumerate_states(const SymbolicKripke& k, long max_states) {
  long product = 1;
  for (const auto& v : k.vars()) {
    product *= v.domain_size();
    if (product > max_states)
      throw BudgetExceeded("domain product exceeds max_states=" + std::to_string(max_states));
  }

  ExplicitKripke ek;
  ek.model = &k;

  // Odometer over per-variable domains.
  std::vector<long> values(k.vars().size());
  for (size_t v = 0; v < k.vars().size(); ++v)
    values[v] = k.var(static_cast<int>(v)).kind == VarKind::Boolean ? 0 : k.var(v).lo;
  for (long n = 0; n < product; ++n) {
    ek.states.push_back(values);
    for (size_t v = k.vars().size(); v-- > 0;) {
      const VarDecl& d = k.var(static_cast<int>(v));
      long top = d.kind == VarKind::Boolean ? 1 : d.hi;
      long bottom = d.kind == VarKind::Boolean ? 0 : d.lo;
      if (values[v] < top) {
        ++values[v];
        break;
      }
      values[v] = bottom;
    }
  }

  int n = ek.state_count();
  std::vector<std::vector<int8_t>> asgs(n);
  for (int s = 0; s < n; ++s) asgs[s] = state_assignment(ek, s);

  for (int s = 0; s < n; ++s)
    if (k.arena().eval(k.init(), asgs[s])) ek.initial.push_back(s);

  ek.edges.resize(n);
  std::vector<int8_t> pair(2 * k.total_bits());
  for (int s = 0; s < n; ++s) {
    std::copy(asgs[s].begin(), asgs[s].end(), pair.begin());
    for (int t = 0; t < n; ++t) {
      std::copy(asgs[t].begin(), asgs[t].end(), pair.begin() + k.total_bits());
      if (k.arena().eval(k.trans(), pair)) ek.edges[s].push_back(t);
    }
  }

  // Reachability and the totality lint: every reachable state needs a
  // successor for traces to be infinite.
  ek.reachable.assign(n, false);
  std::vector<int> work = ek.initial;
  for (int s : work) ek.reachable[s] = true;
  while (!work.empty()) {
    int s = work.back();
    work.pop_back();
    for (int t : ek.edges[s])
      if (!ek.reachable[t]) {
        ek.reachable[t] = true;
        work.push_back(t);
      }
  }
  for (int s = 0; s < n; ++s)
    if (ek.reachable[s] && ek.edges[s].empty()) ek.totality_violations.push_back(s);

  return ek;
}

std::vector<int> ExplicitKripke::reachable_states() const {
  std::vector<int> out;
  for (int s = 0; s < state_count(); ++s)
    if (reachable[s]) out.push_back(s);
  return out;
}

std::vector<std::vector<int>> enumerate_paths(const ExplicitKripke& ek, int len,
                                              size_t max_paths) {
  std::vector<std::vector<int>> paths;
  if (len <= 0) return paths;
  std::vector<int> cur;
  std::function<void(int)> dfs = [&](int state) {
    cur.push_back(state);
    if (static_cast<int>(cur.size()) == len) {
      if (paths.size() >= max_paths)
        throw BudgetExceeded("path enumeration exceeds " + std::to_string(max_paths));
      paths.push_back(cur);
    } else {
      for (int t : ek.edges[state]) dfs(t);
    }
    cur.pop_back();
  };
  for (int s : ek.initial) dfs(s);
  return paths;
}

}  // namespace hyperbmc
