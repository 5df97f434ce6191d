#include "hyperbmc/qbf.hpp"

#include <cassert>
#include <map>
#include <sstream>
#include <unordered_map>

#include "hyperbmc/diag.hpp"

namespace hyperbmc {

int QbfInstance::total_atoms() const {
  int n = 0;
  for (const auto& b : blocks) n += b.num_atoms;
  return n;
}

QuantKind QbfInstance::quant_of_atom(int atom) const {
  return blocks[block_of_atom(atom)].quant;
}

int QbfInstance::block_of_atom(int atom) const {
  for (size_t i = 0; i < blocks.size(); ++i)
    if (atom < blocks[i].first_atom + blocks[i].num_atoms) return static_cast<int>(i);
  throw InternalError("atom id outside every block");
}

int QbfInstance::leading_run_length() const {
  if (blocks.empty()) return 0;
  int n = 1;
  while (n < static_cast<int>(blocks.size()) && blocks[n].quant == blocks[0].quant) ++n;
  return n;
}

QbfInstance assemble(const std::vector<std::shared_ptr<SymbolicKripke>>& models,
                     const HyperFormula& f, int k, Semantics sem) {
  std::vector<const SymbolicKripke*> raw;
  for (const auto& m : models) raw.push_back(m.get());
  typecheck(f, raw);
  if (is_halting(sem))
    for (const auto* m : raw)
      if (!m->halt_var())
        throw InputError("halting semantics require a halt variable in model '" + m->name() +
                         "' (declare 'halt' or use the -- @halt: pragma)");

  QbfInstance q;
  q.arena = std::make_shared<ExprArena>();
  q.k = k;
  q.sem = sem;
  q.models = models;

  std::vector<std::string> tids;
  for (const auto& quant : f.prefix) tids.push_back(quant.tid);
  q.ctx = std::make_shared<UnrollContext>(raw, tids, k);

  for (int t = 0; t < q.ctx->tid_count(); ++t) {
    q.blocks.push_back(QbfBlock{f.prefix[t].kind, tids[t], q.ctx->block_first(t),
                                q.ctx->block_size(t)});
    q.model_names.push_back(raw[t]->name());
    q.model_exprs.push_back(unroll_model(*q.arena, *q.ctx, t));
  }
  q.body_expr = unroll_body(*q.arena, *q.ctx, f.body, 0, sem);

  // Right-nested: each model's unrolling guards exactly its own quantifier.
  ExprId acc = q.body_expr;
  for (int t = q.ctx->tid_count(); t-- > 0;) {
    if (f.prefix[t].kind == QuantKind::Exists)
      acc = q.arena->mk_and(q.model_exprs[t], acc);
    else
      acc = q.arena->mk_implies(q.model_exprs[t], acc);
  }
  q.matrix = acc;
  return q;
}

// ----------------------------------------------------------------- QCIR ---

namespace {

// Reachable non-literal gates in a deterministic post-order.
void gate_postorder(const ExprArena& a, ExprId root, std::vector<ExprId>& order,
                    std::vector<bool>& seen) {
  if (seen[root]) return;
  seen[root] = true;
  const ExprNode& n = a.node(root);
  for (ExprId kid : n.kids) gate_postorder(a, kid, order, seen);
  if (n.op == Op::And || n.op == Op::Or || n.op == Op::Implies || n.op == Op::Iff ||
      n.op == Op::False || n.op == Op::True)
    order.push_back(root);
}

}  // namespace

std::string to_qcir(const QbfInstance& q) {
  const ExprArena& a = *q.arena;
  int nvars = q.total_atoms();

  std::vector<ExprId> gates;
  std::vector<bool> seen(a.size(), false);
  gate_postorder(a, q.matrix, gates, seen);

  // Literal of a node: variables and Not map to signed references, gates to
  // their assigned id.
  std::unordered_map<ExprId, long> gate_id;
  long next_id = nvars + 1;
  for (ExprId g : gates) gate_id[g] = next_id++;

  std::function<long(ExprId)> lit = [&](ExprId e) -> long {
    const ExprNode& n = a.node(e);
    if (n.op == Op::Var) return n.var + 1;
    if (n.op == Op::Not) return -lit(n.kids[0]);
    auto it = gate_id.find(e);
    if (it == gate_id.end()) throw InternalError("to_qcir: unnumbered gate");
    return it->second;
  };

  std::ostringstream os;
  os << "#QCIR-G14\n";
  for (const auto& b : q.blocks) {
    os << (b.quant == QuantKind::Exists ? "exists(" : "forall(");
    for (int i = 0; i < b.num_atoms; ++i) {
      if (i) os << ", ";
      os << b.first_atom + i + 1;
    }
    os << ")\n";
  }
  os << "output(" << lit(q.matrix) << ")\n";
  for (ExprId g : gates) {
    const ExprNode& n = a.node(g);
    os << gate_id[g] << " = ";
    switch (n.op) {
      case Op::True: os << "and()"; break;   // empty and is true
      case Op::False: os << "or()"; break;   // empty or is false
      case Op::And:
      case Op::Or: {
        os << (n.op == Op::And ? "and(" : "or(");
        for (size_t i = 0; i < n.kids.size(); ++i) {
          if (i) os << ", ";
          os << lit(n.kids[i]);
        }
        os << ")";
        break;
      }
      case Op::Implies:
        os << "or(" << -lit(n.kids[0]) << ", " << lit(n.kids[1]) << ")";
        break;
      case Op::Iff:
        // xor of negation; QCIR-G14 supports xor gates.
        os << "xor(" << -lit(n.kids[0]) << ", " << lit(n.kids[1]) << ")";
        break;
      default:
        throw InternalError("to_qcir: unexpected gate op");
    }
    os << "\n";
  }
  return os.str();
}

// -------------------------------------------------------------- QDIMACS ---

std::string to_qdimacs(const QbfInstance& q) {
  const ExprArena& a = *q.arena;
  int nvars = q.total_atoms();

  std::ostringstream clauses;
  long nclauses = 0;
  long total_vars = nvars;

  auto emit = [&](const std::vector<long>& lits) {
    for (long l : lits) clauses << l << " ";
    clauses << "0\n";
    ++nclauses;
  };

  std::vector<long> quant_aux;
  if (q.matrix == expr_false) {
    // Contradiction on a fresh variable; keeps every line a proper clause.
    long v = ++total_vars;
    quant_aux.push_back(v);
    emit({v});
    emit({-v});
  } else if (q.matrix == expr_true) {
    // No clauses.
  } else {
    std::vector<ExprId> gates;
    std::vector<bool> seen(a.size(), false);
    gate_postorder(a, q.matrix, gates, seen);
    std::unordered_map<ExprId, long> gate_id;
    for (ExprId g : gates) {
      gate_id[g] = ++total_vars;
      quant_aux.push_back(total_vars);
    }
    std::function<long(ExprId)> lit = [&](ExprId e) -> long {
      const ExprNode& n = a.node(e);
      if (n.op == Op::Var) return n.var + 1;
      if (n.op == Op::Not) return -lit(n.kids[0]);
      return gate_id.at(e);
    };
    for (ExprId g : gates) {
      const ExprNode& n = a.node(g);
      long gl = gate_id.at(g);
      switch (n.op) {
        case Op::And: {
          std::vector<long> big{gl};
          for (ExprId kid : n.kids) {
            emit({-gl, lit(kid)});
            big.push_back(-lit(kid));
          }
          emit(big);
          break;
        }
        case Op::Or: {
          std::vector<long> big{-gl};
          for (ExprId kid : n.kids) {
            emit({gl, -lit(kid)});
            big.push_back(lit(kid));
          }
          emit(big);
          break;
        }
        case Op::Implies: {
          long x = lit(n.kids[0]), y = lit(n.kids[1]);
          emit({-gl, -x, y});
          emit({gl, x});
          emit({gl, -y});
          break;
        }
        case Op::Iff: {
          long x = lit(n.kids[0]), y = lit(n.kids[1]);
          emit({-gl, -x, y});
          emit({-gl, x, -y});
          emit({gl, x, y});
          emit({gl, -x, -y});
          break;
        }
        case Op::True:
          emit({gl});
          break;
        case Op::False:
          emit({-gl});
          break;
        default:
          throw InternalError("to_qdimacs: unexpected gate op");
      }
    }
    emit({lit(q.matrix)});
  }

  // Quantifier lines: blocks in order, aux vars innermost-existential;
  // adjacent same-kind lines merged so e/a lines alternate.
  std::vector<std::pair<char, std::vector<long>>> qlines;
  for (const auto& b : q.blocks) {
    std::vector<long> vars;
    for (int i = 0; i < b.num_atoms; ++i) vars.push_back(b.first_atom + i + 1);
    char kind = b.quant == QuantKind::Exists ? 'e' : 'a';
    if (!qlines.empty() && qlines.back().first == kind)
      qlines.back().second.insert(qlines.back().second.end(), vars.begin(), vars.end());
    else
      qlines.emplace_back(kind, std::move(vars));
  }
  if (!quant_aux.empty()) {
    if (!qlines.empty() && qlines.back().first == 'e')
      qlines.back().second.insert(qlines.back().second.end(), quant_aux.begin(),
                                  quant_aux.end());
    else
      qlines.emplace_back('e', quant_aux);
  }

  std::ostringstream os;
  os << "p cnf " << total_vars << " " << nclauses << "\n";
  for (const auto& [kind, vars] : qlines) {
    os << kind;
    for (long v : vars) os << " " << v;
    os << " 0\n";
  }
  os << clauses.str();
  return os.str();
}

std::string map_sidecar(const QbfInstance& q) {
  if (!q.ctx) throw InternalError("map_sidecar: instance has no unroll context");
  std::ostringstream os;
  for (int id = 0; id < q.total_atoms(); ++id) {
    UnrolledAtom ua = q.ctx->decode(id);
    const SymbolicKripke& m = q.ctx->model(ua.tid_index);
    os << id + 1 << " " << q.ctx->tid(ua.tid_index) << " " << m.var(ua.var_index).name << " "
       << ua.bit << " " << ua.step << "\n";
  }
  return os.str();
}

// -------------------------------------------------------------- readers ---

QbfInstance parse_qdimacs(const std::string& text) {
  QbfInstance q;
  q.arena = std::make_shared<ExprArena>();
  std::istringstream in(text);
  std::string line;
  long nvars = -1;
  std::vector<ExprId> clause_exprs;
  bool saw_preamble = false;
  int block_no = 0;
  std::vector<bool> quantified;

  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "c") continue;
    if (first == "p") {
      std::string fmt;
      long ncl;
      if (!(ls >> fmt >> nvars >> ncl) || fmt != "cnf")
        throw InputError("QDIMACS: malformed preamble");
      saw_preamble = true;
      quantified.assign(nvars, false);
      continue;
    }
    if (!saw_preamble) throw InputError("QDIMACS: clause before preamble");
    if (first == "e" || first == "a") {
      QbfBlock b;
      b.quant = first == "e" ? QuantKind::Exists : QuantKind::Forall;
      b.tid = "q" + std::to_string(++block_no);
      std::vector<long> vars;
      long v;
      while (ls >> v && v != 0) {
        if (v < 1 || v > nvars) throw InputError("QDIMACS: quantified var out of range");
        vars.push_back(v);
        quantified[v - 1] = true;
      }
      if (vars.empty()) continue;
      // Blocks read back use var count only; ids need not be contiguous, so
      // record the span via an explicit list re-check in quant_of_atom users.
      b.first_atom = static_cast<int>(vars.front() - 1);
      b.num_atoms = static_cast<int>(vars.size());
      // Require contiguity (our own emitter guarantees it).
      for (size_t i = 0; i < vars.size(); ++i)
        if (vars[i] != vars.front() + static_cast<long>(i))
          throw InputError("QDIMACS reader supports contiguous quantifier blocks only");
      q.blocks.push_back(b);
      continue;
    }
    // Clause line.
    std::vector<ExprId> lits;
    long v = std::stol(first);
    while (true) {
      if (v == 0) break;
      long var = v < 0 ? -v : v;
      if (var > nvars) throw InputError("QDIMACS: literal out of range");
      ExprId x = q.arena->var(static_cast<int32_t>(var - 1));
      lits.push_back(v < 0 ? q.arena->mk_not(x) : x);
      if (!(ls >> v)) throw InputError("QDIMACS: clause not 0-terminated");
    }
    clause_exprs.push_back(q.arena->mk_or(std::move(lits)));
  }
  if (!saw_preamble) throw InputError("QDIMACS: missing preamble");
  // Free variables are outermost existential by convention.
  std::vector<long> free_vars;
  for (long v = 1; v <= nvars; ++v)
    if (!quantified[v - 1]) free_vars.push_back(v);
  if (!free_vars.empty()) {
    for (size_t i = 0; i < free_vars.size(); ++i)
      if (free_vars[i] != free_vars.front() + static_cast<long>(i))
        throw InputError("QDIMACS reader supports contiguous free-variable spans only");
    QbfBlock b;
    b.quant = QuantKind::Exists;
    b.tid = "free";
    b.first_atom = static_cast<int>(free_vars.front() - 1);
    b.num_atoms = static_cast<int>(free_vars.size());
    q.blocks.insert(q.blocks.begin(), b);
  }
  q.matrix = q.arena->mk_and(std::move(clause_exprs));
  return q;
}

QbfInstance parse_qcir(const std::string& text) {
  QbfInstance q;
  q.arena = std::make_shared<ExprArena>();
  std::istringstream in(text);
  std::string line;
  std::map<long, ExprId> defs;
  std::optional<long> output;
  long max_var = 0;
  int block_no = 0;

  auto parse_lit_list = [&](const std::string& s) {
    std::vector<long> lits;
    std::string num;
    for (char c : s) {
      if (c == '-' || isdigit(static_cast<unsigned char>(c))) {
        num += c;
      } else if (!num.empty()) {
        lits.push_back(std::stol(num));
        num.clear();
      }
    }
    if (!num.empty()) lits.push_back(std::stol(num));
    return lits;
  };
  auto lit_expr = [&](long l) -> ExprId {
    long v = l < 0 ? -l : l;
    ExprId e;
    auto it = defs.find(v);
    if (it != defs.end())
      e = it->second;
    else
      e = q.arena->var(static_cast<int32_t>(v - 1));
    return l < 0 ? q.arena->mk_not(e) : e;
  };

  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto starts = [&](const char* p) { return line.rfind(p, 0) == 0; };
    if (starts("exists(") || starts("forall(")) {
      QbfBlock b;
      b.quant = starts("exists(") ? QuantKind::Exists : QuantKind::Forall;
      b.tid = "q" + std::to_string(++block_no);
      std::vector<long> vars = parse_lit_list(line);
      if (vars.empty()) continue;
      for (size_t i = 0; i < vars.size(); ++i) {
        if (vars[i] <= 0) throw InputError("QCIR: negative var in quantifier block");
        if (vars[i] != vars.front() + static_cast<long>(i))
          throw InputError("QCIR reader supports contiguous quantifier blocks only");
        max_var = std::max(max_var, vars[i]);
      }
      b.first_atom = static_cast<int>(vars.front() - 1);
      b.num_atoms = static_cast<int>(vars.size());
      q.blocks.push_back(b);
      continue;
    }
    if (starts("output(")) {
      auto lits = parse_lit_list(line);
      if (lits.size() != 1) throw InputError("QCIR: malformed output line");
      output = lits[0];
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos) throw InputError("QCIR: expected gate definition: " + line);
    long gid = std::stol(line.substr(0, eq));
    std::string rhs = line.substr(eq + 1);
    size_t paren = rhs.find('(');
    if (paren == std::string::npos) throw InputError("QCIR: malformed gate: " + line);
    std::string kind = rhs.substr(0, paren);
    kind.erase(0, kind.find_first_not_of(' '));
    kind.erase(kind.find_last_not_of(' ') + 1);
    std::vector<long> args = parse_lit_list(rhs.substr(paren));
    std::vector<ExprId> kid_exprs;
    for (long l : args) kid_exprs.push_back(lit_expr(l));
    ExprId g;
    if (kind == "and") {
      g = q.arena->mk_and(std::move(kid_exprs));
    } else if (kind == "or") {
      g = q.arena->mk_or(std::move(kid_exprs));
    } else if (kind == "xor") {
      if (kid_exprs.size() != 2) throw InputError("QCIR: xor expects 2 args");
      g = q.arena->mk_not(q.arena->mk_iff(kid_exprs[0], kid_exprs[1]));
    } else if (kind == "ite") {
      if (kid_exprs.size() != 3) throw InputError("QCIR: ite expects 3 args");
      g = q.arena->mk_ite(kid_exprs[0], kid_exprs[1], kid_exprs[2]);
    } else {
      throw InputError("QCIR: unknown gate kind '" + kind + "'");
    }
    defs[gid] = g;
  }
  if (!output) throw InputError("QCIR: missing output line");
  q.matrix = lit_expr(*output);
  return q;
}

}  // namespace hyperbmc
