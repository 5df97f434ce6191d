#include "hyperbmc/check.hpp"

#include <algorithm>
#include <sstream>

#include "hyperbmc/diag.hpp"
#include "json.hpp"

namespace hyperbmc {

const char* mode_name(Mode m) { return m == Mode::BugHunt ? "bughunt" : "find"; }

const char* answer_name(Answer a) {
  switch (a) {
    case Answer::Holds: return "holds";
    case Answer::Violated: return "violated";
    case Answer::Inconclusive: return "inconclusive";
  }
  return "?";
}

Answer decision_table(Mode mode, Semantics sem, SolveStatus status) {
  bool pes_like = sem == Semantics::Pes || sem == Semantics::HPes;
  bool opt_like = sem == Semantics::Opt || sem == Semantics::HOpt;
  if (mode == Mode::BugHunt) {
    if (pes_like && status == SolveStatus::Sat) return Answer::Violated;
    if (opt_like && status == SolveStatus::Unsat) return Answer::Holds;
    return Answer::Inconclusive;
  }
  if (pes_like && status == SolveStatus::Sat) return Answer::Holds;
  if (opt_like && status == SolveStatus::Unsat) return Answer::Violated;
  return Answer::Inconclusive;
}

const char* yes_no(Mode mode, SolveStatus status) {
  bool sat = status == SolveStatus::Sat;
  if (mode == Mode::BugHunt) return sat ? "NO" : "YES";
  return sat ? "YES" : "NO";
}

Trace decode_trace(const QbfInstance& q, const std::vector<std::pair<int, bool>>& assignment,
                   int block_index) {
  if (!q.ctx) throw InternalError("decode_trace: instance has no unroll context");
  const QbfBlock& b = q.blocks[block_index];
  const SymbolicKripke& m = *q.models[block_index];
  int k = q.k;

  // Assignment entries for this block, addressed by (step, flat bit).
  std::vector<int8_t> bits(b.num_atoms, -1);
  for (const auto& [atom, val] : assignment)
    if (atom >= b.first_atom && atom < b.first_atom + b.num_atoms)
      bits[atom - b.first_atom] = val;
  for (int i = 0; i < b.num_atoms; ++i)
    if (bits[i] < 0)
      throw InternalError("decode_trace: assignment misses atom " +
                          std::to_string(b.first_atom + i));

  Trace tr;
  tr.tid = b.tid;
  tr.model_name = m.name();
  tr.model = &m;
  int nbits = m.total_bits();
  for (int step = 0; step <= k; ++step) {
    std::vector<long> values;
    for (size_t v = 0; v < m.vars().size(); ++v) {
      const VarDecl& d = m.var(static_cast<int>(v));
      std::vector<bool> msb;
      for (int bit = d.bit_count - 1; bit >= 0; --bit)
        msb.push_back(bits[step * nbits + m.flat_bit(static_cast<int>(v), bit)] == 1);
      long value = decode_value(d, msb);
      if (d.kind == VarKind::Range && (value < d.lo || value > d.hi))
        throw InternalError("decode_trace: step " + std::to_string(step) + " drives '" +
                            d.name + "' to " + std::to_string(value) +
                            ", outside its declared range");
      values.push_back(value);
    }
    tr.steps.push_back(std::move(values));
  }

  // Consistency: step 0 satisfies init, consecutive steps satisfy trans.
  auto state_bits = [&](int step) {
    std::vector<int8_t> asg(nbits);
    for (int i = 0; i < nbits; ++i) asg[i] = bits[step * nbits + i];
    return asg;
  };
  if (!m.arena().eval(m.init(), state_bits(0)))
    throw InternalError("decode_trace: step 0 violates the initial condition");
  for (int step = 0; step < k; ++step) {
    std::vector<int8_t> pair(2 * nbits);
    auto cur = state_bits(step), nxt = state_bits(step + 1);
    std::copy(cur.begin(), cur.end(), pair.begin());
    std::copy(nxt.begin(), nxt.end(), pair.begin() + nbits);
    if (!m.arena().eval(m.trans(), pair))
      throw InternalError("decode_trace: steps " + std::to_string(step) + "->" +
                          std::to_string(step + 1) + " violate the transition relation");
  }
  return tr;
}

Verdict check(const std::vector<std::shared_ptr<SymbolicKripke>>& models,
              const HyperFormula& f, int k, Semantics sem, Mode mode,
              const CheckOptions& opt) {
  Verdict v;
  v.k = k;
  v.sem = sem;
  v.mode = mode;

  HyperFormula query = mode == Mode::BugHunt ? negate(f) : to_nnf(f);
  QbfInstance inst = assemble(models, query, k, sem);

  std::optional<std::vector<std::pair<int, bool>>> outer;
  try {
    if (opt.external_command) {
      ExternalOutcome ext =
          solve_external(inst, *opt.external_command, opt.external_format,
                         opt.external_timeout);
      switch (ext.kind) {
        case ExternalOutcome::Kind::Sat: v.qbf_status = SolveStatus::Sat; break;
        case ExternalOutcome::Kind::Unsat: v.qbf_status = SolveStatus::Unsat; break;
        case ExternalOutcome::Kind::SpawnFailure:
          throw InputError("external solver failed to start: " + ext.detail);
        case ExternalOutcome::Kind::Timeout:
        case ExternalOutcome::Kind::Unparseable:
          v.answer = Answer::Inconclusive;
          v.note = "external solver gave no verdict: " + ext.detail;
          return v;
      }
      outer = ext.outer_assignment;
      v.seconds = ext.seconds;
    } else {
      SolveResult r = solve(inst, opt.limits);
      v.qbf_status = r.status;
      outer = r.outer_assignment;
      v.decisions = r.decisions;
      v.seconds = r.seconds;
    }
  } catch (const BudgetExceeded& e) {
    v.answer = Answer::Inconclusive;
    v.note = e.what();
    return v;
  }

  v.answer = decision_table(mode, sem, *v.qbf_status);

  if (*v.qbf_status == SolveStatus::Sat && !inst.blocks.empty() &&
      inst.blocks[0].quant == QuantKind::Exists) {
    int run = inst.leading_run_length();
    int last = inst.blocks[run - 1].first_atom + inst.blocks[run - 1].num_atoms;
    // External solvers may print partial certificates; only a total
    // assignment of the leading run is decoded.
    std::vector<bool> covered(last, false);
    if (outer)
      for (const auto& [atom, value] : *outer) {
        (void)value;
        if (atom < last) covered[atom] = true;
      }
    bool total = outer && std::all_of(covered.begin(), covered.end(), [](bool b) { return b; });
    if (total) {
      for (int b = 0; b < run; ++b) v.traces.push_back(decode_trace(inst, *outer, b));
    } else {
      v.note = outer ? "certificate does not cover the leading existential blocks"
                     : "solver returned no certificate";
    }
  } else if (*v.qbf_status == SolveStatus::Sat && !inst.blocks.empty()) {
    v.note = "no certificate for leading universal block";
  }
  return v;
}

std::string dump_verdict_text(const Verdict& v) {
  std::ostringstream os;
  if (v.qbf_status)
    os << yes_no(v.mode, *v.qbf_status) << "\n";
  else
    os << "UNKNOWN\n";
  os << answer_name(v.answer) << " (" << mode_name(v.mode) << ", " << semantics_name(v.sem)
     << ", "
     << (v.qbf_status ? (*v.qbf_status == SolveStatus::Sat ? "SAT" : "UNSAT") : "no verdict")
     << ", k=" << v.k << ")\n";
  if (!v.note.empty()) os << "note: " << v.note << "\n";
  if (!v.traces.empty()) {
    os << (v.answer == Answer::Violated ? "counterexample:" : "witness:") << "\n";
    for (const auto& tr : v.traces) {
      os << "trace " << tr.tid;
      if (!tr.model_name.empty()) os << " (" << tr.model_name << ")";
      os << "\n";
      for (size_t i = 0; i < tr.steps.size(); ++i) {
        os << "  step " << i << ": ";
        for (size_t j = 0; j < tr.steps[i].size(); ++j) {
          if (j) os << ", ";
          const VarDecl& d = tr.model->var(static_cast<int>(j));
          os << d.name << "=";
          if (d.kind == VarKind::Boolean)
            os << (tr.steps[i][j] ? "TRUE" : "FALSE");
          else
            os << tr.steps[i][j];
        }
        os << "\n";
      }
    }
  }
  return os.str();
}

std::string dump_verdict_json(const Verdict& v) {
  nlohmann::json j;
  j["answer"] = answer_name(v.answer);
  j["yes_no"] = v.qbf_status ? yes_no(v.mode, *v.qbf_status) : "UNKNOWN";
  j["qbf_status"] =
      v.qbf_status ? (*v.qbf_status == SolveStatus::Sat ? "SAT" : "UNSAT") : "unknown";
  j["k"] = v.k;
  j["semantics"] = semantics_name(v.sem);
  j["mode"] = mode_name(v.mode);
  if (!v.note.empty()) j["note"] = v.note;
  j["traces"] = nlohmann::json::array();
  for (const auto& tr : v.traces) {
    nlohmann::json jt;
    jt["tid"] = tr.tid;
    jt["model"] = tr.model_name;
    jt["steps"] = nlohmann::json::array();
    for (const auto& step : tr.steps) {
      nlohmann::json js = nlohmann::json::object();
      for (size_t i = 0; i < step.size(); ++i) {
        const VarDecl& d = tr.model->var(static_cast<int>(i));
        if (d.kind == VarKind::Boolean)
          js[d.name] = step[i] != 0;
        else
          js[d.name] = step[i];
      }
      jt["steps"].push_back(js);
    }
    j["traces"].push_back(jt);
  }
  return j.dump();
}

}  // namespace hyperbmc
