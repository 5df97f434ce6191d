#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hyperbmc/expr.hpp"
#include "hyperbmc/hyperltl.hpp"
#include "hyperbmc/model.hpp"
#include "hyperbmc/unroll.hpp"

namespace hyperbmc {

struct QbfBlock {
  QuantKind quant;
  std::string tid;
  int first_atom = 0;
  int num_atoms = 0;
};

// A prenex QBF instance: ordered quantifier blocks over the unrolled atom
// space and a circuit matrix. Instances built by assemble() carry their
// UnrollContext and source models so certificates can be decoded; instances
// read back from QDIMACS/QCIR carry blocks and matrix only.
struct QbfInstance {
  std::shared_ptr<ExprArena> arena;
  std::vector<QbfBlock> blocks;
  ExprId matrix = expr_false;

  int k = 0;
  Semantics sem = Semantics::Pes;
  std::vector<std::string> model_names;
  std::shared_ptr<UnrollContext> ctx;                  // null for parsed-back instances
  std::vector<std::shared_ptr<SymbolicKripke>> models; // owning copies, aligned with blocks

  // Assembly parts, exposed for structural checks: matrix equals the
  // right-nested combination of model_exprs and body_expr.
  std::vector<ExprId> model_exprs;
  ExprId body_expr = expr_false;

  int total_atoms() const;
  QuantKind quant_of_atom(int atom) const;
  // Index of the block containing the atom.
  int block_of_atom(int atom) const;
  // Length of the leading run of blocks with the same quantifier kind.
  int leading_run_length() const;
};

// Builds [[K_A]] ∘_A ([[K_B]] ∘_B (... ∘_Z body)) with ∘ = ∧ for ∃ and
// ∘ = → for ∀, right-nested, under the formula's prefix. The body must be in
// NNF; the formula is typechecked against the models first.
QbfInstance assemble(const std::vector<std::shared_ptr<SymbolicKripke>>& models,
                     const HyperFormula& f, int k, Semantics sem);

// QCIR-G14, numeric ids, deterministic gate numbering (byte-identical across
// runs). Variables are numbered 1..n in block order.
std::string to_qcir(const QbfInstance& q);

// Tseitin CNF in QDIMACS. Auxiliary gate variables are appended as an
// innermost existential block (merged into the last block when that block is
// already existential, keeping quantifier lines alternating).
std::string to_qdimacs(const QbfInstance& q);

// Sidecar mapping `atom-id <tid> <var> <bit> <step>` per line, for decoding
// external certificates.
std::string map_sidecar(const QbfInstance& q);

QbfInstance parse_qdimacs(const std::string& text);
QbfInstance parse_qcir(const std::string& text);

}  // namespace hyperbmc
