#include "doctest.h"

#include <filesystem>

#include "hyperbmc/diag.hpp"
#include "hyperbmc/model.hpp"
#include "hyperbmc/smv.hpp"
#include "testutil.hpp"

using namespace hyperbmc;
using namespace testutil;

namespace {
std::string corpus(const std::string& rel) {
  return std::string(HYPERBMC_CORPUS_DIR) + "/" + rel;
}
}  // namespace

TEST_CASE("bit_count_for") {
  CHECK(bit_count_for(1) == 1);
  CHECK(bit_count_for(3) == 2);
  CHECK(bit_count_for(4) == 3);
  CHECK(bit_count_for(7) == 3);
  CHECK(bit_count_for(8) == 4);
  CHECK_THROWS_AS(bit_count_for(1L << 30), InputError);
}

TEST_CASE("bit_blast shapes") {
  std::vector<VarDecl> vars{make_range_var("PC", 1, 3), make_bool_var("b"),
                            make_range_var("n", 0, 7)};
  // PC: 1..3 -> two atoms PC_1 PC_0, most significant first
  auto pc = bit_blast(vars, 0);
  REQUIRE(pc.size() == 2);
  CHECK(atom_display_name(vars[0], pc[0].bit) == "PC_1");
  CHECK(atom_display_name(vars[0], pc[1].bit) == "PC_0");
  // boolean is its own single atom
  auto b = bit_blast(vars, 1);
  REQUIRE(b.size() == 1);
  CHECK(atom_display_name(vars[1], b[0].bit) == "b");
  // n: 0..7 -> three atoms
  CHECK(bit_blast(vars, 2).size() == 3);
}

namespace {
// Independent decoding oracle: read the conjunction of bit literals back
// into an integer. Expects And of Var/Not(Var) (or a single literal).
long decode_conj(const ExprArena& a, ExprId e, int width, int first_var) {
  std::vector<int> bits(width, -1);
  auto lit = [&](ExprId l) {
    const ExprNode& n = a.node(l);
    if (n.op == Op::Var)
      bits[n.var - first_var] = 1;
    else
      bits[a.node(n.kids[0]).var - first_var] = 0;
  };
  const ExprNode& n = a.node(e);
  if (n.op == Op::And)
    for (ExprId k : n.kids) lit(k);
  else
    lit(e);
  long v = 0;
  for (int i = 0; i < width; ++i) v = (v << 1) | bits[i];
  return v;
}
}  // namespace

TEST_CASE("encode_value examples") {
  auto arena = std::make_shared<ExprArena>();
  std::vector<VarDecl> vars{make_range_var("PC", 1, 3), make_bool_var("b"),
                            make_range_var("n", 0, 7)};
  SymbolicKripke k(vars, arena, arena->t(), arena->t(), std::nullopt);

  // (PC: 1..3, 1) -> !PC_1 & PC_0
  ExprId pc1 = encode_value(*arena, k, 0, 1);
  ExprId pc1_expected =
      arena->mk_and(arena->mk_not(arena->var(k.atom_id(Atom{0, 1, false}))),
                    arena->var(k.atom_id(Atom{0, 0, false})));
  CHECK(pc1 == pc1_expected);

  // (b, 1) -> b
  CHECK(encode_value(*arena, k, 1, 1) == arena->var(k.atom_id(Atom{1, 0, false})));

  // (n: 0..7, 6) -> n_2 & n_1 & !n_0, and decode oracle agrees
  ExprId n6 = encode_value(*arena, k, 2, 6);
  CHECK(decode_conj(*arena, n6, 3, k.flat_bit(2, 2)) == 6);
  // 5 -> n_2 & !n_1 & n_0
  CHECK(decode_conj(*arena, encode_value(*arena, k, 2, 5), 3, k.flat_bit(2, 2)) == 5);

  CHECK_THROWS_WITH_AS(encode_value(*arena, k, 0, 0),
                       doctest::Contains("value out of bound"), InputError);
  CHECK_THROWS_AS(encode_value(*arena, k, 2, 9), InputError);
}

TEST_CASE("decode of encode is the identity, exhaustively to 255") {
  auto arena = std::make_shared<ExprArena>();
  for (long hi : {1L, 3L, 5L, 100L, 255L}) {
    std::vector<VarDecl> vars{make_range_var("v", 0, hi)};
    SymbolicKripke k(vars, arena, arena->t(), arena->t(), std::nullopt);
    for (long v = 0; v <= hi; ++v) {
      ExprId e = encode_value(*arena, k, 0, v);
      CHECK(decode_conj(*arena, e, vars[0].bit_count, 0) == v);
    }
  }
}

TEST_CASE("domain constraint excludes exactly the out-of-range values") {
  auto arena = std::make_shared<ExprArena>();
  std::vector<VarDecl> vars{make_range_var("v", 2, 5)};
  SymbolicKripke k(vars, arena, arena->t(), arena->t(), std::nullopt);
  ExprId dom = domain_constraint(*arena, k, 0, false);
  for (long raw = 0; raw < 8; ++raw) {
    std::vector<int8_t> asg(3);
    for (int bit = 0; bit < 3; ++bit) asg[k.flat_bit(0, bit)] = (raw >> bit) & 1;
    CHECK(arena->eval(dom, asg) == (raw >= 2 && raw <= 5));
  }
}

TEST_CASE("enumerate_states on the running example matches the five-state diagram") {
  SymbolicKripke k = parse_model_file(corpus("kexp/k_exp.smv"));
  ExplicitKripke ek = enumerate_states(k);
  CHECK(ek.totality_violations.empty());

  auto reach = ek.reachable_states();
  REQUIRE(reach.size() == 5);

  // vars: low, high, halt, PC
  auto find_state = [&](long low, long high, long halt, long pc) {
    for (int s : reach) {
      const auto& st = ek.states[s];
      if (st[0] == low && st[1] == high && st[2] == halt && st[3] == pc) return s;
    }
    REQUIRE(false);
    return -1;
  };
  int s0 = find_state(0, 0, 0, 1);
  int s1 = find_state(0, 1, 0, 2);
  int s2 = find_state(1, 1, 1, 3);
  int s3 = find_state(0, 0, 0, 2);
  int s4 = find_state(0, 0, 1, 3);

  CHECK(ek.initial == std::vector<int>{s0});
  auto edges_of = [&](int s) { return ek.edges[s]; };
  auto sorted = [](std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  CHECK(sorted(edges_of(s0)) == sorted(std::vector<int>{s1, s3}));
  CHECK(edges_of(s1) == std::vector<int>{s2});
  CHECK(edges_of(s3) == std::vector<int>{s4});
  CHECK(edges_of(s2) == std::vector<int>{s2});  // halting states stutter
  CHECK(edges_of(s4) == std::vector<int>{s4});

  // Length-4 path prefixes are exactly the two listed ones.
  auto paths = enumerate_paths(ek, 4);
  REQUIRE(paths.size() == 2);
  std::vector<std::vector<int>> expect{{s0, s1, s2, s2}, {s0, s3, s4, s4}};
  CHECK((paths[0] == expect[0] || paths[0] == expect[1]));
  CHECK((paths[1] == expect[0] || paths[1] == expect[1]));
  CHECK(paths[0] != paths[1]);
}

TEST_CASE("one-boolean stutter model has two states, one initial") {
  SymbolicKripke k = parse_model(
      {"MODULE main VAR b : boolean; ASSIGN init(b) := FALSE; next(b) := b;", "inline"});
  ExplicitKripke ek = enumerate_states(k);
  CHECK(ek.state_count() == 2);
  CHECK(ek.initial.size() == 1);
  for (int s = 0; s < 2; ++s) CHECK(ek.edges[s] == std::vector<int>{s});
}

TEST_CASE("enumerate_states agrees with direct symbolic evaluation") {
  Rng rng(2024);
  for (int round = 0; round < 25; ++round) {
    SymbolicKripke k = random_model(rng);
    ExplicitKripke ek = enumerate_states(k);
    int n = ek.state_count();
    for (int s = 0; s < n; ++s) {
      auto asg = state_assignment(ek, s);
      bool is_init = std::find(ek.initial.begin(), ek.initial.end(), s) != ek.initial.end();
      CHECK(naive_eval(k.arena(), k.init(), asg) == is_init);
      std::vector<int8_t> pair(2 * k.total_bits());
      std::copy(asg.begin(), asg.end(), pair.begin());
      for (int t = 0; t < n; ++t) {
        auto tasg = state_assignment(ek, t);
        std::copy(tasg.begin(), tasg.end(), pair.begin() + k.total_bits());
        bool edge = std::find(ek.edges[s].begin(), ek.edges[s].end(), t) != ek.edges[s].end();
        CHECK(naive_eval(k.arena(), k.trans(), pair) == edge);
      }
    }
  }
}

TEST_CASE("enumerate_states enforces the state budget") {
  auto arena = std::make_shared<ExprArena>();
  std::vector<VarDecl> vars{make_range_var("v", 0, 255), make_range_var("w", 0, 255)};
  SymbolicKripke k(vars, arena, arena->t(), arena->t(), std::nullopt);
  CHECK_THROWS_AS(enumerate_states(k, 1000), BudgetExceeded);
}

TEST_CASE("duplicate variable names are rejected") {
  auto arena = std::make_shared<ExprArena>();
  std::vector<VarDecl> vars{make_bool_var("x"), make_bool_var("x")};
  CHECK_THROWS_AS(SymbolicKripke(vars, arena, arena->t(), arena->t(), std::nullopt),
                  InputError);
}

TEST_CASE("totality lint flags reachable dead ends") {
  // One state, initial, no outgoing edge.
  auto arena = std::make_shared<ExprArena>();
  std::vector<VarDecl> vars{make_bool_var("b")};
  SymbolicKripke k(vars, arena, arena->mk_not(arena->var(0)), arena->f(), std::nullopt);
  ExplicitKripke ek = enumerate_states(k);
  REQUIRE(ek.totality_violations.size() == 1);
  CHECK(ek.states[ek.totality_violations[0]][0] == 0);
}
