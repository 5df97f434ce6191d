#include "doctest.h"

#include <fstream>
#include <set>
#include <sstream>

#include "hyperbmc/diag.hpp"
#include "hyperbmc/smv.hpp"
#include "testutil.hpp"

using namespace hyperbmc;
using namespace testutil;

namespace {
std::string corpus(const std::string& rel) {
  return std::string(HYPERBMC_CORPUS_DIR) + "/" + rel;
}

// All assignments of the model's unprimed+primed bits satisfying trans,
// found by brute truth-table sweep with the independent naive evaluator.
std::vector<std::vector<int8_t>> trans_models(const SymbolicKripke& k) {
  int n = 2 * k.total_bits();
  std::vector<std::vector<int8_t>> out;
  for (long m = 0; m < (1L << n); ++m) {
    std::vector<int8_t> asg(n);
    for (int i = 0; i < n; ++i) asg[i] = (m >> i) & 1;
    if (naive_eval(k.arena(), k.trans(), asg)) out.push_back(asg);
  }
  return out;
}
}  // namespace

TEST_CASE("k_exp parses and halt is picked up by name") {
  SymbolicKripke k = parse_model_file(corpus("kexp/k_exp.smv"));
  REQUIRE(k.vars().size() == 4);
  CHECK(k.var(0).name == "low");
  CHECK(k.var(3).name == "PC");
  CHECK(k.var(3).bit_count == 2);
  REQUIRE(k.halt_var());
  CHECK(k.var(*k.halt_var()).name == "halt");
  CHECK(k.total_bits() == 5);
}

TEST_CASE("trivial stutter model") {
  SymbolicKripke k = parse_model(
      {"MODULE main\nVAR b : boolean;\nASSIGN init(b) := FALSE; next(b) := b;", "t.smv"});
  ExplicitKripke ek = enumerate_states(k);
  CHECK(ek.state_count() == 2);
  CHECK(ek.initial.size() == 1);
}

TEST_CASE("case with set literal lowers to exactly the expected transitions") {
  SymbolicKripke k = parse_model({R"(
MODULE main
VAR
  c : boolean;
  n : 1..3;
ASSIGN
  next(n) := case
    c : 1;
    TRUE : {2, 3};
  esac;
)",
                                  "case.smv"});
  // Truth-table oracle: enumerate all (c, n, c', n') combinations and check
  // trans against the case semantics by hand.
  for (long c = 0; c <= 1; ++c)
    for (long n = 1; n <= 3; ++n)
      for (long cp = 0; cp <= 1; ++cp)
        for (long np = 0; np <= 3; ++np) {
          std::vector<int8_t> asg(2 * k.total_bits(), 0);
          auto set = [&](int var, long value, bool primed) {
            const VarDecl& d = k.var(var);
            for (int bit = 0; bit < d.bit_count; ++bit)
              asg[k.flat_bit(var, bit) + (primed ? k.total_bits() : 0)] =
                  static_cast<int8_t>((value >> bit) & 1);
          };
          set(0, c, false);
          set(1, n, false);
          set(0, cp, true);
          set(1, np, true);
          bool expected = c ? np == 1 : (np == 2 || np == 3);
          // c' is unconstrained (no next(c) assignment).
          CHECK(naive_eval(k.arena(), k.trans(), asg) == expected);
        }
}

TEST_CASE("set literals commute") {
  auto mk = [&](const char* set) {
    return parse_model({std::string("MODULE main\nVAR b : boolean;\nASSIGN next(b) := ") +
                            set + ";\n",
                        "s.smv"});
  };
  SymbolicKripke k1 = mk("{TRUE, FALSE}");
  SymbolicKripke k2 = mk("{FALSE, TRUE}");
  for (long m = 0; m < 4; ++m) {
    std::vector<int8_t> asg{static_cast<int8_t>(m & 1), static_cast<int8_t>((m >> 1) & 1)};
    CHECK(naive_eval(k1.arena(), k1.trans(), asg) ==
          naive_eval(k2.arena(), k2.trans(), asg));
  }
}

namespace {
const char* nested_case_model = R"(
MODULE main
VAR
  g1 : boolean;
  g2 : boolean;
  n : 0..3;
ASSIGN
  next(n) := case
    g1 : case
      g2 : {1, 2};
      TRUE : 3;
    esac;
    TRUE : n + 1 - 1;
  esac;
INIT (n <= 2);
TRANS (next(g1) <-> g2);
)";
}  // namespace

TEST_CASE("pretty-print round trip preserves the lowered structure") {
  for (const char* rel : {"kexp/k_exp.smv", "gni_mirror/mirror.smv", "deniability/purse.smv",
                          "coterm/coterm1.smv", "coterm/coterm2.smv", "tini/prog.smv",
                          "odintra/buffer.smv", "grid/grid.smv", "<nested>"}) {
    CAPTURE(rel);
    std::string text;
    if (std::string(rel) == "<nested>") {
      text = nested_case_model;
    } else {
      std::ifstream in(corpus(rel));
      REQUIRE(in.good());
      std::ostringstream ss;
      ss << in.rdbuf();
      text = ss.str();
    }
    SmvModel ast1 = parse_smv({text, rel});
    std::string printed = print_smv(ast1);
    SmvModel ast2 = parse_smv({printed, "printed"});
    SymbolicKripke k1 = lower_smv(ast1), k2 = lower_smv(ast2);
    CHECK(ExprArena::equal(k1.arena(), k1.init(), k2.arena(), k2.init()));
    CHECK(ExprArena::equal(k1.arena(), k1.trans(), k2.arena(), k2.trans()));
    REQUIRE(k1.vars().size() == k2.vars().size());
    for (size_t i = 0; i < k1.vars().size(); ++i) {
      CHECK(k1.var(static_cast<int>(i)).name == k2.var(static_cast<int>(i)).name);
      CHECK(k1.var(static_cast<int>(i)).bit_count == k2.var(static_cast<int>(i)).bit_count);
    }
    CHECK(k1.halt_var() == k2.halt_var());
  }
}

TEST_CASE("diagnostics carry origin, line and column") {
  try {
    parse_model({"MODULE main\nVAR b : boolean;\nASSIGN init(b) := ??;\n", "bad.smv"});
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(e.where().origin == "bad.smv");
    CHECK(e.where().line == 3);
    CHECK(e.where().column > 0);
    CHECK(std::string(e.what()).find("bad.smv:3") != std::string::npos);
  }
}

TEST_CASE("frontend error classes") {
  auto bad = [](const char* text) { return [text] { parse_model({text, "e.smv"}); }; };
  // undeclared variable
  CHECK_THROWS_WITH_AS(bad("MODULE main\nVAR b : boolean;\nASSIGN init(c) := TRUE;\n")(),
                       doctest::Contains("undeclared"), InputError);
  // type mismatch: integer where boolean expected
  CHECK_THROWS_WITH_AS(
      bad("MODULE main\nVAR b : boolean; n : 0..3;\nASSIGN init(b) := n;\n")(),
      doctest::Contains("integer"), InputError);
  // boolean where integer expected
  CHECK_THROWS_WITH_AS(
      bad("MODULE main\nVAR b : boolean; n : 0..3;\nASSIGN init(n) := b & b;\n")(),
      doctest::Contains("boolean"), InputError);
  // constant out of declared range
  CHECK_THROWS_WITH_AS(bad("MODULE main\nVAR n : 1..3;\nASSIGN init(n) := 7;\n")(),
                       doctest::Contains("value out of bound"), InputError);
  // next() outside TRANS
  CHECK_THROWS_WITH_AS(
      bad("MODULE main\nVAR b : boolean;\nASSIGN init(b) := next(b);\n")(),
      doctest::Contains("next"), InputError);
  // duplicate assignment
  CHECK_THROWS_WITH_AS(
      bad("MODULE main\nVAR b : boolean;\nASSIGN init(b) := TRUE; init(b) := FALSE;\n")(),
      doctest::Contains("duplicate"), InputError);
  // lo > hi
  CHECK_THROWS_AS(bad("MODULE main\nVAR n : 5..2;\nASSIGN init(n) := 5;\n")(), InputError);
}

TEST_CASE("halt pragma designates the halting proposition") {
  SymbolicKripke k = parse_model({R"(
-- @halt: done
MODULE main
VAR
  done : boolean;
ASSIGN
  init(done) := FALSE;
  next(done) := TRUE;
)",
                                  "p.smv"});
  REQUIRE(k.halt_var());
  CHECK(k.var(*k.halt_var()).name == "done");
  CHECK_THROWS_WITH_AS(
      parse_model(
          {"-- @halt: missing\nMODULE main\nVAR b : boolean;\nASSIGN init(b) := TRUE;\n",
           "p2.smv"}),
      doctest::Contains("@halt"), InputError);
}

TEST_CASE("arithmetic lowering: subtraction is wraparound-free") {
  SymbolicKripke k = parse_model({R"(
MODULE main
VAR
  x : 0..3;
ASSIGN
  next(x) := x - 1;
)",
                                  "sub.smv"});
  // From x = 0 the subtraction underflows, so that state has no successor.
  ExplicitKripke ek = enumerate_states(k);
  for (int s = 0; s < ek.state_count(); ++s) {
    long x = ek.states[s][0];
    if (x == 0) {
      CHECK(ek.edges[s].empty());
    } else {
      REQUIRE(ek.edges[s].size() == 1);
      CHECK(ek.states[ek.edges[s][0]][0] == x - 1);
    }
  }
}

TEST_CASE("statically impossible arithmetic is a compile error") {
  CHECK_THROWS_WITH_AS(
      parse_model({"MODULE main\nVAR x : 0..3;\nASSIGN next(x) := 1 - 2;\n", "u.smv"}),
      doctest::Contains("underflow"), InputError);
}

TEST_CASE("comparisons lower to circuits matching integer semantics") {
  SymbolicKripke k = parse_model({R"(
MODULE main
VAR
  x : 0..5;
  ok : boolean;
ASSIGN
  init(ok) := x > 2 & x <= 4;
)",
                                  "cmp.smv"});
  ExplicitKripke ek = enumerate_states(k);
  for (int s : ek.initial) {
    long x = ek.states[s][0];
    long ok = ek.states[s][1];
    CHECK(ok == ((x > 2 && x <= 4) ? 1 : 0));
  }
  int count = 0;
  for (int s = 0; s < ek.state_count(); ++s) {
    long x = ek.states[s][0], ok = ek.states[s][1];
    if (ok == ((x > 2 && x <= 4) ? 1 : 0)) ++count;
  }
  CHECK(static_cast<size_t>(count) == ek.initial.size());
}

TEST_CASE("nested case with sets lowers to the hand-computed relation") {
  SymbolicKripke k = parse_model({R"(
MODULE main
VAR
  g1 : boolean;
  g2 : boolean;
  n : 0..3;
ASSIGN
  next(n) := case
    g1 : case
      g2 : {1, 2};
      TRUE : 3;
    esac;
    TRUE : n;
  esac;
)",
                                  "nested.smv"});
  for (long g1 = 0; g1 <= 1; ++g1)
    for (long g2 = 0; g2 <= 1; ++g2)
      for (long n = 0; n <= 3; ++n)
        for (long np = 0; np <= 3; ++np) {
          std::vector<int8_t> asg(2 * k.total_bits(), 0);
          auto set = [&](int var, long value, bool primed) {
            const VarDecl& d = k.var(var);
            for (int bit = 0; bit < d.bit_count; ++bit)
              asg[k.flat_bit(var, bit) + (primed ? k.total_bits() : 0)] =
                  static_cast<int8_t>((value >> bit) & 1);
          };
          set(0, g1, false);
          set(1, g2, false);
          set(2, n, false);
          set(2, np, true);
          bool expected = g1 ? (g2 ? (np == 1 || np == 2) : np == 3) : np == n;
          CAPTURE(g1);
          CAPTURE(g2);
          CAPTURE(n);
          CAPTURE(np);
          // g1', g2' are unconstrained and left 0 in this sweep.
          CHECK(naive_eval(k.arena(), k.trans(), asg) == expected);
        }
}

TEST_CASE("arithmetic chains: x + 1 - 2 is defined exactly when x >= 1") {
  SymbolicKripke k = parse_model({R"(
MODULE main
VAR
  x : 0..3;
  y : 0..3;
ASSIGN
  next(y) := x + 1 - 2;
)",
                                  "chain.smv"});
  ExplicitKripke ek = enumerate_states(k);
  for (int s = 0; s < ek.state_count(); ++s) {
    long x = ek.states[s][0];
    std::set<long> next_y;
    for (int t : ek.edges[s]) next_y.insert(ek.states[t][1]);
    if (x == 0) {
      CHECK(ek.edges[s].empty());  // underflow: no successor
    } else {
      CHECK(next_y == std::set<long>{x - 1});
    }
  }
}

TEST_CASE("mutated model sources raise InputError or parse, never crash") {
  Rng rng(0xfadedbee);
  std::vector<std::string> sources;
  for (const char* rel : {"kexp/k_exp.smv", "coterm/coterm2.smv", "grid/grid.smv"}) {
    std::ifstream in(corpus(rel));
    std::ostringstream ss;
    ss << in.rdbuf();
    sources.push_back(ss.str());
  }
  int parsed = 0, rejected = 0;
  for (int round = 0; round < 400; ++round) {
    std::string text = sources[pick(rng, 0, static_cast<int>(sources.size()) - 1)];
    int edits = pick(rng, 1, 4);
    for (int e = 0; e < edits && !text.empty(); ++e) {
      size_t pos = static_cast<size_t>(pick(rng, 0, static_cast<int>(text.size()) - 1));
      switch (pick(rng, 0, 2)) {
        case 0: text[pos] = static_cast<char>(pick(rng, 32, 126)); break;
        case 1: text.erase(pos, 1); break;
        default: text.insert(pos, 1, static_cast<char>(pick(rng, 32, 126))); break;
      }
    }
    try {
      parse_model({text, "fuzz.smv"});
      ++parsed;
    } catch (const InputError&) {
      ++rejected;
    }
  }
  CHECK(parsed + rejected == 400);
  CHECK(rejected > 0);
}

TEST_CASE("primed domain constraint is part of trans") {
  SymbolicKripke k = parse_model({R"(
MODULE main
VAR
  n : 1..2;
ASSIGN
  next(n) := n;
)",
                                  "dom.smv"});
  for (const auto& asg : trans_models(k)) {
    long np = 0;
    for (int bit = k.var(0).bit_count - 1; bit >= 0; --bit)
      np = (np << 1) | asg[k.total_bits() + k.flat_bit(0, bit)];
    CHECK(np >= 1);
    CHECK(np <= 2);
  }
}
