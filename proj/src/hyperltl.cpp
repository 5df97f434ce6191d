#include "hyperbmc/hyperltl.hpp"

#include <algorithm>
#include <cassert>
#include <fstream>
#include <map>
#include <sstream>

namespace hyperbmc {

namespace {

std::shared_ptr<LtlExpr> node(LtlOp op) {
  auto e = std::make_shared<LtlExpr>();
  e->op = op;
  return e;
}

}  // namespace

LtlRef ltl_true() { return node(LtlOp::True); }
LtlRef ltl_false() { return node(LtlOp::False); }

LtlRef ltl_prop(std::string var, std::string tid) {
  auto e = node(LtlOp::Prop);
  e->var = std::move(var);
  e->tid = std::move(tid);
  return e;
}

LtlRef ltl_cmp(bool eq, CmpOperand lhs, CmpOperand rhs) {
  auto e = node(eq ? LtlOp::CmpEq : LtlOp::CmpNe);
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  return e;
}

namespace {
LtlRef unary(LtlOp op, LtlRef a) {
  auto e = node(op);
  e->kids = {std::move(a)};
  return e;
}
LtlRef binary(LtlOp op, LtlRef a, LtlRef b) {
  auto e = node(op);
  e->kids = {std::move(a), std::move(b)};
  return e;
}
}  // namespace

LtlRef ltl_not(LtlRef a) { return unary(LtlOp::Not, std::move(a)); }
LtlRef ltl_and(LtlRef a, LtlRef b) { return binary(LtlOp::And, std::move(a), std::move(b)); }
LtlRef ltl_or(LtlRef a, LtlRef b) { return binary(LtlOp::Or, std::move(a), std::move(b)); }
LtlRef ltl_implies(LtlRef a, LtlRef b) {
  return binary(LtlOp::Implies, std::move(a), std::move(b));
}
LtlRef ltl_iff(LtlRef a, LtlRef b) { return binary(LtlOp::Iff, std::move(a), std::move(b)); }
LtlRef ltl_next(LtlRef a) { return unary(LtlOp::Next, std::move(a)); }
LtlRef ltl_until(LtlRef a, LtlRef b) { return binary(LtlOp::Until, std::move(a), std::move(b)); }
LtlRef ltl_release(LtlRef a, LtlRef b) {
  return binary(LtlOp::Release, std::move(a), std::move(b));
}
LtlRef ltl_globally(LtlRef a) { return unary(LtlOp::Globally, std::move(a)); }
LtlRef ltl_finally(LtlRef a) { return unary(LtlOp::Finally, std::move(a)); }

namespace {
bool operand_equal(const CmpOperand& a, const CmpOperand& b) {
  if (a.is_literal != b.is_literal) return false;
  if (a.is_literal) return a.value == b.value;
  return a.var == b.var && a.tid == b.tid;
}
}  // namespace

bool ltl_equal(const LtlRef& a, const LtlRef& b) {
  if (a.get() == b.get()) return true;
  if (a->op != b->op) return false;
  if (a->op == LtlOp::Prop) return a->var == b->var && a->tid == b->tid;
  if (a->op == LtlOp::CmpEq || a->op == LtlOp::CmpNe)
    return operand_equal(a->lhs, b->lhs) && operand_equal(a->rhs, b->rhs);
  if (a->kids.size() != b->kids.size()) return false;
  for (size_t i = 0; i < a->kids.size(); ++i)
    if (!ltl_equal(a->kids[i], b->kids[i])) return false;
  return true;
}

namespace {
std::string operand_str(const CmpOperand& o) {
  if (o.is_literal) return std::to_string(o.value);
  return o.var + "[" + o.tid + "]";
}
}  // namespace

std::string ltl_to_string(const LtlRef& e) {
  switch (e->op) {
    case LtlOp::True: return "TRUE";
    case LtlOp::False: return "FALSE";
    case LtlOp::Prop: return e->var + "[" + e->tid + "]";
    case LtlOp::CmpEq: return "(*" + operand_str(e->lhs) + " = " + operand_str(e->rhs) + "*)";
    case LtlOp::CmpNe: return "(*" + operand_str(e->lhs) + " != " + operand_str(e->rhs) + "*)";
    case LtlOp::Not: return "!" + ltl_to_string(e->kids[0]);
    case LtlOp::Next: return "X " + ltl_to_string(e->kids[0]);
    case LtlOp::Globally: return "G " + ltl_to_string(e->kids[0]);
    case LtlOp::Finally: return "F " + ltl_to_string(e->kids[0]);
    case LtlOp::And:
      return "(" + ltl_to_string(e->kids[0]) + " /\\ " + ltl_to_string(e->kids[1]) + ")";
    case LtlOp::Or:
      return "(" + ltl_to_string(e->kids[0]) + " \\/ " + ltl_to_string(e->kids[1]) + ")";
    case LtlOp::Implies:
      return "(" + ltl_to_string(e->kids[0]) + " -> " + ltl_to_string(e->kids[1]) + ")";
    case LtlOp::Iff:
      return "(" + ltl_to_string(e->kids[0]) + " <-> " + ltl_to_string(e->kids[1]) + ")";
    case LtlOp::Until:
      return "(" + ltl_to_string(e->kids[0]) + " U " + ltl_to_string(e->kids[1]) + ")";
    case LtlOp::Release:
      return "(" + ltl_to_string(e->kids[0]) + " R " + ltl_to_string(e->kids[1]) + ")";
  }
  return "?";
}

size_t ltl_size(const LtlRef& e) {
  size_t n = 1;
  for (const auto& k : e->kids) n += ltl_size(k);
  return n;
}

bool ltl_is_temporal(const LtlRef& e) {
  switch (e->op) {
    case LtlOp::Next:
    case LtlOp::Until:
    case LtlOp::Release:
    case LtlOp::Globally:
    case LtlOp::Finally:
      return true;
    default:
      for (const auto& k : e->kids)
        if (ltl_is_temporal(k)) return true;
      return false;
  }
}

namespace {
void collect_tids(const LtlRef& e, std::vector<std::string>& out, std::set<std::string>& seen) {
  auto add = [&](const std::string& t) {
    if (!t.empty() && seen.insert(t).second) out.push_back(t);
  };
  if (e->op == LtlOp::Prop) add(e->tid);
  if (e->op == LtlOp::CmpEq || e->op == LtlOp::CmpNe) {
    if (!e->lhs.is_literal) add(e->lhs.tid);
    if (!e->rhs.is_literal) add(e->rhs.tid);
  }
  for (const auto& k : e->kids) collect_tids(k, out, seen);
}
}  // namespace

std::vector<std::string> ltl_tids(const LtlRef& e) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  collect_tids(e, out, seen);
  return out;
}

// ------------------------------------------------------------------ NNF ---

namespace {

// Push negations to literals. For a state-level Iff the negation moves into
// the right operand, which keeps the operator primitive and makes the
// transformation an involution; temporal Iff/Implies are expanded.
LtlRef nnf(const LtlRef& e, bool neg) {
  switch (e->op) {
    case LtlOp::True: return neg ? ltl_false() : e;
    case LtlOp::False: return neg ? ltl_true() : e;
    case LtlOp::Prop: return neg ? ltl_not(e) : e;
    case LtlOp::CmpEq: return neg ? ltl_cmp(false, e->lhs, e->rhs) : e;
    case LtlOp::CmpNe: return neg ? ltl_cmp(true, e->lhs, e->rhs) : e;
    case LtlOp::Not: return nnf(e->kids[0], !neg);
    case LtlOp::And: {
      LtlRef a = nnf(e->kids[0], neg), b = nnf(e->kids[1], neg);
      return neg ? ltl_or(a, b) : ltl_and(a, b);
    }
    case LtlOp::Or: {
      LtlRef a = nnf(e->kids[0], neg), b = nnf(e->kids[1], neg);
      return neg ? ltl_and(a, b) : ltl_or(a, b);
    }
    case LtlOp::Implies: {
      if (neg) return ltl_and(nnf(e->kids[0], false), nnf(e->kids[1], true));
      return ltl_or(nnf(e->kids[0], true), nnf(e->kids[1], false));
    }
    case LtlOp::Iff: {
      if (!ltl_is_temporal(e->kids[0]) && !ltl_is_temporal(e->kids[1]))
        return ltl_iff(nnf(e->kids[0], false), nnf(e->kids[1], neg));
      LtlRef a = nnf(e->kids[0], false), na = nnf(e->kids[0], true);
      LtlRef b = nnf(e->kids[1], false), nb = nnf(e->kids[1], true);
      if (neg) return ltl_and(ltl_or(na, nb), ltl_or(a, b));
      return ltl_or(ltl_and(a, b), ltl_and(na, nb));
    }
    case LtlOp::Next: return ltl_next(nnf(e->kids[0], neg));
    case LtlOp::Until: {
      LtlRef a = nnf(e->kids[0], neg), b = nnf(e->kids[1], neg);
      return neg ? ltl_release(a, b) : ltl_until(a, b);
    }
    case LtlOp::Release: {
      LtlRef a = nnf(e->kids[0], neg), b = nnf(e->kids[1], neg);
      return neg ? ltl_until(a, b) : ltl_release(a, b);
    }
    case LtlOp::Globally:  // G x == false R x
      if (neg) return ltl_until(ltl_true(), nnf(e->kids[0], true));
      return ltl_release(ltl_false(), nnf(e->kids[0], false));
    case LtlOp::Finally:  // F x == true U x
      if (neg) return ltl_release(ltl_false(), nnf(e->kids[0], true));
      return ltl_until(ltl_true(), nnf(e->kids[0], false));
  }
  throw InternalError("nnf: unreachable");
}

}  // namespace

HyperFormula to_nnf(const HyperFormula& f) { return HyperFormula{f.prefix, nnf(f.body, false)}; }

HyperFormula negate(const HyperFormula& f) {
  HyperFormula g;
  g.prefix = f.prefix;
  for (auto& q : g.prefix)
    q.kind = q.kind == QuantKind::Forall ? QuantKind::Exists : QuantKind::Forall;
  g.body = nnf(f.body, true);
  return g;
}

bool ltl_is_nnf(const LtlRef& e) {
  switch (e->op) {
    case LtlOp::True:
    case LtlOp::False:
    case LtlOp::Prop:
    case LtlOp::CmpEq:
    case LtlOp::CmpNe:
      return true;
    case LtlOp::Not:
      return e->kids[0]->op == LtlOp::Prop;
    case LtlOp::Implies:
    case LtlOp::Globally:
    case LtlOp::Finally:
      return false;
    case LtlOp::Iff:
      return !ltl_is_temporal(e->kids[0]) && !ltl_is_temporal(e->kids[1]) &&
             ltl_is_nnf(e->kids[0]) && ltl_is_nnf(e->kids[1]);
    default:
      return std::all_of(e->kids.begin(), e->kids.end(),
                         [](const LtlRef& k) { return ltl_is_nnf(k); });
  }
}

// --------------------------------------------------------------- parser ---

namespace {

struct HqToken {
  enum class Kind {
    End, Ident, Int,
    Forall, Exists, Dot,
    LParen, RParen, LBracket, RBracket, Star,
    Bang, AndOp, OrOp, Arrow, DArrow, Eq, Ne,
    G, F, X, U, R, True, False,
  } kind;
  std::string text;
  long value = 0;
  SourceLoc loc;
};

class HqLexer {
 public:
  HqLexer(const std::string& text, std::string origin)
      : text_(text), origin_(std::move(origin)) {}

  std::vector<HqToken> run() {
    std::vector<HqToken> out;
    while (true) {
      skip();
      SourceLoc loc{origin_, line_, col_};
      if (pos_ >= text_.size()) {
        out.push_back({HqToken::Kind::End, "", 0, loc});
        return out;
      }
      char c = text_[pos_];
      if (isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string w;
        while (pos_ < text_.size() &&
               (isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
          w += text_[pos_];
          adv();
        }
        static const std::map<std::string, HqToken::Kind> kw = {
            {"forall", HqToken::Kind::Forall}, {"exists", HqToken::Kind::Exists},
            {"G", HqToken::Kind::G},           {"F", HqToken::Kind::F},
            {"X", HqToken::Kind::X},           {"U", HqToken::Kind::U},
            {"R", HqToken::Kind::R},           {"TRUE", HqToken::Kind::True},
            {"FALSE", HqToken::Kind::False},
        };
        auto it = kw.find(w);
        out.push_back({it == kw.end() ? HqToken::Kind::Ident : it->second, w, 0, loc});
        continue;
      }
      if (isdigit(static_cast<unsigned char>(c))) {
        std::string num;
        while (pos_ < text_.size() && isdigit(static_cast<unsigned char>(text_[pos_]))) {
          num += text_[pos_];
          adv();
        }
        out.push_back({HqToken::Kind::Int, num, std::stol(num), loc});
        continue;
      }
      auto two = [&](const char* s) {
        return c == s[0] && pos_ + 1 < text_.size() && text_[pos_ + 1] == s[1];
      };
      if (two("/\\")) { adv(); adv(); out.push_back({HqToken::Kind::AndOp, "/\\", 0, loc}); continue; }
      if (two("\\/")) { adv(); adv(); out.push_back({HqToken::Kind::OrOp, "\\/", 0, loc}); continue; }
      if (two("->")) { adv(); adv(); out.push_back({HqToken::Kind::Arrow, "->", 0, loc}); continue; }
      if (two("<-")) {
        if (pos_ + 2 < text_.size() && text_[pos_ + 2] == '>') {
          adv(); adv(); adv();
          out.push_back({HqToken::Kind::DArrow, "<->", 0, loc});
          continue;
        }
        throw InputError(loc, "stray '<-'");
      }
      if (two("!=")) { adv(); adv(); out.push_back({HqToken::Kind::Ne, "!=", 0, loc}); continue; }
      adv();
      switch (c) {
        case '.': out.push_back({HqToken::Kind::Dot, ".", 0, loc}); break;
        case '(': out.push_back({HqToken::Kind::LParen, "(", 0, loc}); break;
        case ')': out.push_back({HqToken::Kind::RParen, ")", 0, loc}); break;
        case '[': out.push_back({HqToken::Kind::LBracket, "[", 0, loc}); break;
        case ']': out.push_back({HqToken::Kind::RBracket, "]", 0, loc}); break;
        case '*': out.push_back({HqToken::Kind::Star, "*", 0, loc}); break;
        case '!': out.push_back({HqToken::Kind::Bang, "!", 0, loc}); break;
        case '=': out.push_back({HqToken::Kind::Eq, "=", 0, loc}); break;
        default:
          throw InputError(loc, std::string("unexpected character '") + c + "'");
      }
    }
  }

 private:
  void adv() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        adv();
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') adv();
      } else {
        return;
      }
    }
  }

  const std::string& text_;
  std::string origin_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

// Precedence, tightest first: unary (! G F X), U/R (right-assoc), /\, \/,
// then -> and <-> (right-assoc, one tier).
class HqParser {
 public:
  explicit HqParser(std::vector<HqToken> toks) : toks_(std::move(toks)) {}

  HyperFormula parse() {
    HyperFormula f;
    while (cur().kind == HqToken::Kind::Forall || cur().kind == HqToken::Kind::Exists) {
      Quantifier q;
      q.kind = cur().kind == HqToken::Kind::Forall ? QuantKind::Forall : QuantKind::Exists;
      q.loc = bump().loc;
      q.tid = expect(HqToken::Kind::Ident, "trace variable").text;
      expect(HqToken::Kind::Dot, "'.'");
      for (const auto& p : f.prefix)
        if (p.tid == q.tid) throw InputError(q.loc, "duplicate trace variable '" + q.tid + "'");
      f.prefix.push_back(std::move(q));
    }
    if (f.prefix.empty()) throw InputError(cur().loc, "formula has no quantifier prefix");
    f.body = parse_impl_iff();
    expect(HqToken::Kind::End, "end of formula");
    for (const auto& t : ltl_tids(f.body)) {
      bool bound = false;
      for (const auto& q : f.prefix) bound |= q.tid == t;
      if (!bound) throw InputError("trace variable '" + t + "' is not quantified");
    }
    return f;
  }

 private:
  const HqToken& cur() const { return toks_[i_]; }
  const HqToken& bump() { return toks_[i_++]; }
  const HqToken& expect(HqToken::Kind k, const char* what) {
    if (cur().kind != k)
      throw InputError(cur().loc, std::string("expected ") + what + ", got '" +
                                      (cur().text.empty() ? "<eof>" : cur().text) + "'");
    return bump();
  }

  LtlRef parse_impl_iff() {
    LtlRef lhs = parse_or();
    if (cur().kind == HqToken::Kind::Arrow) {
      bump();
      return ltl_implies(lhs, parse_impl_iff());
    }
    if (cur().kind == HqToken::Kind::DArrow) {
      bump();
      return ltl_iff(lhs, parse_impl_iff());
    }
    return lhs;
  }

  LtlRef parse_or() {
    LtlRef lhs = parse_and();
    while (cur().kind == HqToken::Kind::OrOp) {
      bump();
      lhs = ltl_or(lhs, parse_and());
    }
    return lhs;
  }

  LtlRef parse_and() {
    LtlRef lhs = parse_until();
    while (cur().kind == HqToken::Kind::AndOp) {
      bump();
      lhs = ltl_and(lhs, parse_until());
    }
    return lhs;
  }

  LtlRef parse_until() {
    LtlRef lhs = parse_unary();
    if (cur().kind == HqToken::Kind::U) {
      bump();
      return ltl_until(lhs, parse_until());
    }
    if (cur().kind == HqToken::Kind::R) {
      bump();
      return ltl_release(lhs, parse_until());
    }
    return lhs;
  }

  LtlRef parse_unary() {
    switch (cur().kind) {
      case HqToken::Kind::Bang: bump(); return ltl_not(parse_unary());
      case HqToken::Kind::G: bump(); return ltl_globally(parse_unary());
      case HqToken::Kind::F: bump(); return ltl_finally(parse_unary());
      case HqToken::Kind::X: bump(); return ltl_next(parse_unary());
      default: return parse_atom();
    }
  }

  CmpOperand parse_cmp_operand() {
    CmpOperand o;
    if (cur().kind == HqToken::Kind::Int) {
      o.is_literal = true;
      o.value = bump().value;
      return o;
    }
    o.var = expect(HqToken::Kind::Ident, "variable or integer").text;
    expect(HqToken::Kind::LBracket, "'['");
    o.tid = expect(HqToken::Kind::Ident, "trace variable").text;
    expect(HqToken::Kind::RBracket, "']'");
    return o;
  }

  LtlRef parse_atom() {
    SourceLoc loc = cur().loc;
    switch (cur().kind) {
      case HqToken::Kind::Forall:
      case HqToken::Kind::Exists:
        throw InputError(loc, "quantifiers must form a prenex prefix at the very front");
      case HqToken::Kind::True: bump(); return ltl_true();
      case HqToken::Kind::False: bump(); return ltl_false();
      case HqToken::Kind::LParen: {
        bump();
        LtlRef e = parse_impl_iff();
        expect(HqToken::Kind::RParen, "')'");
        return e;
      }
      case HqToken::Kind::Star: {
        // *lhs <arith_comp> rhs*
        bump();
        CmpOperand lhs = parse_cmp_operand();
        bool eq;
        if (cur().kind == HqToken::Kind::Eq) {
          eq = true;
        } else if (cur().kind == HqToken::Kind::Ne) {
          eq = false;
        } else {
          throw InputError(cur().loc, "expected '=' or '!=' inside *...* comparison");
        }
        bump();
        CmpOperand rhs = parse_cmp_operand();
        expect(HqToken::Kind::Star, "closing '*'");
        if (lhs.is_literal && rhs.is_literal)
          throw InputError(loc, "comparison needs at least one variable operand");
        auto e = ltl_cmp(eq, std::move(lhs), std::move(rhs));
        const_cast<LtlExpr*>(e.get())->loc = loc;
        return e;
      }
      case HqToken::Kind::Ident: {
        std::string var = bump().text;
        expect(HqToken::Kind::LBracket, "'['");
        std::string tid = expect(HqToken::Kind::Ident, "trace variable").text;
        expect(HqToken::Kind::RBracket, "']'");
        auto e = ltl_prop(var, tid);
        const_cast<LtlExpr*>(e.get())->loc = loc;
        return e;
      }
      default:
        throw InputError(loc, "expected a formula, got '" +
                                  (cur().text.empty() ? "<eof>" : cur().text) + "'");
    }
  }

  std::vector<HqToken> toks_;
  size_t i_ = 0;
};

}  // namespace

HyperFormula parse_formula(const std::string& text, const std::string& origin) {
  HqLexer lex(text, origin);
  HqParser p(lex.run());
  return p.parse();
}

HyperFormula parse_formula_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open formula file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_formula(ss.str(), path);
}

// ------------------------------------------------------------ typecheck ---

namespace {

const SymbolicKripke& model_for(const HyperFormula& f,
                                const std::vector<const SymbolicKripke*>& models,
                                const std::string& tid, const SourceLoc& loc) {
  for (size_t i = 0; i < f.prefix.size(); ++i)
    if (f.prefix[i].tid == tid) return *models[i];
  throw InputError(loc, "trace variable '" + tid + "' is not quantified");
}

void check_operand(const HyperFormula& f, const std::vector<const SymbolicKripke*>& models,
                   const CmpOperand& o, const CmpOperand& other, const SourceLoc& loc) {
  if (o.is_literal) {
    // Literal range is judged against the variable on the other side.
    if (other.is_literal) return;
    const SymbolicKripke& k = model_for(f, models, other.tid, loc);
    auto vi = k.var_index(other.var);
    if (!vi) return;  // reported for the variable operand itself
    const VarDecl& d = k.var(*vi);
    if (d.kind == VarKind::Range && (o.value < d.lo || o.value > d.hi))
      throw InputError(loc, "value out of bound: " + std::to_string(o.value) + " not in " +
                                std::to_string(d.lo) + ".." + std::to_string(d.hi) + " for '" +
                                other.var + "'");
    return;
  }
  const SymbolicKripke& k = model_for(f, models, o.tid, loc);
  auto vi = k.var_index(o.var);
  if (!vi)
    throw InputError(loc, "variable '" + o.var + "' is not defined in the model bound to '" +
                              o.tid + "'");
  if (k.var(*vi).kind != VarKind::Range)
    throw InputError(loc, "boolean variable '" + o.var +
                              "' used in an arithmetic comparison");
}

void check_body(const HyperFormula& f, const std::vector<const SymbolicKripke*>& models,
                const LtlRef& e) {
  switch (e->op) {
    case LtlOp::Prop: {
      const SymbolicKripke& k = model_for(f, models, e->tid, e->loc);
      auto vi = k.var_index(e->var);
      if (!vi)
        throw InputError(e->loc, "variable '" + e->var +
                                     "' is not defined in the model bound to '" + e->tid + "'");
      if (k.var(*vi).kind != VarKind::Boolean)
        throw InputError(e->loc, "integer variable '" + e->var +
                                     "' used with a boolean operator");
      return;
    }
    case LtlOp::CmpEq:
    case LtlOp::CmpNe:
      check_operand(f, models, e->lhs, e->rhs, e->loc);
      check_operand(f, models, e->rhs, e->lhs, e->loc);
      return;
    default:
      for (const auto& k : e->kids) check_body(f, models, k);
  }
}

}  // namespace

void typecheck(const HyperFormula& f, const std::vector<const SymbolicKripke*>& models) {
  if (models.size() != f.prefix.size())
    throw InputError("formula has " + std::to_string(f.prefix.size()) +
                     " quantifiers but " + std::to_string(models.size()) +
                     " models were supplied");
  check_body(f, models, f.body);
}

}  // namespace hyperbmc
