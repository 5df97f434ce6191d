#include "hyperbmc/smv.hpp"

#include <cassert>
#include <fstream>
#include <map>
#include <sstream>

namespace hyperbmc {

namespace {

// ---------------------------------------------------------------- lexer ---

enum class Tok {
  End, Ident, Int,
  KwModule, KwMain, KwVar, KwAssign, KwInit, KwTrans, KwInitLower, KwNextLower,
  KwCase, KwEsac, KwBoolean, KwTrue, KwFalse,
  Colon, Semi, Comma, DotDot, Assign, LBrace, RBrace, LParen, RParen,
  Bang, Amp, Pipe, Arrow, DArrow, Eq, Ne, Lt, Le, Gt, Ge, Plus, Minus,
};

struct Token {
  Tok kind;
  std::string text;
  long value = 0;
  SourceLoc loc;
};

class Lexer {
 public:
  Lexer(const std::string& text, std::string origin)
      : text_(text), origin_(std::move(origin)) {}

  std::vector<Token> run(std::optional<std::string>* halt_pragma) {
    std::vector<Token> out;
    while (true) {
      skip_space_and_comments(halt_pragma);
      if (pos_ >= text_.size()) {
        out.push_back(make(Tok::End, ""));
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  SourceLoc here() const { return SourceLoc{origin_, line_, col_}; }
  Token make(Tok k, std::string t) const { return Token{k, std::move(t), 0, here()}; }

  char peek(size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space_and_comments(std::optional<std::string>* halt_pragma) {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '-' && peek(1) == '-') {
        std::string comment;
        while (pos_ < text_.size() && text_[pos_] != '\n') {
          comment += text_[pos_];
          advance();
        }
        scan_pragma(comment, halt_pragma);
      } else {
        return;
      }
    }
  }

  void scan_pragma(const std::string& comment, std::optional<std::string>* halt_pragma) {
    // -- @halt: <name>
    size_t at = comment.find("@halt:");
    if (at == std::string::npos || !halt_pragma) return;
    size_t i = at + 6;
    while (i < comment.size() && isspace(static_cast<unsigned char>(comment[i]))) ++i;
    std::string name;
    while (i < comment.size() &&
           (isalnum(static_cast<unsigned char>(comment[i])) || comment[i] == '_'))
      name += comment[i++];
    if (!name.empty()) *halt_pragma = name;
  }

  Token next() {
    SourceLoc loc = here();
    char c = peek();
    if (isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string word;
      while (isalnum(static_cast<unsigned char>(peek())) || peek() == '_') {
        word += peek();
        advance();
      }
      static const std::map<std::string, Tok> kw = {
          {"MODULE", Tok::KwModule}, {"main", Tok::KwMain},     {"VAR", Tok::KwVar},
          {"ASSIGN", Tok::KwAssign}, {"INIT", Tok::KwInit},     {"TRANS", Tok::KwTrans},
          {"init", Tok::KwInitLower}, {"next", Tok::KwNextLower}, {"case", Tok::KwCase},
          {"esac", Tok::KwEsac},     {"boolean", Tok::KwBoolean}, {"TRUE", Tok::KwTrue},
          {"FALSE", Tok::KwFalse},
      };
      auto it = kw.find(word);
      Token t{it == kw.end() ? Tok::Ident : it->second, word, 0, loc};
      return t;
    }
    if (isdigit(static_cast<unsigned char>(c))) {
      std::string num;
      while (isdigit(static_cast<unsigned char>(peek()))) {
        num += peek();
        advance();
      }
      Token t{Tok::Int, num, std::stol(num), loc};
      return t;
    }
    auto two = [&](char a, char b) { return c == a && peek(1) == b; };
    if (two(':', '=')) { advance(); advance(); return Token{Tok::Assign, ":=", 0, loc}; }
    if (two('.', '.')) { advance(); advance(); return Token{Tok::DotDot, "..", 0, loc}; }
    if (two('-', '>')) { advance(); advance(); return Token{Tok::Arrow, "->", 0, loc}; }
    if (two('<', '-')) {
      if (peek(2) == '>') {
        advance(); advance(); advance();
        return Token{Tok::DArrow, "<->", 0, loc};
      }
      throw InputError(loc, "stray '<-'");
    }
    if (two('!', '=')) { advance(); advance(); return Token{Tok::Ne, "!=", 0, loc}; }
    if (two('<', '=')) { advance(); advance(); return Token{Tok::Le, "<=", 0, loc}; }
    if (two('>', '=')) { advance(); advance(); return Token{Tok::Ge, ">=", 0, loc}; }
    advance();
    switch (c) {
      case ':': return Token{Tok::Colon, ":", 0, loc};
      case ';': return Token{Tok::Semi, ";", 0, loc};
      case ',': return Token{Tok::Comma, ",", 0, loc};
      case '{': return Token{Tok::LBrace, "{", 0, loc};
      case '}': return Token{Tok::RBrace, "}", 0, loc};
      case '(': return Token{Tok::LParen, "(", 0, loc};
      case ')': return Token{Tok::RParen, ")", 0, loc};
      case '!': return Token{Tok::Bang, "!", 0, loc};
      case '&': return Token{Tok::Amp, "&", 0, loc};
      case '|': return Token{Tok::Pipe, "|", 0, loc};
      case '=': return Token{Tok::Eq, "=", 0, loc};
      case '<': return Token{Tok::Lt, "<", 0, loc};
      case '>': return Token{Tok::Gt, ">", 0, loc};
      case '+': return Token{Tok::Plus, "+", 0, loc};
      case '-': return Token{Tok::Minus, "-", 0, loc};
      default:
        throw InputError(loc, std::string("unexpected character '") + c + "'");
    }
  }

  const std::string& text_;
  std::string origin_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

// --------------------------------------------------------------- parser ---

std::shared_ptr<SmvExpr> mk_expr(SmvOp op, SourceLoc loc) {
  auto e = std::make_shared<SmvExpr>();
  e->op = op;
  e->loc = std::move(loc);
  return e;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, std::string origin)
      : toks_(std::move(toks)), origin_(std::move(origin)) {}

  SmvModel parse(std::optional<std::string> halt_pragma) {
    SmvModel m;
    m.origin = origin_;
    m.halt_pragma = std::move(halt_pragma);
    expect(Tok::KwModule, "MODULE");
    expect(Tok::KwMain, "main");
    bool any_section = false;
    while (cur().kind != Tok::End) {
      any_section = true;
      switch (cur().kind) {
        case Tok::KwVar: parse_var_section(m); break;
        case Tok::KwAssign: parse_assign_section(m); break;
        case Tok::KwInit: {
          bump();
          m.init_constraints.push_back(parse_expr(false));
          expect(Tok::Semi, ";");
          break;
        }
        case Tok::KwTrans: {
          bump();
          m.trans_constraints.push_back(parse_expr(true));
          expect(Tok::Semi, ";");
          break;
        }
        default:
          throw InputError(cur().loc, "expected VAR, ASSIGN, INIT or TRANS, got '" +
                                          cur().text + "'");
      }
    }
    if (!any_section) throw InputError(cur().loc, "empty module");
    return m;
  }

 private:
  const Token& cur() const { return toks_[i_]; }
  const Token& bump() { return toks_[i_++]; }
  bool accept(Tok k) {
    if (cur().kind == k) {
      ++i_;
      return true;
    }
    return false;
  }
  const Token& expect(Tok k, const char* what) {
    if (cur().kind != k)
      throw InputError(cur().loc, std::string("expected ") + what + ", got '" + cur().text + "'");
    return bump();
  }

  void parse_var_section(SmvModel& m) {
    expect(Tok::KwVar, "VAR");
    // One or more "ident : type ;" entries.
    bool any = false;
    while (cur().kind == Tok::Ident) {
      SmvVarDecl d;
      d.loc = cur().loc;
      d.name = bump().text;
      expect(Tok::Colon, "':'");
      if (accept(Tok::KwBoolean)) {
        d.boolean = true;
      } else {
        const Token& lo = expect(Tok::Int, "integer or 'boolean'");
        expect(Tok::DotDot, "'..'");
        const Token& hi = expect(Tok::Int, "integer");
        d.boolean = false;
        d.lo = lo.value;
        d.hi = hi.value;
      }
      expect(Tok::Semi, "';'");
      m.vars.push_back(std::move(d));
      any = true;
    }
    if (!any) throw InputError(cur().loc, "VAR section declares no variables");
  }

  void parse_assign_section(SmvModel& m) {
    expect(Tok::KwAssign, "ASSIGN");
    bool any = false;
    while (cur().kind == Tok::KwInitLower || cur().kind == Tok::KwNextLower) {
      SmvAssign a;
      a.loc = cur().loc;
      a.is_init = bump().kind == Tok::KwInitLower;
      expect(Tok::LParen, "'('");
      a.var = expect(Tok::Ident, "variable name").text;
      expect(Tok::RParen, "')'");
      expect(Tok::Assign, "':='");
      a.rhs = parse_rhs();
      expect(Tok::Semi, "';'");
      m.assigns.push_back(std::move(a));
      any = true;
    }
    if (!any) throw InputError(cur().loc, "ASSIGN section assigns nothing");
  }

  SmvRhsPtr parse_rhs() {
    auto rhs = std::make_shared<SmvRhs>();
    rhs->loc = cur().loc;
    if (cur().kind == Tok::LBrace) {
      bump();
      rhs->kind = SmvRhs::Kind::Set;
      rhs->set_elems.push_back(parse_literal());
      while (accept(Tok::Comma)) rhs->set_elems.push_back(parse_literal());
      expect(Tok::RBrace, "'}'");
      return rhs;
    }
    if (cur().kind == Tok::KwCase) {
      bump();
      rhs->kind = SmvRhs::Kind::Case;
      std::vector<std::pair<SmvExprPtr, SmvRhsPtr>> cases;
      do {
        SmvExprPtr guard = parse_expr(false);
        expect(Tok::Colon, "':'");
        SmvRhsPtr branch = parse_rhs();
        expect(Tok::Semi, "';'");
        cases.emplace_back(std::move(guard), std::move(branch));
      } while (cur().kind != Tok::KwEsac);
      expect(Tok::KwEsac, "esac");
      rhs->cases = std::move(cases);
      return rhs;
    }
    rhs->kind = SmvRhs::Kind::Expr;
    rhs->expr = parse_expr(false);
    return rhs;
  }

  SmvExprPtr parse_literal() {
    SourceLoc loc = cur().loc;
    if (cur().kind == Tok::KwTrue || cur().kind == Tok::KwFalse) {
      auto e = mk_expr(SmvOp::BoolConst, loc);
      e->value = bump().kind == Tok::KwTrue;
      return e;
    }
    if (cur().kind == Tok::Int) {
      auto e = mk_expr(SmvOp::IntConst, loc);
      e->value = bump().value;
      return e;
    }
    throw InputError(loc, "set literal must be TRUE, FALSE or an integer");
  }

  // Precedence, tightest first: ! / unary, (+ -), comparisons, &, |, (-> <->).
  SmvExprPtr parse_expr(bool allow_next) { return parse_impl_iff(allow_next); }

  SmvExprPtr parse_impl_iff(bool allow_next) {
    SmvExprPtr lhs = parse_or(allow_next);
    if (cur().kind == Tok::Arrow || cur().kind == Tok::DArrow) {
      SmvOp op = cur().kind == Tok::Arrow ? SmvOp::Implies : SmvOp::Iff;
      SourceLoc loc = bump().loc;
      SmvExprPtr rhs = parse_impl_iff(allow_next);  // right associative
      auto e = mk_expr(op, loc);
      e->lhs = lhs;
      e->rhs = rhs;
      return e;
    }
    return lhs;
  }

  SmvExprPtr parse_or(bool allow_next) {
    SmvExprPtr lhs = parse_and(allow_next);
    while (cur().kind == Tok::Pipe) {
      SourceLoc loc = bump().loc;
      SmvExprPtr rhs = parse_and(allow_next);
      auto e = mk_expr(SmvOp::Or, loc);
      e->lhs = lhs;
      e->rhs = rhs;
      lhs = e;
    }
    return lhs;
  }

  SmvExprPtr parse_and(bool allow_next) {
    SmvExprPtr lhs = parse_cmp(allow_next);
    while (cur().kind == Tok::Amp) {
      SourceLoc loc = bump().loc;
      SmvExprPtr rhs = parse_cmp(allow_next);
      auto e = mk_expr(SmvOp::And, loc);
      e->lhs = lhs;
      e->rhs = rhs;
      lhs = e;
    }
    return lhs;
  }

  SmvExprPtr parse_cmp(bool allow_next) {
    SmvExprPtr lhs = parse_add(allow_next);
    SmvOp op;
    switch (cur().kind) {
      case Tok::Eq: op = SmvOp::Eq; break;
      case Tok::Ne: op = SmvOp::Ne; break;
      case Tok::Lt: op = SmvOp::Lt; break;
      case Tok::Le: op = SmvOp::Le; break;
      case Tok::Gt: op = SmvOp::Gt; break;
      case Tok::Ge: op = SmvOp::Ge; break;
      default: return lhs;
    }
    SourceLoc loc = bump().loc;
    SmvExprPtr rhs = parse_add(allow_next);
    auto e = mk_expr(op, loc);
    e->lhs = lhs;
    e->rhs = rhs;
    return e;
  }

  SmvExprPtr parse_add(bool allow_next) {
    SmvExprPtr lhs = parse_unary(allow_next);
    while (cur().kind == Tok::Plus || cur().kind == Tok::Minus) {
      SmvOp op = cur().kind == Tok::Plus ? SmvOp::Add : SmvOp::Sub;
      SourceLoc loc = bump().loc;
      SmvExprPtr rhs = parse_unary(allow_next);
      auto e = mk_expr(op, loc);
      e->lhs = lhs;
      e->rhs = rhs;
      lhs = e;
    }
    return lhs;
  }

  SmvExprPtr parse_unary(bool allow_next) {
    SourceLoc loc = cur().loc;
    if (accept(Tok::Bang)) {
      auto e = mk_expr(SmvOp::Not, loc);
      e->lhs = parse_unary(allow_next);
      return e;
    }
    return parse_atom(allow_next);
  }

  SmvExprPtr parse_atom(bool allow_next) {
    SourceLoc loc = cur().loc;
    switch (cur().kind) {
      case Tok::KwTrue:
      case Tok::KwFalse: {
        auto e = mk_expr(SmvOp::BoolConst, loc);
        e->value = bump().kind == Tok::KwTrue;
        return e;
      }
      case Tok::Int: {
        auto e = mk_expr(SmvOp::IntConst, loc);
        e->value = bump().value;
        return e;
      }
      case Tok::Ident: {
        auto e = mk_expr(SmvOp::VarRef, loc);
        e->name = bump().text;
        return e;
      }
      case Tok::KwNextLower: {
        if (!allow_next)
          throw InputError(loc, "next(...) is only allowed inside TRANS constraints");
        bump();
        expect(Tok::LParen, "'('");
        auto e = mk_expr(SmvOp::NextRef, loc);
        e->name = expect(Tok::Ident, "variable name").text;
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::LParen: {
        bump();
        SmvExprPtr e = parse_expr(allow_next);
        expect(Tok::RParen, "')'");
        return e;
      }
      default:
        throw InputError(loc, "expected an expression, got '" + cur().text + "'");
    }
  }

  std::vector<Token> toks_;
  std::string origin_;
  size_t i_ = 0;
};

// -------------------------------------------------------------- printer ---

void print_expr(std::ostream& os, const SmvExprPtr& e) {
  switch (e->op) {
    case SmvOp::BoolConst: os << (e->value ? "TRUE" : "FALSE"); return;
    case SmvOp::IntConst: os << e->value; return;
    case SmvOp::VarRef: os << e->name; return;
    case SmvOp::NextRef: os << "next(" << e->name << ")"; return;
    case SmvOp::Not:
      os << "!";
      print_expr(os, e->lhs);
      return;
    default: break;
  }
  const char* op = "?";
  switch (e->op) {
    case SmvOp::And: op = " & "; break;
    case SmvOp::Or: op = " | "; break;
    case SmvOp::Implies: op = " -> "; break;
    case SmvOp::Iff: op = " <-> "; break;
    case SmvOp::Eq: op = " = "; break;
    case SmvOp::Ne: op = " != "; break;
    case SmvOp::Lt: op = " < "; break;
    case SmvOp::Le: op = " <= "; break;
    case SmvOp::Gt: op = " > "; break;
    case SmvOp::Ge: op = " >= "; break;
    case SmvOp::Add: op = " + "; break;
    case SmvOp::Sub: op = " - "; break;
    default: break;
  }
  os << "(";
  print_expr(os, e->lhs);
  os << op;
  print_expr(os, e->rhs);
  os << ")";
}

void print_rhs(std::ostream& os, const SmvRhsPtr& r, int indent) {
  switch (r->kind) {
    case SmvRhs::Kind::Expr:
      print_expr(os, r->expr);
      return;
    case SmvRhs::Kind::Set: {
      os << "{";
      for (size_t i = 0; i < r->set_elems.size(); ++i) {
        if (i) os << ", ";
        print_expr(os, r->set_elems[i]);
      }
      os << "}";
      return;
    }
    case SmvRhs::Kind::Case: {
      os << "case\n";
      for (const auto& [guard, branch] : r->cases) {
        os << std::string(indent + 4, ' ');
        print_expr(os, guard);
        os << " : ";
        print_rhs(os, branch, indent + 4);
        os << ";\n";
      }
      os << std::string(indent + 2, ' ') << "esac";
      return;
    }
  }
}

// ------------------------------------------------------------- lowering ---

// An integer expression lowered to bits (MSB first) plus the condition under
// which the value is defined; subtraction below zero makes `valid` false
// (wraparound-free contract).
struct BitVec {
  std::vector<ExprId> bits;
  ExprId valid;
};

class Lowerer {
 public:
  explicit Lowerer(const SmvModel& m) : m_(m), arena_(std::make_shared<ExprArena>()) {}

  SymbolicKripke run() {
    std::vector<VarDecl> decls;
    for (const auto& v : m_.vars) {
      decls.push_back(v.boolean ? make_bool_var(v.name)
                                : [&] {
                                    try {
                                      return make_range_var(v.name, v.lo, v.hi);
                                    } catch (const InputError& e) {
                                      throw InputError(v.loc, e.what());
                                    }
                                  }());
    }
    std::optional<int> halt;
    std::string halt_name = m_.halt_pragma.value_or("halt");
    for (size_t i = 0; i < decls.size(); ++i)
      if (decls[i].name == halt_name) halt = static_cast<int>(i);
    if (m_.halt_pragma) {
      if (!halt)
        throw InputError("@halt pragma names undeclared variable '" + halt_name + "'");
      if (decls[*halt].kind != VarKind::Boolean)
        throw InputError("halt variable '" + halt_name + "' must be boolean");
    } else if (halt && decls[*halt].kind != VarKind::Boolean) {
      halt.reset();  // a ranged variable merely named halt is not the flag
    }

    // Construct with placeholder circuits first so atom ids are available.
    k_ = std::make_unique<SymbolicKripke>(decls, arena_, arena_->t(), arena_->t(), halt,
                                          m_.origin);

    std::vector<ExprId> init_parts, trans_parts;
    for (const auto& a : m_.assigns) {
      auto vi = k_->var_index(a.var);
      if (!vi) throw InputError(a.loc, "assignment to undeclared variable '" + a.var + "'");
      for (const auto& b : m_.assigns)
        if (&a != &b && a.var == b.var && a.is_init == b.is_init)
          throw InputError(a.loc, "duplicate " + std::string(a.is_init ? "init" : "next") +
                                      " assignment to '" + a.var + "'");
      ExprId c = lower_assignment(*vi, a);
      (a.is_init ? init_parts : trans_parts).push_back(c);
    }
    for (const auto& e : m_.init_constraints) init_parts.push_back(lower_bool(e, Ctx::Init));
    for (const auto& e : m_.trans_constraints) trans_parts.push_back(lower_bool(e, Ctx::Trans));

    // Values representable in the bits but outside [lo,hi] are excluded here.
    for (size_t v = 0; v < decls.size(); ++v) {
      ExprId dom = domain_constraint(*arena_, *k_, static_cast<int>(v), false);
      if (dom != arena_->t()) init_parts.push_back(dom);
      ExprId domp = domain_constraint(*arena_, *k_, static_cast<int>(v), true);
      if (domp != arena_->t()) trans_parts.push_back(domp);
    }

    ExprId init = arena_->mk_and(std::move(init_parts));
    ExprId trans = arena_->mk_and(std::move(trans_parts));
    return SymbolicKripke(decls, arena_, init, trans, halt, m_.origin);
  }

 private:
  // Where an expression appears decides which atom copies a variable denotes:
  // Init: unprimed only. Next (ASSIGN rhs): unprimed (pre-state). Trans:
  // unprimed, with next(v) denoting the primed copy.
  enum class Ctx { Init, Next, Trans };

  ExprId atom(int var_index, int bit, bool primed) {
    return arena_->var(k_->atom_id(Atom{var_index, bit, primed}));
  }

  BitVec var_bits(int var_index, bool primed) {
    const VarDecl& d = k_->var(var_index);
    BitVec bv;
    bv.valid = arena_->t();
    for (int bit = d.bit_count - 1; bit >= 0; --bit)
      bv.bits.push_back(atom(var_index, bit, primed));
    return bv;
  }

  static BitVec const_bits(ExprArena& a, long v) {
    BitVec bv;
    bv.valid = a.t();
    int width = 1;
    while ((1L << width) <= v) ++width;
    for (int bit = width - 1; bit >= 0; --bit)
      bv.bits.push_back(((v >> bit) & 1) ? a.t() : a.f());
    return bv;
  }

  void zero_extend(BitVec& bv, size_t width) {
    while (bv.bits.size() < width) bv.bits.insert(bv.bits.begin(), arena_->f());
  }

  bool is_bool_expr(const SmvExprPtr& e) {
    switch (e->op) {
      case SmvOp::BoolConst:
      case SmvOp::Not:
      case SmvOp::And:
      case SmvOp::Or:
      case SmvOp::Implies:
      case SmvOp::Iff:
      case SmvOp::Eq:
      case SmvOp::Ne:
      case SmvOp::Lt:
      case SmvOp::Le:
      case SmvOp::Gt:
      case SmvOp::Ge:
        return true;
      case SmvOp::IntConst:
      case SmvOp::Add:
      case SmvOp::Sub:
        return false;
      case SmvOp::VarRef:
      case SmvOp::NextRef: {
        auto vi = k_->var_index(e->name);
        if (!vi) throw InputError(e->loc, "undeclared variable '" + e->name + "'");
        return k_->var(*vi).kind == VarKind::Boolean;
      }
    }
    return false;
  }

  ExprId lower_bool(const SmvExprPtr& e, Ctx ctx) {
    switch (e->op) {
      case SmvOp::BoolConst: return e->value ? arena_->t() : arena_->f();
      case SmvOp::Not: return arena_->mk_not(lower_bool(e->lhs, ctx));
      case SmvOp::And: return arena_->mk_and(lower_bool(e->lhs, ctx), lower_bool(e->rhs, ctx));
      case SmvOp::Or: return arena_->mk_or(lower_bool(e->lhs, ctx), lower_bool(e->rhs, ctx));
      case SmvOp::Implies:
        return arena_->mk_implies(lower_bool(e->lhs, ctx), lower_bool(e->rhs, ctx));
      case SmvOp::Iff: return arena_->mk_iff(lower_bool(e->lhs, ctx), lower_bool(e->rhs, ctx));
      case SmvOp::Eq:
      case SmvOp::Ne:
      case SmvOp::Lt:
      case SmvOp::Le:
      case SmvOp::Gt:
      case SmvOp::Ge:
        return lower_comparison(e, ctx);
      case SmvOp::VarRef:
      case SmvOp::NextRef: {
        auto [vi, primed] = resolve_ref(e, ctx);
        if (k_->var(vi).kind != VarKind::Boolean)
          throw InputError(e->loc, "integer variable '" + e->name +
                                       "' used where a boolean is required");
        return atom(vi, 0, primed);
      }
      case SmvOp::IntConst:
      case SmvOp::Add:
      case SmvOp::Sub:
        throw InputError(e->loc, "integer expression used where a boolean is required");
    }
    throw InternalError("lower_bool: unreachable");
  }

  std::pair<int, bool> resolve_ref(const SmvExprPtr& e, Ctx ctx) {
    auto vi = k_->var_index(e->name);
    if (!vi) throw InputError(e->loc, "undeclared variable '" + e->name + "'");
    if (e->op == SmvOp::NextRef) {
      if (ctx != Ctx::Trans)
        throw InputError(e->loc, "next(...) is only allowed inside TRANS constraints");
      return {*vi, true};
    }
    return {*vi, false};
  }

  BitVec lower_int(const SmvExprPtr& e, Ctx ctx) {
    switch (e->op) {
      case SmvOp::IntConst:
        if (e->value < 0) throw InputError(e->loc, "negative constants are not supported");
        return const_bits(*arena_, e->value);
      case SmvOp::VarRef:
      case SmvOp::NextRef: {
        auto [vi, primed] = resolve_ref(e, ctx);
        if (k_->var(vi).kind != VarKind::Range)
          throw InputError(e->loc, "boolean variable '" + e->name +
                                       "' used where an integer is required");
        return var_bits(vi, primed);
      }
      case SmvOp::Add: return lower_add_sub(e, ctx, /*sub=*/false);
      case SmvOp::Sub: return lower_add_sub(e, ctx, /*sub=*/true);
      default:
        throw InputError(e->loc, "boolean expression used where an integer is required");
    }
  }

  BitVec lower_add_sub(const SmvExprPtr& e, Ctx ctx, bool sub) {
    BitVec a = lower_int(e->lhs, ctx);
    BitVec b = lower_int(e->rhs, ctx);
    size_t w = std::max(a.bits.size(), b.bits.size());
    if (!sub) ++w;  // addition cannot overflow a one-bit-wider result
    zero_extend(a, w);
    zero_extend(b, w);
    BitVec r;
    r.bits.resize(w);
    ExprId carry = arena_->f();  // borrow for subtraction
    for (size_t i = w; i-- > 0;) {  // LSB first over MSB-first storage
      ExprId x = a.bits[i], y = b.bits[i];
      ExprId xy = arena_->mk_not(arena_->mk_iff(x, y));  // x xor y
      r.bits[i] = arena_->mk_not(arena_->mk_iff(xy, carry));
      if (!sub) {
        carry = arena_->mk_or(arena_->mk_and(x, y), arena_->mk_and(xy, carry));
      } else {
        carry = arena_->mk_or(arena_->mk_and(arena_->mk_not(x), y),
                              arena_->mk_and(arena_->mk_not(xy), carry));
      }
    }
    ExprId valid = arena_->mk_and(a.valid, b.valid);
    if (sub) valid = arena_->mk_and(valid, arena_->mk_not(carry));  // no underflow
    if (valid == arena_->f())
      throw InputError(e->loc, "arithmetic result is never representable (underflow)");
    r.valid = valid;
    return r;
  }

  ExprId lower_comparison(const SmvExprPtr& e, Ctx ctx) {
    if (is_bool_expr(e->lhs) || is_bool_expr(e->rhs))
      throw InputError(e->loc, "comparison operands must be integers");
    BitVec a = lower_int(e->lhs, ctx);
    BitVec b = lower_int(e->rhs, ctx);
    size_t w = std::max(a.bits.size(), b.bits.size());
    zero_extend(a, w);
    zero_extend(b, w);
    ExprId raw;
    switch (e->op) {
      case SmvOp::Eq:
      case SmvOp::Ne: {
        std::vector<ExprId> iffs;
        for (size_t i = 0; i < w; ++i) iffs.push_back(arena_->mk_iff(a.bits[i], b.bits[i]));
        raw = arena_->mk_and(std::move(iffs));
        if (e->op == SmvOp::Ne) raw = arena_->mk_not(raw);
        break;
      }
      case SmvOp::Lt: raw = less_than(a.bits, b.bits, false); break;
      case SmvOp::Le: raw = less_than(a.bits, b.bits, true); break;
      case SmvOp::Gt: raw = less_than(b.bits, a.bits, false); break;
      case SmvOp::Ge: raw = less_than(b.bits, a.bits, true); break;
      default: throw InternalError("lower_comparison: not a comparison");
    }
    // An undefined operand (e.g. underflowed subtraction) makes the
    // comparison false rather than wrapping around.
    return arena_->mk_and({a.valid, b.valid, raw});
  }

  ExprId less_than(const std::vector<ExprId>& a, const std::vector<ExprId>& b, bool or_equal) {
    ExprId acc = or_equal ? arena_->t() : arena_->f();
    for (size_t i = a.size(); i-- > 0;) {  // from LSB up
      ExprId lt = arena_->mk_and(arena_->mk_not(a[i]), b[i]);
      ExprId eq = arena_->mk_iff(a[i], b[i]);
      acc = arena_->mk_or(lt, arena_->mk_and(eq, acc));
    }
    return acc;
  }

  // Constraint tying the target copy of `var` to an rhs. For init(v) the
  // target is the unprimed copy; for next(v) the primed copy.
  ExprId lower_assignment(int var_index, const SmvAssign& a) {
    bool primed = !a.is_init;
    Ctx ctx = a.is_init ? Ctx::Init : Ctx::Next;
    return lower_rhs(var_index, primed, a.rhs, ctx);
  }

  ExprId lower_rhs(int var_index, bool primed, const SmvRhsPtr& rhs, Ctx ctx) {
    switch (rhs->kind) {
      case SmvRhs::Kind::Expr:
        return constrain_to(var_index, primed, rhs->expr, ctx);
      case SmvRhs::Kind::Set: {
        std::vector<ExprId> alts;
        for (const auto& lit : rhs->set_elems)
          alts.push_back(constrain_to(var_index, primed, lit, ctx));
        return arena_->mk_or(std::move(alts));
      }
      case SmvRhs::Kind::Case: {
        // Nested if-then-else; a fall-through past the last guard leaves the
        // variable unconstrained.
        ExprId acc = arena_->t();
        for (size_t i = rhs->cases.size(); i-- > 0;) {
          ExprId guard = lower_bool(rhs->cases[i].first, ctx);
          ExprId branch = lower_rhs(var_index, primed, rhs->cases[i].second, ctx);
          acc = arena_->mk_ite(guard, branch, acc);
        }
        return acc;
      }
    }
    throw InternalError("lower_rhs: unreachable");
  }

  ExprId constrain_to(int var_index, bool primed, const SmvExprPtr& e, Ctx ctx) {
    const VarDecl& d = k_->var(var_index);
    if (d.kind == VarKind::Boolean) {
      ExprId target = atom(var_index, 0, primed);
      return arena_->mk_iff(target, lower_bool(e, ctx));
    }
    if (is_bool_expr(e))
      throw InputError(e->loc,
                       "boolean expression assigned to integer variable '" + d.name + "'");
    if (e->op == SmvOp::IntConst) {
      if (e->value < d.lo || e->value > d.hi)
        throw InputError(e->loc, "value out of bound: " + std::to_string(e->value) +
                                     " not in " + std::to_string(d.lo) + ".." +
                                     std::to_string(d.hi) + " for '" + d.name + "'");
      return encode_value(*arena_, *k_, var_index, e->value, primed);
    }
    BitVec v = lower_int(e, ctx);
    BitVec target = var_bits(var_index, primed);
    std::vector<ExprId> parts{v.valid};
    // Wider sources must have their extra high bits zero; the target's domain
    // constraint already excludes values above hi.
    while (v.bits.size() > target.bits.size()) {
      parts.push_back(arena_->mk_not(v.bits.front()));
      v.bits.erase(v.bits.begin());
    }
    zero_extend(v, target.bits.size());
    for (size_t i = 0; i < target.bits.size(); ++i)
      parts.push_back(arena_->mk_iff(target.bits[i], v.bits[i]));
    return arena_->mk_and(std::move(parts));
  }

  const SmvModel& m_;
  std::shared_ptr<ExprArena> arena_;
  std::unique_ptr<SymbolicKripke> k_;
};

}  // namespace

SmvModel parse_smv(const SmvModelSource& src) {
  std::optional<std::string> halt_pragma;
  Lexer lex(src.text, src.origin);
  std::vector<Token> toks = lex.run(&halt_pragma);
  Parser p(std::move(toks), src.origin);
  return p.parse(std::move(halt_pragma));
}

std::string print_smv(const SmvModel& m) {
  std::ostringstream os;
  if (m.halt_pragma) os << "-- @halt: " << *m.halt_pragma << "\n";
  os << "MODULE main\n";
  if (!m.vars.empty()) {
    os << "VAR\n";
    for (const auto& v : m.vars) {
      os << "  " << v.name << " : ";
      if (v.boolean)
        os << "boolean";
      else
        os << v.lo << ".." << v.hi;
      os << ";\n";
    }
  }
  if (!m.assigns.empty()) {
    os << "ASSIGN\n";
    for (const auto& a : m.assigns) {
      os << "  " << (a.is_init ? "init" : "next") << "(" << a.var << ") := ";
      print_rhs(os, a.rhs, 2);
      os << ";\n";
    }
  }
  for (const auto& e : m.init_constraints) {
    os << "INIT ";
    print_expr(os, e);
    os << ";\n";
  }
  for (const auto& e : m.trans_constraints) {
    os << "TRANS ";
    print_expr(os, e);
    os << ";\n";
  }
  return os.str();
}

SymbolicKripke lower_smv(const SmvModel& m) { return Lowerer(m).run(); }

SymbolicKripke parse_model(const SmvModelSource& src) { return lower_smv(parse_smv(src)); }

SymbolicKripke parse_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(SmvModelSource{ss.str(), path});
}

}  // namespace hyperbmc
