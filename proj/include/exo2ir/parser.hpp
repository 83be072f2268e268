#pragma once

#include <cctype>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "exo2ir/errors.hpp"
#include "exo2ir/ir.hpp"
#include "exo2ir/wellformed.hpp"

namespace exo2ir {

// ---------------------------------------------------------------------------
// Lexer. Indentation-sensitive, 2 spaces per level, '#' comments.
// ---------------------------------------------------------------------------

enum class Tok {
  Ident, Int, Float, String,
  LParen, RParen, LBracket, RBracket,
  Colon, Comma, At,
  Plus, Minus, Star, Slash, Percent,
  Assign, PlusAssign,
  Eq, Ne, Lt, Le, Gt, Ge,
  Newline, Indent, Dedent, End,
};

struct Token {
  Tok kind;
  std::string text;
  int line = 0;
  int col = 0;
};

class Lexer {
public:
  explicit Lexer(const std::string& src) { run(src); }
  const std::vector<Token>& tokens() const { return toks_; }

private:
  void run(const std::string& src) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : src) {
      if (c == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) lines.push_back(cur);

    std::vector<int> indents{0};
    for (size_t ln = 0; ln < lines.size(); ++ln) {
      const std::string& line = lines[ln];
      size_t i = 0;
      while (i < line.size() && line[i] == ' ') ++i;
      if (i < line.size() && line[i] == '\t')
        fail("tab indentation is not supported", (int)ln + 1, (int)i + 1);
      if (i >= line.size() || line[i] == '#') continue;  // blank or comment

      int indent = (int)i;
      if (indent % 2 != 0)
        fail("indentation must be a multiple of 2 spaces", (int)ln + 1, 1);
      if (indent > indents.back()) {
        if (indent != indents.back() + 2)
          fail("over-indented block", (int)ln + 1, 1);
        indents.push_back(indent);
        push(Tok::Indent, "", (int)ln + 1, 1);
      }
      while (indent < indents.back()) {
        indents.pop_back();
        push(Tok::Dedent, "", (int)ln + 1, 1);
      }
      if (indent != indents.back())
        fail("inconsistent dedent", (int)ln + 1, 1);

      lex_line(line, i, (int)ln + 1);
      push(Tok::Newline, "", (int)ln + 1, (int)line.size() + 1);
    }
    while (indents.back() > 0) {
      indents.pop_back();
      push(Tok::Dedent, "", (int)lines.size() + 1, 1);
    }
    push(Tok::End, "", (int)lines.size() + 1, 1);
  }

  void lex_line(const std::string& line, size_t i, int ln) {
    while (i < line.size()) {
      char c = line[i];
      int col = (int)i + 1;
      if (c == ' ') { ++i; continue; }
      if (c == '#') return;
      if (std::isalpha((unsigned char)c) || c == '_') {
        size_t j = i;
        while (j < line.size() &&
               (std::isalnum((unsigned char)line[j]) || line[j] == '_'))
          ++j;
        push(Tok::Ident, line.substr(i, j - i), ln, col);
        i = j;
        continue;
      }
      if (std::isdigit((unsigned char)c)) {
        size_t j = i;
        bool dot = false;
        while (j < line.size() &&
               (std::isdigit((unsigned char)line[j]) ||
                (line[j] == '.' && !dot && j + 1 < line.size() &&
                 std::isdigit((unsigned char)line[j + 1])))) {
          if (line[j] == '.') dot = true;
          ++j;
        }
        push(dot ? Tok::Float : Tok::Int, line.substr(i, j - i), ln, col);
        i = j;
        continue;
      }
      if (c == '"') {
        std::string s;
        size_t j = i + 1;
        while (j < line.size() && line[j] != '"') {
          if (line[j] == '\\' && j + 1 < line.size()) ++j;
          s.push_back(line[j]);
          ++j;
        }
        if (j >= line.size()) fail("unterminated string", ln, col);
        push(Tok::String, s, ln, col);
        i = j + 1;
        continue;
      }
      auto two = [&](char a, char b) {
        return c == a && i + 1 < line.size() && line[i + 1] == b;
      };
      if (two('+', '=')) { push(Tok::PlusAssign, "+=", ln, col); i += 2; continue; }
      if (two('=', '=')) { push(Tok::Eq, "==", ln, col); i += 2; continue; }
      if (two('!', '=')) { push(Tok::Ne, "!=", ln, col); i += 2; continue; }
      if (two('<', '=')) { push(Tok::Le, "<=", ln, col); i += 2; continue; }
      if (two('>', '=')) { push(Tok::Ge, ">=", ln, col); i += 2; continue; }
      switch (c) {
        case '(': push(Tok::LParen, "(", ln, col); break;
        case ')': push(Tok::RParen, ")", ln, col); break;
        case '[': push(Tok::LBracket, "[", ln, col); break;
        case ']': push(Tok::RBracket, "]", ln, col); break;
        case ':': push(Tok::Colon, ":", ln, col); break;
        case ',': push(Tok::Comma, ",", ln, col); break;
        case '@': push(Tok::At, "@", ln, col); break;
        case '+': push(Tok::Plus, "+", ln, col); break;
        case '-': push(Tok::Minus, "-", ln, col); break;
        case '*': push(Tok::Star, "*", ln, col); break;
        case '/': push(Tok::Slash, "/", ln, col); break;
        case '%': push(Tok::Percent, "%", ln, col); break;
        case '=': push(Tok::Assign, "=", ln, col); break;
        case '<': push(Tok::Lt, "<", ln, col); break;
        case '>': push(Tok::Gt, ">", ln, col); break;
        default: fail(std::string("unexpected character '") + c + "'", ln, col);
      }
      ++i;
    }
  }

  void push(Tok k, std::string t, int ln, int col) {
    toks_.push_back(Token{k, std::move(t), ln, col});
  }
  [[noreturn]] static void fail(const std::string& msg, int ln, int col) {
    throw ParseError(msg + " at " + std::to_string(ln) + ":" +
                         std::to_string(col),
                     ln, col);
  }

  std::vector<Token> toks_;
};

// ---------------------------------------------------------------------------
// Parser.
// ---------------------------------------------------------------------------

// What a name means inside a procedure body.
struct Binding {
  enum Kind { SizeParam, ScalarParam, BufferParam, BufferAlloc, Iterator } kind;
  ScalarKind type = ScalarKind::Index;
  size_t ndims = 0;
};

using ScopeEnv = std::map<std::string, Binding>;

class Parser {
public:
  Parser(const std::string& src, std::vector<ProcP> preloaded = {},
         bool wildcards = false)
      : lex_(src), wildcards_(wildcards) {
    for (auto& p : preloaded) procs_[p->name] = std::move(p);
  }

  std::vector<ProcP> parse_file() {
    std::vector<ProcP> out;
    while (!at(Tok::End)) {
      ProcP p = parse_proc();
      procs_[p->name] = p;
      out.push_back(std::move(p));
    }
    if (out.empty()) fail("no procedures in file");
    return out;
  }

  bool wildcards() const { return wildcards_; }

  // Expression / predicate fragment entry points (no trailing tokens allowed).
  ExprP parse_expr_fragment(const ScopeEnv& env) {
    env_ = env;
    ExprP e = parse_pred();
    skip_newlines();
    if (!at(Tok::End)) fail("trailing tokens after expression");
    return e;
  }

  // Single-statement fragment (patterns); `env` supplies surrounding names.
  StmtP parse_stmt_fragment(const ScopeEnv& env) {
    env_ = env;
    Block b = {};
    parse_stmt(b);
    skip_newlines();
    if (!at(Tok::End)) fail("trailing tokens after statement");
    if (b.size() != 1) fail("expected exactly one statement");
    return b[0];
  }

private:
  // --- token plumbing ---
  const Token& peek(int k = 0) const {
    size_t i = pos_ + k;
    if (i >= lex_.tokens().size()) i = lex_.tokens().size() - 1;
    return lex_.tokens()[i];
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_ident(const char* s) const {
    return at(Tok::Ident) && peek().text == s;
  }
  Token eat() { return lex_.tokens()[pos_++]; }
  Token expect(Tok k, const char* what) {
    if (!at(k)) fail(std::string("expected ") + what);
    return eat();
  }
  void expect_ident(const char* s) {
    if (!at_ident(s)) fail(std::string("expected '") + s + "'");
    eat();
  }
  void skip_newlines() {
    while (at(Tok::Newline)) eat();
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw ParseError(msg + " at " + std::to_string(t.line) + ":" +
                         std::to_string(t.col) +
                         (t.text.empty() ? "" : " (near '" + t.text + "')"),
                     t.line, t.col);
  }

  // --- grammar ---
  ProcP parse_proc() {
    skip_newlines();
    bool is_instr = false;
    if (at_ident("instr")) {
      is_instr = true;
      eat();
    } else {
      expect_ident("proc");
    }
    std::string name = expect(Tok::Ident, "procedure name").text;
    expect(Tok::LParen, "'('");
    std::vector<Param> params;
    env_.clear();
    if (!at(Tok::RParen)) {
      for (;;) {
        params.push_back(parse_param());
        if (at(Tok::Comma)) { eat(); continue; }
        break;
      }
    }
    expect(Tok::RParen, "')'");
    expect(Tok::Colon, "':'");
    expect(Tok::Newline, "newline");
    expect(Tok::Indent, "indented body");

    std::string intrinsic;
    if (at_ident("intrin")) {
      if (!is_instr) fail("'intrin' is only allowed in instr procedures");
      eat();
      intrinsic = expect(Tok::String, "intrinsic template string").text;
      expect(Tok::Newline, "newline");
    }
    std::vector<ExprP> asserts;
    while (at_ident("assert")) {
      eat();
      asserts.push_back(parse_pred());
      expect(Tok::Newline, "newline");
    }
    Block body = parse_block_rest();
    return make_proc(std::move(name), std::move(params), std::move(asserts),
                     std::move(body), is_instr, std::move(intrinsic));
  }

  Param parse_param() {
    Param p;
    p.name = expect(Tok::Ident, "parameter name").text;
    expect(Tok::Colon, "':'");
    std::string ty = expect(Tok::Ident, "type").text;
    if (ty == "size") {
      p.type = ScalarKind::Index;
      env_[p.name] = {Binding::SizeParam, ScalarKind::Index, 0};
    } else {
      p.type = scalar_from_name(ty);
      if (at(Tok::LBracket)) {
        eat();
        for (;;) {
          p.dims.push_back(parse_expr());
          if (at(Tok::Comma)) { eat(); continue; }
          break;
        }
        expect(Tok::RBracket, "']'");
        env_[p.name] = {Binding::BufferParam, p.type, p.dims.size()};
      } else {
        env_[p.name] = {Binding::ScalarParam, p.type, 0};
      }
    }
    if (at(Tok::At)) {
      eat();
      p.mem = expect(Tok::Ident, "memory tag").text;
    }
    return p;
  }

  ScalarKind scalar_from_name(const std::string& s) {
    if (s == "f32") return ScalarKind::F32;
    if (s == "f64") return ScalarKind::F64;
    if (s == "i8") return ScalarKind::I8;
    if (s == "i32") return ScalarKind::I32;
    if (s == "index" || s == "size") return ScalarKind::Index;
    fail("unknown type '" + s + "'");
  }

  // Parses statements at the current indent level; consumes the Dedent.
  Block parse_block_rest() {
    Block b;
    for (;;) {
      skip_newlines();
      if (at(Tok::Dedent)) { eat(); break; }
      if (at(Tok::End)) break;
      parse_stmt(b);
    }
    if (b.empty()) fail("empty block");
    return b;
  }

  Block parse_indented_block() {
    expect(Tok::Newline, "newline");
    expect(Tok::Indent, "indented block");
    return parse_block_rest();
  }

  // In pattern mode a body may be the inline wildcard `_`, matching any block.
  Block parse_body_or_wildcard() {
    if (wildcards_ && at_ident("_")) {
      eat();
      if (at(Tok::Newline)) eat();
      return Block{make_wildcard_stmt()};
    }
    return parse_indented_block();
  }

  static StmtP make_wildcard_stmt() {
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::Pass;
    s->name = "_";
    return s;
  }

  void parse_stmt(Block& out) {
    if (at_ident("pass")) {
      eat();
      expect(Tok::Newline, "newline");
      out.push_back(make_pass());
      return;
    }
    if (at_ident("for")) {
      eat();
      std::string it = expect(Tok::Ident, "iterator name").text;
      expect_ident("in");
      ExprP lo, hi;
      bool parallel = false;
      if (wildcards_ && at_ident("_")) {
        eat();
        lo = make_var("_", ScalarKind::Index);
        hi = make_var("_", ScalarKind::Index);
      } else {
        if (at_ident("par")) {
          parallel = true;
          eat();
        } else {
          expect_ident("seq");
        }
        expect(Tok::LParen, "'('");
        lo = parse_index_expr();
        expect(Tok::Comma, "','");
        hi = parse_index_expr();
        expect(Tok::RParen, "')'");
      }
      expect(Tok::Colon, "':'");
      bool had = env_.count(it) > 0;
      Binding saved = had ? env_[it] : Binding{};
      env_[it] = {Binding::Iterator, ScalarKind::Index, 0};
      Block body = parse_body_or_wildcard();
      if (had) env_[it] = saved; else env_.erase(it);
      out.push_back(make_for(std::move(it), std::move(lo), std::move(hi),
                             std::move(body), parallel));
      return;
    }
    if (at_ident("if")) {
      eat();
      ExprP cond;
      if (wildcards_ && at_ident("_") && peek(1).kind == Tok::Colon) {
        eat();
        cond = make_var("_", ScalarKind::Bool);
      } else {
        cond = parse_pred();
      }
      expect(Tok::Colon, "':'");
      Block then_b = parse_body_or_wildcard();
      Block else_b;
      skip_newlines();
      if (at_ident("else")) {
        eat();
        expect(Tok::Colon, "':'");
        else_b = parse_body_or_wildcard();
      }
      out.push_back(make_if(std::move(cond), std::move(then_b),
                            std::move(else_b)));
      return;
    }
    if (wildcards_ && at_ident("_") &&
        (peek(1).kind == Tok::Newline || peek(1).kind == Tok::End)) {
      eat();
      if (at(Tok::Newline)) eat();
      out.push_back(make_wildcard_stmt());
      return;
    }
    if (!at(Tok::Ident)) fail("expected a statement");

    std::string name = eat().text;
    if (at(Tok::LParen)) {  // call
      eat();
      std::vector<ExprP> args;
      if (!at(Tok::RParen)) {
        for (;;) {
          args.push_back(parse_call_arg());
          if (at(Tok::Comma)) { eat(); continue; }
          break;
        }
      }
      expect(Tok::RParen, "')'");
      expect(Tok::Newline, "newline");
      ProcP callee;
      auto it = procs_.find(name);
      if (it != procs_.end()) callee = it->second;
      else if (!wildcards_)
        fail("call to unknown procedure '" + name + "'");
      out.push_back(make_call(std::move(name), std::move(args),
                              std::move(callee)));
      return;
    }
    if (at(Tok::Colon)) {  // allocation
      eat();
      std::string ty = expect(Tok::Ident, "type").text;
      ScalarKind sk = scalar_from_name(ty);
      std::vector<ExprP> dims;
      if (at(Tok::LBracket)) {
        eat();
        for (;;) {
          dims.push_back(parse_index_expr());
          if (at(Tok::Comma)) { eat(); continue; }
          break;
        }
        expect(Tok::RBracket, "']'");
      }
      std::string mem;
      if (at(Tok::At)) {
        eat();
        mem = expect(Tok::Ident, "memory tag").text;
      }
      expect(Tok::Newline, "newline");
      env_[name] = {Binding::BufferAlloc, sk, dims.size()};
      out.push_back(make_alloc(std::move(name), sk, std::move(dims),
                               std::move(mem)));
      return;
    }
    // assignment or reduction
    std::vector<ExprP> idx;
    if (at(Tok::LBracket)) {
      eat();
      for (;;) {
        idx.push_back(parse_index_expr());
        if (at(Tok::Comma)) { eat(); continue; }
        break;
      }
      expect(Tok::RBracket, "']'");
    }
    ScalarKind dest_ty = dest_type(name);
    bool reduce;
    if (at(Tok::Assign)) reduce = false;
    else if (at(Tok::PlusAssign)) reduce = true;
    else fail("expected '=' or '+='");
    eat();
    ExprP rhs = retype_literals(parse_expr(), dest_ty);
    expect(Tok::Newline, "newline");
    if (reduce)
      out.push_back(make_reduce(std::move(name), std::move(idx), std::move(rhs)));
    else
      out.push_back(make_assign(std::move(name), std::move(idx), std::move(rhs)));
  }

  ScalarKind dest_type(const std::string& name) {
    auto it = env_.find(name);
    if (it == env_.end()) return ScalarKind::F32;  // checked later
    return it->second.type;
  }

  ExprP parse_call_arg() {
    // A slice argument looks like NAME [ ... ':' ... ] — scan ahead for ':'
    // before the closing bracket at depth 1.
    if (at(Tok::Ident) && peek(1).kind == Tok::LBracket) {
      int depth = 0;
      bool has_colon = false;
      for (int k = 1;; ++k) {
        const Token& t = peek(k);
        if (t.kind == Tok::LBracket) ++depth;
        else if (t.kind == Tok::RBracket) {
          if (--depth == 0) break;
        } else if (t.kind == Tok::Colon && depth == 1) has_colon = true;
        else if (t.kind == Tok::Newline || t.kind == Tok::End) break;
      }
      if (has_colon) return parse_slice();
    }
    return parse_expr();
  }

  ExprP parse_slice() {
    std::string name = expect(Tok::Ident, "buffer name").text;
    ScalarKind ty = ScalarKind::F32;
    if (auto it = env_.find(name); it != env_.end()) ty = it->second.type;
    expect(Tok::LBracket, "'['");
    std::vector<SliceDim> dims;
    for (;;) {
      SliceDim d;
      d.lo = parse_index_expr();
      if (at(Tok::Colon)) {
        eat();
        d.hi = parse_index_expr();
      }
      dims.push_back(std::move(d));
      if (at(Tok::Comma)) { eat(); continue; }
      break;
    }
    expect(Tok::RBracket, "']'");
    return make_slice(std::move(name), std::move(dims), ty);
  }

  // predicates: comparison chains joined with 'and'
  ExprP parse_pred() {
    ExprP lhs = parse_cmp();
    while (at_ident("and")) {
      eat();
      ExprP rhs = parse_cmp();
      lhs = make_binop(BinOp::And, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  ExprP parse_cmp() {
    ExprP lhs = parse_expr();
    BinOp op;
    switch (peek().kind) {
      case Tok::Eq: op = BinOp::Eq; break;
      case Tok::Ne: op = BinOp::Ne; break;
      case Tok::Lt: op = BinOp::Lt; break;
      case Tok::Le: op = BinOp::Le; break;
      case Tok::Gt: op = BinOp::Gt; break;
      case Tok::Ge: op = BinOp::Ge; break;
      default: return lhs;
    }
    eat();
    ExprP rhs = parse_expr();
    unify_literal_types(lhs, rhs);
    return make_binop(op, std::move(lhs), std::move(rhs));
  }

  ExprP parse_index_expr() { return parse_expr(); }

  ExprP parse_expr() { return parse_add(); }

  ExprP parse_add() {
    ExprP lhs = parse_mul();
    for (;;) {
      BinOp op;
      if (at(Tok::Plus)) op = BinOp::Add;
      else if (at(Tok::Minus)) op = BinOp::Sub;
      else break;
      eat();
      ExprP rhs = parse_mul();
      unify_literal_types(lhs, rhs);
      lhs = make_binop(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  ExprP parse_mul() {
    ExprP lhs = parse_unary();
    for (;;) {
      BinOp op;
      if (at(Tok::Star)) op = BinOp::Mul;
      else if (at(Tok::Slash)) op = BinOp::Div;
      else if (at(Tok::Percent)) op = BinOp::Mod;
      else break;
      eat();
      ExprP rhs = parse_unary();
      unify_literal_types(lhs, rhs);
      lhs = make_binop(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  ExprP parse_unary() {
    if (at(Tok::Minus)) {
      eat();
      ExprP e = parse_unary();
      if (e->kind == ExprKind::Literal) return make_literal(-e->value, e->type);
      return make_binop(BinOp::Sub, make_literal(Rational(0), e->type), e);
    }
    return parse_primary();
  }

  ExprP parse_primary() {
    if (at(Tok::LParen)) {
      eat();
      ExprP e = parse_pred();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (at(Tok::Int)) {
      Token t = eat();
      return make_literal(Rational(std::atoll(t.text.c_str())),
                          ScalarKind::Index);
    }
    if (at(Tok::Float)) {
      Token t = eat();
      size_t dot = t.text.find('.');
      std::string ip = t.text.substr(0, dot);
      std::string fp = t.text.substr(dot + 1);
      long long den = 1;
      for (size_t i = 0; i < fp.size(); ++i) {
        if (den > INT64_MAX / 10) fail("literal has too many digits");
        den *= 10;
      }
      Rational v(std::atoll((ip + fp).c_str()), den);
      return make_literal(v, ScalarKind::F32);
    }
    if (!at(Tok::Ident)) fail("expected expression");
    std::string name = eat().text;
    if (wildcards_ && name == "_")
      return make_var("_", ScalarKind::F32);
    ScalarKind ty = ScalarKind::Index;
    if (auto it = env_.find(name); it != env_.end()) ty = it->second.type;
    if (at(Tok::LBracket)) {
      eat();
      std::vector<ExprP> idx;
      for (;;) {
        idx.push_back(parse_index_expr());
        if (at(Tok::Comma)) { eat(); continue; }
        break;
      }
      expect(Tok::RBracket, "']'");
      return make_read(std::move(name), std::move(idx), ty);
    }
    return make_var(std::move(name), ty);
  }

  // Numeric literals default to Index (ints) / F32 (decimals); operands and
  // assignment contexts coerce them to the surrounding precision.
  static void unify_literal_types(ExprP& a, ExprP& b) {
    if (a->kind == ExprKind::Literal && b->kind != ExprKind::Literal &&
        is_numeric(b->type) && a->type != b->type)
      a = make_literal(a->value, b->type);
    else if (b->kind == ExprKind::Literal && a->kind != ExprKind::Literal &&
             is_numeric(a->type) && b->type != a->type)
      b = make_literal(b->value, a->type);
  }

public:
  static ExprP retype_literals(const ExprP& e, ScalarKind want) {
    if (!is_numeric(want)) return e;
    if (e->kind == ExprKind::Literal && e->type != want &&
        e->type != ScalarKind::Bool)
      return make_literal(e->value, want);
    if (e->kind == ExprKind::Binary && !is_comparison(e->op) &&
        e->op != BinOp::And && e->type != want) {
      ExprP lhs = retype_literals(e->args[0], want);
      ExprP rhs = retype_literals(e->args[1], want);
      if (lhs != e->args[0] || rhs != e->args[1] || e->type != want) {
        auto n = std::make_shared<Expr>(*e);
        n->args = {lhs, rhs};
        n->type = want;
        return n;
      }
    }
    return e;
  }

private:
  Lexer lex_;
  size_t pos_ = 0;
  bool wildcards_;
  ScopeEnv env_;
  std::map<std::string, ProcP> procs_;
};

// --- public entry points -----------------------------------------------------

// Parses and validates every procedure in the file; later procedures may call
// earlier ones (and anything in `preloaded`).
inline std::vector<ProcP> parse_file(const std::string& text,
                                     std::vector<ProcP> preloaded = {}) {
  Parser p(text, std::move(preloaded));
  auto procs = p.parse_file();
  for (const auto& pr : procs) require_wellformed(pr);
  return procs;
}

inline ProcP parse_proc(const std::string& text,
                        std::vector<ProcP> preloaded = {}) {
  auto procs = parse_file(text, std::move(preloaded));
  return procs.back();
}

inline ExprP parse_expr_text(const std::string& text, const ScopeEnv& env = {},
                             bool wildcards = false) {
  Parser p(text, {}, wildcards);
  return p.parse_expr_fragment(env);
}

inline StmtP parse_stmt_text(const std::string& text, const ScopeEnv& env = {},
                             bool wildcards = false) {
  Parser p(text, {}, wildcards);
  return p.parse_stmt_fragment(env);
}

}  // namespace exo2ir
