#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "exo2ir/cursor.hpp"
#include "exo2ir/errors.hpp"
#include "exo2ir/ir.hpp"
#include "exo2ir/parser.hpp"
#include "exo2ir/walk.hpp"

namespace exo2ir {

// Statement or expression template in object syntax with `_` wildcards,
// plus an optional "#n" match selector (0-based).
struct Pattern {
  StmtP stmt;
  ExprP expr;
  int selector = -1;
  std::string text;

  bool is_stmt() const { return stmt != nullptr; }
};

namespace pattern_detail {

inline bool is_wild_name(const std::string& n) { return n == "_"; }

inline bool is_wild_expr(const ExprP& e) {
  return e->kind == ExprKind::Var && e->name == "_";
}

inline bool is_wild_stmt(const StmtP& s) {
  return s->kind == StmtKind::Pass && s->name == "_";
}

inline bool match_expr(const ExprP& pat, const ExprP& e);

inline bool match_expr_list(const std::vector<ExprP>& pat,
                            const std::vector<ExprP>& es) {
  if (pat.size() == 1 && is_wild_expr(pat[0])) return true;  // `[_]`
  if (pat.size() != es.size()) return false;
  for (size_t i = 0; i < pat.size(); ++i)
    if (!match_expr(pat[i], es[i])) return false;
  return true;
}

inline bool match_expr(const ExprP& pat, const ExprP& e) {
  if (is_wild_expr(pat)) return true;
  if (pat->kind != e->kind) return false;
  switch (pat->kind) {
    case ExprKind::Literal:
      return pat->value == e->value;
    case ExprKind::Var:
      return pat->name == e->name;
    case ExprKind::Read:
      if (!is_wild_name(pat->name) && pat->name != e->name) return false;
      return match_expr_list(pat->args, e->args);
    case ExprKind::Binary:
      return pat->op == e->op && match_expr(pat->args[0], e->args[0]) &&
             match_expr(pat->args[1], e->args[1]);
    case ExprKind::Slice: {
      if (!is_wild_name(pat->name) && pat->name != e->name) return false;
      if (pat->dims.size() != e->dims.size()) return false;
      for (size_t i = 0; i < pat->dims.size(); ++i) {
        if (pat->dims[i].is_point() != e->dims[i].is_point()) return false;
        if (!match_expr(pat->dims[i].lo, e->dims[i].lo)) return false;
        if (!pat->dims[i].is_point() &&
            !match_expr(pat->dims[i].hi, e->dims[i].hi))
          return false;
      }
      return true;
    }
  }
  return false;
}

inline bool match_stmt(const StmtP& pat, const StmtP& s);

inline bool match_block(const Block& pat, const Block& b) {
  if (pat.size() == 1 && is_wild_stmt(pat[0])) return true;  // `:_`
  if (pat.size() != b.size()) return false;
  for (size_t i = 0; i < pat.size(); ++i)
    if (!match_stmt(pat[i], b[i])) return false;
  return true;
}

inline bool match_stmt(const StmtP& pat, const StmtP& s) {
  if (is_wild_stmt(pat)) return true;
  if (pat->kind != s->kind) return false;
  switch (pat->kind) {
    case StmtKind::For:
      if (!is_wild_name(pat->name) && pat->name != s->name) return false;
      if (!match_expr(pat->lo, s->lo) || !match_expr(pat->hi, s->hi))
        return false;
      return match_block(pat->body, s->body);
    case StmtKind::If:
      if (!match_expr(pat->cond, s->cond)) return false;
      if (!match_block(pat->body, s->body)) return false;
      return match_block(pat->orelse, s->orelse);
    case StmtKind::Assign:
    case StmtKind::Reduce:
      if (!is_wild_name(pat->name) && pat->name != s->name) return false;
      if (!pat->idx.empty() || !s->idx.empty()) {
        if (pat->idx.empty() != s->idx.empty()) return false;
        if (!match_expr_list(pat->idx, s->idx)) return false;
      }
      return match_expr(pat->rhs, s->rhs);
    case StmtKind::Alloc:
      if (!is_wild_name(pat->name) && pat->name != s->name) return false;
      if (pat->type != s->type) return false;
      return match_expr_list(pat->idx, s->idx);
    case StmtKind::Pass:
      return true;
    case StmtKind::Call: {
      if (!is_wild_name(pat->name) && pat->name != s->name) return false;
      if (pat->args.size() == 1 && is_wild_expr(pat->args[0])) return true;
      if (pat->args.size() != s->args.size()) return false;
      for (size_t i = 0; i < pat->args.size(); ++i)
        if (!match_expr(pat->args[i], s->args[i])) return false;
      return true;
    }
  }
  return false;
}

}  // namespace pattern_detail

inline Pattern parse_pattern(const std::string& raw) {
  Pattern pat;
  std::string text = raw;
  // optional trailing "#n" selector
  size_t hash = text.rfind('#');
  if (hash != std::string::npos) {
    size_t i = hash + 1;
    bool digits = i < text.size();
    for (size_t j = i; j < text.size(); ++j)
      if (!std::isdigit((unsigned char)text[j])) digits = false;
    if (digits) {
      pat.selector = std::atoi(text.c_str() + i);
      text = text.substr(0, hash);
      while (!text.empty() && text.back() == ' ') text.pop_back();
    }
  }
  pat.text = text;
  try {
    pat.stmt = parse_stmt_text(text + "\n", {}, /*wildcards=*/true);
    return pat;
  } catch (const ParseError&) {
    // fall through to expression patterns
  }
  pat.expr = parse_expr_text(text, {}, /*wildcards=*/true);
  return pat;
}

// ---------------------------------------------------------------------------
// find / find_all / find_loop
// ---------------------------------------------------------------------------

namespace pattern_detail {

inline std::vector<Cursor> matches_under(const ProcP& proc, const Path& root,
                                         const Pattern& pat) {
  std::vector<Cursor> out;
  StmtVisitor sfn = [&](const Path& path, const StmtP& s) {
    if (pat.is_stmt() && match_stmt(pat.stmt, s))
      out.push_back(Cursor(proc, CursorCore::node(path)));
    return true;
  };
  ExprVisitor efn = [&](const Path& path, const ExprP& e) {
    if (!pat.is_stmt() && match_expr(pat.expr, e))
      out.push_back(Cursor(proc, CursorCore::node(path)));
    return true;
  };
  if (root.empty()) {
    walk_proc(*proc, sfn, efn);
  } else {
    walk_subtree(*proc, root, sfn, efn);
  }
  return out;
}

inline Cursor select(std::vector<Cursor> all, const Pattern& pat) {
  if (all.empty())
    throw NotFoundError("no match for pattern '" + pat.text + "'");
  int n = pat.selector < 0 ? 0 : pat.selector;
  if (n >= (int)all.size())
    throw NotFoundError("pattern '" + pat.text + "' has only " +
                        std::to_string(all.size()) + " matches, wanted #" +
                        std::to_string(n));
  return all[(size_t)n];
}

}  // namespace pattern_detail

inline std::vector<Cursor> find_all(const ProcP& p, const std::string& text) {
  Pattern pat = parse_pattern(text);
  auto all = pattern_detail::matches_under(p, {}, pat);
  if (all.empty())
    throw NotFoundError("no match for pattern '" + pat.text + "'");
  return all;
}

inline Cursor find(const ProcP& p, const std::string& text) {
  Pattern pat = parse_pattern(text);
  return pattern_detail::select(pattern_detail::matches_under(p, {}, pat), pat);
}

// Search restricted to the sub-AST identified by the cursor.
inline std::vector<Cursor> find_all(const Cursor& scope,
                                    const std::string& text) {
  Pattern pat = parse_pattern(text);
  std::vector<Cursor> all;
  if (scope.kind() == CursorKind::Block) {
    for (int i = scope.block_begin(); i < scope.block_end(); ++i) {
      Path root = scope.path();
      root.back().index = i;
      auto part = pattern_detail::matches_under(scope.proc(), root, pat);
      all.insert(all.end(), part.begin(), part.end());
    }
  } else if (scope.kind() == CursorKind::Node) {
    all = pattern_detail::matches_under(scope.proc(), scope.path(), pat);
  } else {
    throw InvalidCursorError("find requires a node or block cursor");
  }
  if (all.empty())
    throw NotFoundError("no match for pattern '" + pat.text + "' in scope");
  return all;
}

inline Cursor find(const Cursor& scope, const std::string& text) {
  Pattern pat = parse_pattern(text);
  std::vector<Cursor> all;
  try {
    all = find_all(scope, text);
  } catch (const NotFoundError&) {
    all.clear();
  }
  return pattern_detail::select(std::move(all), pat);
}

// find_loop(name) == find("for name in _:_"); accepts "name #k".
inline Cursor find_loop(const ProcP& p, const std::string& name) {
  std::string text = name;
  std::string sel;
  size_t hash = text.find('#');
  if (hash != std::string::npos) {
    sel = " " + text.substr(hash);
    text = text.substr(0, hash);
    while (!text.empty() && text.back() == ' ') text.pop_back();
  }
  return find(p, "for " + text + " in _:_" + sel);
}

inline Cursor find_loop(const Cursor& scope, const std::string& name) {
  std::string text = name;
  std::string sel;
  size_t hash = text.find('#');
  if (hash != std::string::npos) {
    sel = " " + text.substr(hash);
    text = text.substr(0, hash);
    while (!text.empty() && text.back() == ' ') text.pop_back();
  }
  return find(scope, "for " + text + " in _:_" + sel);
}

}  // namespace exo2ir
