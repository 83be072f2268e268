#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "exo2ir/errors.hpp"
#include "exo2ir/ir.hpp"
#include "exo2ir/printer.hpp"

namespace exo2ir {

// ---------------------------------------------------------------------------
// Normalized linear-integer expressions: constant + sum(coeff * symbol).
// Floor-div/mod subterms become opaque atom symbols with derived range facts.
// ---------------------------------------------------------------------------

class AffineForm {
public:
  AffineForm() = default;
  explicit AffineForm(Rational c) : constant_(c) {}

  static AffineForm var(const std::string& name, Rational coeff = Rational(1)) {
    AffineForm f;
    if (!coeff.is_zero()) f.coeffs_[name] = coeff;
    return f;
  }

  const Rational& constant() const { return constant_; }
  const std::map<std::string, Rational>& coeffs() const { return coeffs_; }

  bool is_constant() const { return coeffs_.empty(); }
  bool is_zero() const { return coeffs_.empty() && constant_.is_zero(); }

  Rational coeff(const std::string& name) const {
    auto it = coeffs_.find(name);
    return it == coeffs_.end() ? Rational(0) : it->second;
  }

  AffineForm& operator+=(const AffineForm& o) {
    constant_ += o.constant_;
    for (const auto& [v, c] : o.coeffs_) {
      Rational n = coeff(v) + c;
      if (n.is_zero()) coeffs_.erase(v);
      else coeffs_[v] = n;
    }
    return *this;
  }
  AffineForm& operator-=(const AffineForm& o) { return *this += o * Rational(-1); }

  friend AffineForm operator+(AffineForm a, const AffineForm& b) { return a += b; }
  friend AffineForm operator-(AffineForm a, const AffineForm& b) { return a -= b; }

  friend AffineForm operator*(const AffineForm& a, const Rational& k) {
    AffineForm out;
    if (k.is_zero()) return out;
    out.constant_ = a.constant_ * k;
    for (const auto& [v, c] : a.coeffs_) out.coeffs_[v] = c * k;
    return out;
  }

  friend bool operator==(const AffineForm& a, const AffineForm& b) {
    return a.constant_ == b.constant_ && a.coeffs_ == b.coeffs_;
  }

  // substitute a symbol by a form
  AffineForm subst(const std::string& name, const AffineForm& repl) const {
    AffineForm out = *this;
    auto it = out.coeffs_.find(name);
    if (it == out.coeffs_.end()) return out;
    Rational k = it->second;
    out.coeffs_.erase(it);
    out += repl * k;
    return out;
  }

  std::string str() const {
    std::string out;
    for (const auto& [v, c] : coeffs_) {
      if (!out.empty()) out += " + ";
      if (c == Rational(1)) out += v;
      else out += c.str() + "*" + v;
    }
    if (out.empty()) return constant_.str();
    if (!constant_.is_zero()) out += " + " + constant_.str();
    return out;
  }

private:
  Rational constant_;
  std::map<std::string, Rational> coeffs_;
};

// Atoms created for div/mod subterms. The atom's symbol name is the canonical
// rendering, so structurally equal subterms share one symbol.
struct AtomInfo {
  enum Kind { FloorDiv, Mod } kind;
  AffineForm inner;
  long long divisor;
  ExprP original;  // for rendering back into IR
};

class AtomTable {
public:
  // returns the symbol for the atom, creating it if needed
  std::string intern(AtomInfo info) {
    std::string key = (info.kind == AtomInfo::FloorDiv ? "(" : "mod(") +
                      info.inner.str() + (info.kind == AtomInfo::FloorDiv
                                              ? ")/"
                                              : ")%") +
                      std::to_string(info.divisor);
    auto it = atoms_.find(key);
    if (it == atoms_.end()) atoms_.emplace(key, std::move(info));
    return key;
  }

  const AtomInfo* lookup(const std::string& name) const {
    auto it = atoms_.find(name);
    return it == atoms_.end() ? nullptr : &it->second;
  }

  const std::map<std::string, AtomInfo>& all() const { return atoms_; }

private:
  std::map<std::string, AtomInfo> atoms_;
};

// NonAffine is a value, not an error.
using NormResult = std::optional<AffineForm>;

// Normalizes an index expression. div/mod atoms are interned in `atoms`; the
// caller derives their range facts (see FactSet::add_atom_facts).
inline NormResult normalize(const ExprP& e, AtomTable& atoms) {
  switch (e->kind) {
    case ExprKind::Literal:
      if (!e->value.is_integer()) return std::nullopt;
      return AffineForm(e->value);
    case ExprKind::Var:
      return AffineForm::var(e->name);
    case ExprKind::Read:
    case ExprKind::Slice:
      return std::nullopt;
    case ExprKind::Binary: {
      if (is_comparison(e->op) || e->op == BinOp::And) return std::nullopt;
      NormResult a = normalize(e->args[0], atoms);
      if (!a) return std::nullopt;
      if (e->op == BinOp::Div || e->op == BinOp::Mod) {
        if (e->args[1]->kind != ExprKind::Literal ||
            !e->args[1]->value.is_integer() || e->args[1]->value.num() <= 0)
          return std::nullopt;
        long long c = e->args[1]->value.num();
        if (c == 1)
          return e->op == BinOp::Div ? a : NormResult(AffineForm(Rational(0)));
        if (a->is_constant()) {
          Rational q((a->constant() / Rational(c)).floor());
          if (e->op == BinOp::Div) return AffineForm(q);
          return AffineForm(a->constant() - q * Rational(c));
        }
        // e mod c canonicalizes as e - c*(e div c): mod needs no atom of its
        // own and recombinations like 8*(k/8) + k%8 == k fall out linearly
        ExprP div_expr = e->op == BinOp::Div
                             ? e
                             : make_binop(BinOp::Div, e->args[0], e->args[1]);
        AtomInfo info{AtomInfo::FloorDiv, *a, c, div_expr};
        AffineForm q = AffineForm::var(atoms.intern(std::move(info)));
        if (e->op == BinOp::Div) return q;
        return *a - q * Rational(c);
      }
      NormResult b = normalize(e->args[1], atoms);
      if (!b) return std::nullopt;
      switch (e->op) {
        case BinOp::Add: return *a + *b;
        case BinOp::Sub: return *a - *b;
        case BinOp::Mul:
          if (a->is_constant()) return *b * a->constant();
          if (b->is_constant()) return *a * b->constant();
          return std::nullopt;
        default: return std::nullopt;
      }
    }
  }
  return std::nullopt;
}

// Renders an affine form back into an index expression. Requires integer
// coefficients; atom symbols render through their original expressions.
inline ExprP render_affine(const AffineForm& f, const AtomTable& atoms) {
  ExprP out;
  auto add_term = [&](ExprP term) {
    out = out ? make_binop(BinOp::Add, out, std::move(term)) : std::move(term);
  };
  for (const auto& [v, c] : f.coeffs()) {
    if (!c.is_integer())
      throw InternalError("render_affine: non-integer coefficient " + c.str());
    ExprP base;
    if (const AtomInfo* a = atoms.lookup(v)) base = a->original;
    else base = make_var(v, ScalarKind::Index);
    long long k = c.num();
    if (k == 1) add_term(base);
    else
      add_term(make_binop(BinOp::Mul,
                          make_literal(Rational(k), ScalarKind::Index), base));
  }
  if (!f.constant().is_zero() || !out) {
    if (!f.constant().is_integer())
      throw InternalError("render_affine: non-integer constant");
    add_term(make_literal(f.constant(), ScalarKind::Index));
  }
  return out;
}

}  // namespace exo2ir
