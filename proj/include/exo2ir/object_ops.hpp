#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "exo2ir/edits.hpp"
#include "exo2ir/errors.hpp"
#include "exo2ir/interp.hpp"
#include "exo2ir/ir.hpp"
#include "exo2ir/parser.hpp"
#include "exo2ir/printer.hpp"
#include "exo2ir/subst.hpp"
#include "exo2ir/walk.hpp"

namespace exo2ir {

enum class AssertState { True, False, Undecided };

// Evaluates an assert with some sizes fixed; unresolved names leave the
// predicate undecided.
inline AssertState eval_partial_assert(
    const ExprP& e, const std::map<std::string, long long>& sizes) {
  try {
    return eval_assert_on_sizes(e, sizes) ? AssertState::True
                                          : AssertState::False;
  } catch (const InstanceError&) {
    return AssertState::Undecided;
  }
}

// Substitutes integer values for size parameters, removing them from the
// signature; asserts are re-checked and pruned.
inline ProcP partial_eval(const ProcP& p,
                          const std::map<std::string, long long>& bindings) {
  for (const auto& [name, value] : bindings) {
    bool found = false;
    for (const auto& prm : p->params)
      if (prm.name == name && !prm.is_buffer() &&
          prm.type == ScalarKind::Index)
        found = true;
    if (!found)
      throw SchedulingError("partial_eval: '" + name +
                            "' is not a size parameter of '" + p->name + "'");
    if (value < 0)
      throw SchedulingError("partial_eval: size '" + name +
                            "' must be non-negative");
  }

  // re-check asserts under the bindings before rewriting anything
  std::vector<ExprP> kept_asserts;
  for (const auto& a : p->asserts) {
    switch (eval_partial_assert(a, bindings)) {
      case AssertState::True:
        break;  // discharged
      case AssertState::False:
        throw SchedulingError("partial_eval: binding violates assert '" +
                              print_expr(a) + "' of '" + p->name + "'");
      case AssertState::Undecided: {
        std::map<std::string, ExprP> sub;
        for (const auto& [name, value] : bindings)
          sub[name] = make_literal(Rational(value), ScalarKind::Index);
        kept_asserts.push_back(subst_expr(a, sub));
        break;
      }
    }
  }

  std::map<std::string, ExprP> sub;
  for (const auto& [name, value] : bindings)
    sub[name] = make_literal(Rational(value), ScalarKind::Index);

  EditSession ed(p);
  std::vector<std::pair<Path, std::string>> hits;
  walk_proc(
      *p, [](const Path&, const StmtP&) { return true; },
      [&](const Path& path, const ExprP& e) {
        if (e->kind == ExprKind::Var && bindings.count(e->name))
          hits.emplace_back(path, e->name);
        return true;
      });
  for (const auto& [path, name] : hits) ed.replace_expr(path, sub.at(name));

  std::vector<Param> params;
  for (const auto& prm : p->params) {
    if (bindings.count(prm.name)) continue;
    Param np = prm;
    for (auto& d : np.dims) d = subst_expr(d, sub);
    params.push_back(std::move(np));
  }
  ed.set_params(std::move(params));
  ed.set_asserts(std::move(kept_asserts));
  return ed.finish();
}

// Parameter environment for parsing expression fragments in `p`'s scope.
inline ScopeEnv param_env(const Procedure& p) {
  ScopeEnv env;
  for (const auto& prm : p.params) {
    if (prm.is_buffer())
      env[prm.name] = {Binding::BufferParam, prm.type, prm.dims.size()};
    else if (prm.type == ScalarKind::Index)
      env[prm.name] = {Binding::SizeParam, ScalarKind::Index, 0};
    else
      env[prm.name] = {Binding::ScalarParam, prm.type, 0};
  }
  return env;
}

// Appends a predicate over size parameters to the procedure's asserts.
inline ProcP add_assertion(const ProcP& p, const ExprP& pred) {
  EditSession ed(p);
  std::vector<ExprP> asserts = p->asserts;
  asserts.push_back(pred);
  ed.set_asserts(std::move(asserts));
  ProcP out;
  try {
    out = ed.finish();
  } catch (const InternalError& e) {
    throw WellFormednessError(std::string("add_assertion: ") + e.what());
  }
  auto diags = check_wellformed(out);
  if (!diags.empty())
    throw WellFormednessError("add_assertion: " + diags.front());
  return out;
}

inline ProcP add_assertion(const ProcP& p, const std::string& pred_text) {
  return add_assertion(p, parse_expr_text(pred_text, param_env(*p)));
}

inline ProcP rename(const ProcP& p, const std::string& name) {
  if (name.empty() ||
      !(std::isalpha((unsigned char)name[0]) || name[0] == '_'))
    throw SchedulingError("rename: invalid identifier '" + name + "'");
  for (char c : name)
    if (!(std::isalnum((unsigned char)c) || c == '_'))
      throw SchedulingError("rename: invalid identifier '" + name + "'");
  EditSession ed(p);
  ed.set_name(name);
  return ed.finish();
}

}  // namespace exo2ir
