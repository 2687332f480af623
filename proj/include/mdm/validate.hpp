// mdm/validate.hpp - Static checks over models and formulas
#pragma once

#include <map>
#include <string>
#include <vector>

#include "mdm/ast.hpp"

namespace mdm
{

/// One invariant violation. `code` is stable across releases (DUP_PRIORITY, ...).
struct Diagnostic
{
  std::string code;
  std::string message;
  SourceSpan span;
};

enum class Type : std::uint8_t { Int, Real, Bool, Str };

std::string_view type_name(Type t);

struct TypeEnv
{
  std::map<std::string, ValueKind, std::less<>> vars;
  /// Enables the `mode` / `submode` pseudo-variables of property predicates.
  bool mode_observables = false;
};

/// Pseudo-variables visible to property predicates.
inline constexpr std::string_view kModeObservable = "mode";
inline constexpr std::string_view kSubmodeObservable = "submode";

/// Type of `e` under `env`; int promotes to real in mixed arithmetic.
/// Throws TypeError naming the offending subexpression.
Type typecheck_expr(const Expr & e, const TypeEnv & env);

/// Checks that every predicate of `f` is boolean under `env`. Throws TypeError.
void typecheck_formula(const Formula & f, const TypeEnv & env);

/// Returns one diagnostic per violated model invariant; empty iff well formed.
std::vector<Diagnostic> validate(const Model & model);

/// Global variables of the model plus the mode pseudo-variables.
TypeEnv observables(const Model & model);

/// Root-to-`name` chain of mode names. Throws UnknownMode.
std::vector<std::string> mode_path(const Model & model, std::string_view name);

struct ModeCensus
{
  std::size_t modes = 0;     // every mode below the root container
  std::size_t submodes = 0;  // modes nested inside another non-root mode
  std::vector<std::string> submode_names;
};

ModeCensus mode_census(const Model & model);

/// Words that cannot name a variable.
bool is_reserved_word(std::string_view word);

}  // namespace mdm
