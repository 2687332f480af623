// mdm/expr_eval.hpp - Slot-resolved expression code and its evaluator
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mdm/ast.hpp"
#include "mdm/trace.hpp"

namespace mdm
{

enum class ExprOp : std::uint8_t {
  Const,
  Load,
  Neg,
  Not,
  Add,
  Sub,
  Mul,
  Div,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  And,
  Or,
  Sqrt,
  Abs,
  Sin,
  Cos,
  Min,
  Max,
  ModeCode,     // numeric code of the first-level mode
  SubmodeCode,  // numeric code of the second-level mode
  ModeIs,       // `mode == "name"`: name anywhere on the active path
  SubmodeIs,    // `submode == "name"`
};

struct ExprInstr
{
  ExprOp op = ExprOp::Const;
  bool negate = false;  // ModeIs / SubmodeIs compiled from `!=`
  std::int32_t a = -1;
  std::int32_t b = -1;
  std::int32_t slot = -1;
  Value constant;
  std::string name;
  std::string text;  // canonical source, for error messages on Load
};

/// Flat pool of compiled expressions; an expression is named by its root index.
struct ExprCode
{
  std::vector<ExprInstr> instrs;
};

struct EvalContext
{
  std::span<const Value> values;
  const ModePath * path = nullptr;
};

/// Resolves a variable name to a slot, or nullopt when unknown.
using SlotResolver = std::function<std::optional<std::int32_t>(std::string_view)>;

/// Appends `e` to `code`; returns its root. The expression must already type-check.
std::int32_t compile_expr(const Expr & e, ExprCode & code, const SlotResolver & resolve,
                          bool mode_observables = false);

/// Throws EvalError on division by zero, sqrt of a negative, or an absent value.
Value evaluate(const ExprCode & code, std::int32_t root, const EvalContext & ctx);

/// Slots read by the expression rooted at `root`.
std::vector<std::int32_t> loaded_slots(const ExprCode & code, std::int32_t root);

}  // namespace mdm
