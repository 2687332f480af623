// mdm/ast.hpp - Abstract syntax of mode diagram models and interval formulas
//
// Nodes are immutable once built and are shared through shared_ptr<const T>,
// so a parsed model can be handed to many simulation workers at once.
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "mdm/source_span.hpp"
#include "mdm/value.hpp"

namespace mdm
{

// ---------------------------------------------------------------------------
// Expressions

enum class UnaryOp : std::uint8_t { Neg, Not };

enum class BinaryOp : std::uint8_t {
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
};

enum class Builtin : std::uint8_t { Sqrt, Abs, Sin, Cos, Min, Max };

std::string_view op_text(UnaryOp op);
std::string_view op_text(BinaryOp op);
std::string_view builtin_name(Builtin fn);
std::size_t builtin_arity(Builtin fn);
bool is_comparison(BinaryOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr
{
  struct Literal
  {
    Value value;
  };
  /// Only meaningful as an operand of == / != against `mode` or `submode`.
  struct StrLit
  {
    std::string value;
  };
  struct Var
  {
    std::string name;
  };
  struct Unary
  {
    UnaryOp op;
    ExprPtr operand;
  };
  struct Binary
  {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
  };
  struct Call
  {
    Builtin fn;
    std::vector<ExprPtr> args;
  };

  std::variant<Literal, StrLit, Var, Unary, Binary, Call> node;
  SourceSpan span;
};

namespace ex
{
ExprPtr lit(Value v, SourceSpan span = {});
ExprPtr int_lit(std::int64_t v, SourceSpan span = {});
ExprPtr real_lit(double v, SourceSpan span = {});
ExprPtr bool_lit(bool v, SourceSpan span = {});
ExprPtr str_lit(std::string v, SourceSpan span = {});
ExprPtr var(std::string name, SourceSpan span = {});
ExprPtr unary(UnaryOp op, ExprPtr operand, SourceSpan span = {});
ExprPtr binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, SourceSpan span = {});
ExprPtr call(Builtin fn, std::vector<ExprPtr> args, SourceSpan span = {});
}  // namespace ex

// ---------------------------------------------------------------------------
// Transition guards

struct Guard;
using GuardPtr = std::shared_ptr<const Guard>;

struct Guard
{
  /// Plain boolean condition over the current valuation.
  struct Cond
  {
    ExprPtr expr;
  };
  /// `cond` has held at every period end for at least `window` seconds.
  struct Duration
  {
    ExprPtr cond;
    double window;
  };
  /// The owning mode has been active for at least `window` seconds.
  struct After
  {
    double window;
  };
  struct Not
  {
    GuardPtr operand;
  };
  struct And
  {
    GuardPtr lhs;
    GuardPtr rhs;
  };
  struct Or
  {
    GuardPtr lhs;
    GuardPtr rhs;
  };

  std::variant<Cond, Duration, After, Not, And, Or> node;
  SourceSpan span;
};

namespace gd
{
GuardPtr cond(ExprPtr e, SourceSpan span = {});
GuardPtr duration(ExprPtr c, double window, SourceSpan span = {});
GuardPtr after(double window, SourceSpan span = {});
GuardPtr negate(GuardPtr g, SourceSpan span = {});
GuardPtr both(GuardPtr a, GuardPtr b, SourceSpan span = {});
GuardPtr either(GuardPtr a, GuardPtr b, SourceSpan span = {});
}  // namespace gd

// ---------------------------------------------------------------------------
// Control flow graphs

/// Name of the implicit exit node every parsed graph carries.
inline constexpr std::string_view kExitNode = "exit";

struct CfgNode
{
  struct Assign
  {
    std::string target;
    ExprPtr value;
    std::string next;
  };
  struct Branch
  {
    ExprPtr cond;
    std::string then_node;
    std::string else_node;
  };
  struct Call
  {
    std::string module;
    std::string next;
  };
  struct Nop
  {
    std::string next;
  };
  struct Exit
  {
  };

  std::string id;
  std::variant<Assign, Branch, Call, Nop, Exit> op;
  SourceSpan span;
};

/// Nodes in textual order. The parser always appends the Exit node last.
struct Cfg
{
  std::vector<CfgNode> nodes;
  std::string entry{kExitNode};
  std::string exit{kExitNode};

  const CfgNode * find(std::string_view id) const;
};

/// A graph with only the implicit exit node.
Cfg empty_cfg();

// ---------------------------------------------------------------------------
// Declarations, modes, models

struct InitRange
{
  Value lo;
  Value hi;
};

struct VariableDecl
{
  std::string name;
  ValueKind kind = ValueKind::Int;
  /// monostate: zero of `kind`; Value: fixed; InitRange: sampled uniformly.
  std::variant<std::monostate, Value, InitRange> init;
  SourceSpan span;
};

struct ModuleDef
{
  std::string name;
  std::vector<VariableDecl> locals;
  Cfg cfg;
  SourceSpan span;
};

struct Transition
{
  std::string target;
  std::int64_t priority = 1;
  GuardPtr guard;
  SourceSpan span;
};

struct Mode
{
  struct Composite
  {
    std::vector<Mode> children;
    std::string initial;
  };
  struct Leaf
  {
    Cfg cfg;
  };

  std::string name;
  double period = 1.0;
  std::variant<Composite, Leaf> body;
  std::vector<Transition> transitions;
  SourceSpan span;

  bool is_leaf() const { return std::holds_alternative<Leaf>(body); }
  const std::vector<Mode> * children() const;
  const Mode * child(std::string_view name) const;
};

struct Model
{
  std::string name;
  std::vector<VariableDecl> vars;
  std::vector<VariableDecl> inputs;
  std::vector<VariableDecl> outputs;
  std::vector<ModuleDef> modules;
  Mode root;
  SourceSpan span;

  const ModuleDef * module(std::string_view name) const;
};

// ---------------------------------------------------------------------------
// Interval formulas

enum class Connective : std::uint8_t { And, Or, Implies, Chop };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula
{
  struct True
  {
  };
  /// State predicate; holds on an interval when it holds at every snapshot.
  struct Pred
  {
    ExprPtr expr;
  };
  /// Interval length (seconds between first and last snapshot) against a bound.
  struct Len
  {
    BinaryOp cmp;
    double seconds;
  };
  struct Not
  {
    FormulaPtr operand;
  };
  struct Binary
  {
    Connective op;
    FormulaPtr lhs;
    FormulaPtr rhs;
  };
  struct Box
  {
    FormulaPtr operand;
  };

  std::variant<True, Pred, Len, Not, Binary, Box> node;
  SourceSpan span;
};

namespace fm
{
FormulaPtr tt();
FormulaPtr pred(ExprPtr e, SourceSpan span = {});
FormulaPtr len(BinaryOp cmp, double seconds);
FormulaPtr negate(FormulaPtr f);
FormulaPtr binary(Connective op, FormulaPtr a, FormulaPtr b);
FormulaPtr conj(FormulaPtr a, FormulaPtr b);
FormulaPtr disj(FormulaPtr a, FormulaPtr b);
FormulaPtr implies(FormulaPtr a, FormulaPtr b);
FormulaPtr chop(FormulaPtr a, FormulaPtr b);
FormulaPtr box(FormulaPtr f);
}  // namespace fm

struct Property
{
  std::string name;
  FormulaPtr formula;
  SourceSpan span;
};

// ---------------------------------------------------------------------------
// Structural equality (spans ignored)

bool same_structure(const Expr & a, const Expr & b);
bool same_structure(const Guard & a, const Guard & b);
bool same_structure(const Cfg & a, const Cfg & b);
bool same_structure(const Mode & a, const Mode & b);
bool same_structure(const Model & a, const Model & b);
bool same_structure(const Formula & a, const Formula & b);

}  // namespace mdm
