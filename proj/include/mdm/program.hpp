// mdm/program.hpp - A validated model lowered to slot-indexed, executable form
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mdm/ast.hpp"
#include "mdm/expr_eval.hpp"
#include "mdm/trace.hpp"

namespace mdm
{

enum class SlotRole : std::uint8_t { Var, Input, Output, Local };

struct Slot
{
  std::string name;
  ValueKind kind = ValueKind::Int;
  SlotRole role = SlotRole::Var;
  std::variant<std::monostate, Value, InitRange> init;
};

struct CfgInstr
{
  enum class Kind : std::uint8_t { Assign, Branch, Call, Nop, Exit };
  Kind kind = Kind::Exit;
  std::int32_t slot = -1;    // Assign target
  std::int32_t expr = -1;    // Assign value / Branch condition
  std::int32_t next = -1;    // successor, or then-successor of a Branch
  std::int32_t other = -1;   // else-successor of a Branch
  std::int32_t module = -1;  // Call target
};

struct CfgCode
{
  std::vector<CfgInstr> nodes;
  std::int32_t entry = 0;
};

struct ModuleCode
{
  std::string name;
  CfgCode cfg;
  std::vector<std::int32_t> locals;
};

struct GuardNode
{
  enum class Kind : std::uint8_t { Cond, Duration, After, Not, And, Or };
  Kind kind = Kind::Cond;
  std::int32_t expr = -1;     // Cond, Duration condition
  double window = 0.0;        // Duration, After
  std::int32_t a = -1;        // Not, And, Or
  std::int32_t b = -1;        // And, Or
  std::int32_t counter = -1;  // Duration, After
};

/// One duration/after atom and the mode whose residence it measures.
struct TemporalAtom
{
  GuardNode::Kind kind = GuardNode::Kind::After;
  std::int32_t mode = -1;
  std::int32_t cond = -1;  // Duration only
  double window = 0.0;
};

struct TransitionCode
{
  std::int32_t target = -1;
  std::int64_t priority = 1;
  std::int32_t guard = -1;
};

struct ModeCode
{
  std::string name;
  double period = 1.0;
  std::int32_t parent = -1;
  std::int32_t depth = 0;
  std::int32_t subtree_end = 0;  // modes are numbered in preorder; [index, subtree_end) is the subtree
  std::vector<std::int32_t> children;
  std::int32_t initial = -1;
  bool leaf = false;
  std::int32_t path_id = -1;  // leaves only: row of the trace schema's path table
  CfgCode cfg;
  std::vector<TransitionCode> transitions;  // ascending priority
  std::vector<std::int32_t> counters;       // temporal atoms on this mode's transitions
};

class Program
{
public:
  /// Lowers a model. Throws Error("INVALID_MODEL") if validation reports anything.
  static Program compile(const Model & model);

  std::string name;
  std::vector<Slot> slots;  // vars, inputs, outputs, then module locals
  std::size_t num_globals = 0;
  std::size_t inputs_begin = 0;
  std::size_t inputs_end = 0;
  std::size_t outputs_begin = 0;
  std::size_t outputs_end = 0;

  ExprCode exprs;
  std::vector<ModuleCode> modules;
  std::vector<ModeCode> modes;  // index 0 is the root
  std::vector<GuardNode> guards;
  std::vector<TemporalAtom> temporal;
  std::shared_ptr<const TraceSchema> schema;

  std::optional<std::int32_t> global_slot(std::string_view name) const;
  /// Throws UnknownMode.
  std::int32_t mode_index(std::string_view name) const;
  /// Indices root..leaf reached by following `initial` children from `mode`'s ancestors.
  std::vector<std::int32_t> entry_path(std::int32_t mode) const;
};

}  // namespace mdm
