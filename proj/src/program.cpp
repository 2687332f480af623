// src/program.cpp - Lowering of validated models
#include "mdm/program.hpp"

#include <algorithm>
#include <map>

#include "mdm/errors.hpp"
#include "mdm/validate.hpp"

namespace mdm
{

namespace
{

class Lowering
{
public:
  explicit Lowering(Program & out) : p_(out) {}

  void run(const Model & model)
  {
    p_.name = model.name;
    add_globals(model.vars, SlotRole::Var);
    p_.inputs_begin = p_.slots.size();
    add_globals(model.inputs, SlotRole::Input);
    p_.inputs_end = p_.outputs_begin = p_.slots.size();
    add_globals(model.outputs, SlotRole::Output);
    p_.outputs_end = p_.num_globals = p_.slots.size();

    for (const auto & m : model.modules) module_index_.emplace(m.name, static_cast<std::int32_t>(module_index_.size()));
    for (const auto & m : model.modules) {
      ModuleCode code;
      code.name = m.name;
      std::map<std::string, std::int32_t, std::less<>> locals;
      for (const auto & d : m.locals) {
        const auto slot = static_cast<std::int32_t>(p_.slots.size());
        p_.slots.push_back(Slot{d.name, d.kind, SlotRole::Local, d.init});
        locals.emplace(d.name, slot);
        code.locals.push_back(slot);
      }
      code.cfg = lower_cfg(m.cfg, &locals);
      p_.modules.push_back(std::move(code));
    }

    number_modes(model.root, -1, 0);
    lower_mode(model.root);

    auto schema = std::make_shared<TraceSchema>();
    for (std::size_t i = 0; i < p_.num_globals; ++i) schema->columns.push_back({p_.slots[i].name, p_.slots[i].kind});
    for (auto & mode : p_.modes) {
      if (!mode.leaf) continue;
      std::vector<std::string> names;
      for (std::int32_t at = static_cast<std::int32_t>(&mode - p_.modes.data()); at >= 0; at = p_.modes[at].parent) {
        names.push_back(p_.modes[at].name);
      }
      std::reverse(names.begin(), names.end());
      mode.path_id = static_cast<std::int32_t>(schema->paths.size());
      schema->paths.push_back(ModePath::from_names(std::move(names)));
    }
    p_.schema = std::move(schema);
  }

private:
  void add_globals(const std::vector<VariableDecl> & decls, SlotRole role)
  {
    for (const auto & d : decls) {
      globals_.emplace(d.name, static_cast<std::int32_t>(p_.slots.size()));
      p_.slots.push_back(Slot{d.name, d.kind, role, d.init});
    }
  }

  std::int32_t expr(const Expr & e, const std::map<std::string, std::int32_t, std::less<>> * locals)
  {
    const SlotResolver resolve = [&](std::string_view name) -> std::optional<std::int32_t> {
      if (locals) {
        if (auto it = locals->find(name); it != locals->end()) return it->second;
      }
      if (auto it = globals_.find(name); it != globals_.end()) return it->second;
      return std::nullopt;
    };
    return compile_expr(e, p_.exprs, resolve);
  }

  CfgCode lower_cfg(const Cfg & cfg, const std::map<std::string, std::int32_t, std::less<>> * locals)
  {
    std::map<std::string, std::int32_t, std::less<>> ids;
    for (const auto & n : cfg.nodes) ids.emplace(n.id, static_cast<std::int32_t>(ids.size()));
    const auto id = [&](const std::string & name) { return ids.at(name); };
    const auto slot = [&](const std::string & name) {
      if (locals) {
        if (auto it = locals->find(name); it != locals->end()) return it->second;
      }
      return globals_.at(name);
    };

    CfgCode code;
    code.entry = id(cfg.entry);
    for (const auto & n : cfg.nodes) {
      CfgInstr in;
      std::visit(
        [&](const auto & op) {
          using T = std::decay_t<decltype(op)>;
          if constexpr (std::is_same_v<T, CfgNode::Assign>) {
            in.kind = CfgInstr::Kind::Assign;
            in.slot = slot(op.target);
            in.expr = expr(*op.value, locals);
            in.next = id(op.next);
          } else if constexpr (std::is_same_v<T, CfgNode::Branch>) {
            in.kind = CfgInstr::Kind::Branch;
            in.expr = expr(*op.cond, locals);
            in.next = id(op.then_node);
            in.other = id(op.else_node);
          } else if constexpr (std::is_same_v<T, CfgNode::Call>) {
            in.kind = CfgInstr::Kind::Call;
            in.module = module_index_.at(op.module);
            in.next = id(op.next);
          } else if constexpr (std::is_same_v<T, CfgNode::Nop>) {
            in.kind = CfgInstr::Kind::Nop;
            in.next = id(op.next);
          } else {
            in.kind = CfgInstr::Kind::Exit;
          }
        },
        n.op);
      code.nodes.push_back(in);
    }
    return code;
  }

  std::int32_t number_modes(const Mode & m, std::int32_t parent, std::int32_t depth)
  {
    const auto index = static_cast<std::int32_t>(p_.modes.size());
    ModeCode code;
    code.name = m.name;
    code.period = m.period;
    code.parent = parent;
    code.depth = depth;
    code.leaf = m.is_leaf();
    p_.modes.push_back(std::move(code));
    mode_index_.emplace(m.name, index);
    if (const auto * kids = m.children()) {
      for (const auto & c : *kids) {
        const std::int32_t child = number_modes(c, index, depth + 1);
        p_.modes[index].children.push_back(child);
      }
    }
    p_.modes[index].subtree_end = static_cast<std::int32_t>(p_.modes.size());
    return index;
  }

  void lower_mode(const Mode & m)
  {
    const std::int32_t index = mode_index_.at(m.name);
    if (const auto * leaf = std::get_if<Mode::Leaf>(&m.body)) {
      p_.modes[index].cfg = lower_cfg(leaf->cfg, nullptr);
    } else {
      const auto & comp = std::get<Mode::Composite>(m.body);
      p_.modes[index].initial = mode_index_.at(comp.initial);
      for (const auto & c : comp.children) lower_mode(c);
    }
    std::vector<TransitionCode> transitions;
    for (const auto & t : m.transitions) {
      transitions.push_back(TransitionCode{mode_index_.at(t.target), t.priority, lower_guard(*t.guard, index)});
    }
    std::sort(transitions.begin(), transitions.end(),
              [](const auto & a, const auto & b) { return a.priority < b.priority; });
    p_.modes[index].transitions = std::move(transitions);
  }

  std::int32_t lower_guard(const Guard & g, std::int32_t mode)
  {
    GuardNode node;
    std::visit(
      [&](const auto & n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Guard::Cond>) {
          node.kind = GuardNode::Kind::Cond;
          node.expr = expr(*n.expr, nullptr);
        } else if constexpr (std::is_same_v<T, Guard::Duration>) {
          node.kind = GuardNode::Kind::Duration;
          node.expr = expr(*n.cond, nullptr);
          node.window = n.window;
          node.counter = add_counter(node, mode);
        } else if constexpr (std::is_same_v<T, Guard::After>) {
          node.kind = GuardNode::Kind::After;
          node.window = n.window;
          node.counter = add_counter(node, mode);
        } else if constexpr (std::is_same_v<T, Guard::Not>) {
          node.kind = GuardNode::Kind::Not;
          node.a = lower_guard(*n.operand, mode);
        } else {
          node.kind = std::is_same_v<T, Guard::And> ? GuardNode::Kind::And : GuardNode::Kind::Or;
          node.a = lower_guard(*n.lhs, mode);
          node.b = lower_guard(*n.rhs, mode);
        }
      },
      g.node);
    p_.guards.push_back(node);
    return static_cast<std::int32_t>(p_.guards.size() - 1);
  }

  std::int32_t add_counter(const GuardNode & node, std::int32_t mode)
  {
    const auto id = static_cast<std::int32_t>(p_.temporal.size());
    p_.temporal.push_back(TemporalAtom{node.kind, mode, node.expr, node.window});
    p_.modes[mode].counters.push_back(id);
    return id;
  }

  Program & p_;
  std::map<std::string, std::int32_t, std::less<>> globals_;
  std::map<std::string, std::int32_t, std::less<>> module_index_;
  std::map<std::string, std::int32_t, std::less<>> mode_index_;
};

}  // namespace

Program Program::compile(const Model & model)
{
  const auto diags = validate(model);
  if (!diags.empty()) {
    std::string msg = "model '" + model.name + "' is invalid: " + diags.front().code + ": " + diags.front().message;
    if (diags.size() > 1) msg += " (and " + std::to_string(diags.size() - 1) + " more)";
    throw Error("INVALID_MODEL", msg);
  }
  Program p;
  Lowering(p).run(model);
  return p;
}

std::optional<std::int32_t> Program::global_slot(std::string_view name) const
{
  for (std::size_t i = 0; i < num_globals; ++i) {
    if (slots[i].name == name) return static_cast<std::int32_t>(i);
  }
  return std::nullopt;
}

std::int32_t Program::mode_index(std::string_view name) const
{
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (modes[i].name == name) return static_cast<std::int32_t>(i);
  }
  throw UnknownMode(std::string(name));
}

std::vector<std::int32_t> Program::entry_path(std::int32_t mode) const
{
  std::vector<std::int32_t> path;
  for (std::int32_t at = mode; at >= 0; at = modes[at].parent) path.push_back(at);
  std::reverse(path.begin(), path.end());
  for (std::int32_t at = mode; !modes[at].leaf;) {
    at = modes[at].initial;
    path.push_back(at);
  }
  return path;
}

}  // namespace mdm
