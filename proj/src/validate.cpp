// src/validate.cpp - Model validation and expression type checking
#include "mdm/validate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "mdm/errors.hpp"
#include "mdm/printer.hpp"

namespace mdm
{

std::string_view type_name(Type t)
{
  switch (t) {
    case Type::Int:
      return "int";
    case Type::Real:
      return "real";
    case Type::Bool:
      return "bool";
    case Type::Str:
      return "string";
  }
  return "?";
}

bool is_reserved_word(std::string_view word)
{
  static const std::set<std::string, std::less<>> words = {
    "model", "var",  "input", "output", "module", "mode",     "submode",  "init", "period", "graph",
    "transition", "to", "priority", "when", "duration", "after", "if", "else", "call", "nop",
    "int",   "real", "bool",  "true",   "false",  "in",       "tt",       "len",  "prop",   "exit",
    "sqrt",  "abs",  "sin",   "cos",    "min",    "max"};
  return words.count(word) > 0;
}

// ---------------------------------------------------------------------------
// Type checking

namespace
{

Type of_kind(ValueKind k)
{
  switch (k) {
    case ValueKind::Int:
      return Type::Int;
    case ValueKind::Real:
      return Type::Real;
    case ValueKind::Bool:
      return Type::Bool;
  }
  return Type::Int;
}

bool numeric(Type t) { return t == Type::Int || t == Type::Real; }

[[noreturn]] void type_fail(const Expr & e, const std::string & message)
{
  throw TypeError(message + " in '" + print(e) + "'", e.span, print(e));
}

bool is_mode_var(const Expr & e, const TypeEnv & env)
{
  const auto * v = std::get_if<Expr::Var>(&e.node);
  return env.mode_observables && v != nullptr &&
         (v->name == kModeObservable || v->name == kSubmodeObservable) && env.vars.count(v->name) == 0;
}

}  // namespace

Type typecheck_expr(const Expr & e, const TypeEnv & env)
{
  return std::visit(
    [&](const auto & n) -> Type {
      using T = std::decay_t<decltype(n)>;
      if constexpr (std::is_same_v<T, Expr::Literal>) {
        return of_kind(n.value.kind());
      } else if constexpr (std::is_same_v<T, Expr::StrLit>) {
        type_fail(e, "string literal outside a mode comparison");
      } else if constexpr (std::is_same_v<T, Expr::Var>) {
        if (auto it = env.vars.find(n.name); it != env.vars.end()) return of_kind(it->second);
        if (is_mode_var(e, env)) return Type::Int;
        type_fail(e, "unknown variable '" + n.name + "'");
      } else if constexpr (std::is_same_v<T, Expr::Unary>) {
        const Type t = typecheck_expr(*n.operand, env);
        if (n.op == UnaryOp::Neg) {
          if (!numeric(t)) type_fail(e, "negation of non-numeric operand");
          return t;
        }
        if (t != Type::Bool) type_fail(e, "logical not of non-bool operand");
        return Type::Bool;
      } else if constexpr (std::is_same_v<T, Expr::Binary>) {
        if (n.op == BinaryOp::Eq || n.op == BinaryOp::Ne) {
          const bool lstr = std::holds_alternative<Expr::StrLit>(n.lhs->node);
          const bool rstr = std::holds_alternative<Expr::StrLit>(n.rhs->node);
          if (lstr || rstr) {
            const Expr & other = lstr ? *n.rhs : *n.lhs;
            if (lstr && rstr) type_fail(e, "comparison of two string literals");
            if (!is_mode_var(other, env)) type_fail(e, "string literal compared with a non-mode operand");
            return Type::Bool;
          }
        }
        const Type lt = typecheck_expr(*n.lhs, env);
        const Type rt = typecheck_expr(*n.rhs, env);
        switch (n.op) {
          case BinaryOp::Add:
          case BinaryOp::Sub:
          case BinaryOp::Mul:
          case BinaryOp::Div:
            if (!numeric(lt) || !numeric(rt)) type_fail(e, "arithmetic on non-numeric operands");
            return (lt == Type::Int && rt == Type::Int) ? Type::Int : Type::Real;
          case BinaryOp::Eq:
          case BinaryOp::Ne:
            if ((numeric(lt) && numeric(rt)) || (lt == Type::Bool && rt == Type::Bool)) return Type::Bool;
            type_fail(e, "equality between incompatible types");
          case BinaryOp::Lt:
          case BinaryOp::Le:
          case BinaryOp::Gt:
          case BinaryOp::Ge:
            if (!numeric(lt) || !numeric(rt)) type_fail(e, "ordering comparison on non-numeric operands");
            return Type::Bool;
          case BinaryOp::And:
          case BinaryOp::Or:
            if (lt != Type::Bool || rt != Type::Bool) type_fail(e, "logical connective on non-bool operands");
            return Type::Bool;
        }
        return Type::Bool;
      } else {
        std::vector<Type> args;
        for (const auto & a : n.args) args.push_back(typecheck_expr(*a, env));
        if (args.size() != builtin_arity(n.fn)) type_fail(e, "wrong number of arguments");
        for (Type t : args) {
          if (!numeric(t)) type_fail(e, std::string(builtin_name(n.fn)) + " of non-numeric argument");
        }
        switch (n.fn) {
          case Builtin::Sqrt:
          case Builtin::Sin:
          case Builtin::Cos:
            return Type::Real;
          case Builtin::Abs:
            return args[0];
          case Builtin::Min:
          case Builtin::Max:
            return (args[0] == Type::Int && args[1] == Type::Int) ? Type::Int : Type::Real;
        }
        return Type::Real;
      }
    },
    e.node);
}

void typecheck_formula(const Formula & f, const TypeEnv & env)
{
  std::visit(
    [&](const auto & n) {
      using T = std::decay_t<decltype(n)>;
      if constexpr (std::is_same_v<T, Formula::Pred>) {
        if (typecheck_expr(*n.expr, env) != Type::Bool) type_fail(*n.expr, "state predicate is not boolean");
      } else if constexpr (std::is_same_v<T, Formula::Not> || std::is_same_v<T, Formula::Box>) {
        typecheck_formula(*n.operand, env);
      } else if constexpr (std::is_same_v<T, Formula::Binary>) {
        typecheck_formula(*n.lhs, env);
        typecheck_formula(*n.rhs, env);
      }
    },
    f.node);
}

TypeEnv observables(const Model & model)
{
  TypeEnv env;
  for (const auto * list : {&model.vars, &model.inputs, &model.outputs}) {
    for (const auto & d : *list) env.vars.emplace(d.name, d.kind);
  }
  env.mode_observables = true;
  return env;
}

// ---------------------------------------------------------------------------
// Validation

namespace
{

void collect_free_vars(const Expr & e, std::vector<const Expr *> & out)
{
  std::visit(
    [&](const auto & n) {
      using T = std::decay_t<decltype(n)>;
      if constexpr (std::is_same_v<T, Expr::Var>) {
        out.push_back(&e);
      } else if constexpr (std::is_same_v<T, Expr::Unary>) {
        collect_free_vars(*n.operand, out);
      } else if constexpr (std::is_same_v<T, Expr::Binary>) {
        collect_free_vars(*n.lhs, out);
        collect_free_vars(*n.rhs, out);
      } else if constexpr (std::is_same_v<T, Expr::Call>) {
        for (const auto & a : n.args) collect_free_vars(*a, out);
      }
    },
    e.node);
}

class Validator
{
public:
  explicit Validator(const Model & m) : model_(m) {}

  std::vector<Diagnostic> run()
  {
    check_globals();
    check_modules();
    check_call_graph();
    std::set<std::string> mode_names;
    collect_mode_names(model_.root, mode_names);
    check_mode(model_.root, nullptr);
    return std::move(diags_);
  }

private:
  void report(std::string code, std::string message, const SourceSpan & span)
  {
    diags_.push_back(Diagnostic{std::move(code), std::move(message), span});
  }

  void check_decl(const VariableDecl & d, bool local)
  {
    if (is_reserved_word(d.name)) {
      report("RESERVED_NAME", "'" + d.name + "' is a reserved word", d.span);
    }
    auto kind_ok = [&](const Value & v) {
      if (!v.present()) return false;
      if (d.kind == ValueKind::Real) return v.is_numeric();
      return v.kind() == d.kind;
    };
    if (const auto * v = std::get_if<Value>(&d.init)) {
      if (!kind_ok(*v)) {
        report("INIT_KIND_MISMATCH", "initial value of '" + d.name + "' does not match its kind", d.span);
      }
    } else if (const auto * r = std::get_if<InitRange>(&d.init)) {
      if (local) {
        report("LOCAL_INIT_RANGE", "module local '" + d.name + "' must have a fixed initial value", d.span);
      }
      if (d.kind == ValueKind::Bool) {
        report("BAD_INIT_RANGE", "bool variable '" + d.name + "' cannot be initialised from a range", d.span);
      } else if (!kind_ok(r->lo) || !kind_ok(r->hi)) {
        report("INIT_KIND_MISMATCH", "range bounds of '" + d.name + "' do not match its kind", d.span);
      } else if (r->lo.as_real() > r->hi.as_real() || std::isnan(r->lo.as_real()) ||
                 std::isnan(r->hi.as_real())) {
        report("BAD_INIT_RANGE", "empty initial range for '" + d.name + "'", d.span);
      }
    }
  }

  void check_globals()
  {
    for (const auto * list : {&model_.vars, &model_.inputs, &model_.outputs}) {
      for (const auto & d : *list) {
        check_decl(d, false);
        if (!globals_.vars.emplace(d.name, d.kind).second) {
          report("DUP_NAME", "variable '" + d.name + "' declared twice", d.span);
        }
      }
    }
  }

  void check_modules()
  {
    std::set<std::string> names;
    for (const auto & m : model_.modules) {
      if (!names.insert(m.name).second) {
        report("DUP_NAME", "module '" + m.name + "' defined twice", m.span);
      }
      TypeEnv env = globals_;
      std::set<std::string> local_names;
      for (const auto & d : m.locals) {
        check_decl(d, true);
        if (globals_.vars.count(d.name) > 0) {
          report("LOCAL_SHADOWS", "local '" + d.name + "' of module '" + m.name + "' shadows a global", d.span);
        } else if (!local_names.insert(d.name).second) {
          report("DUP_NAME", "local '" + d.name + "' declared twice in module '" + m.name + "'", d.span);
        } else {
          env.vars.emplace(d.name, d.kind);
        }
      }
      check_cfg(m.cfg, env, "module '" + m.name + "'", m.span);
    }
  }

  void check_call_graph()
  {
    // Depth-first search for a cycle among module calls.
    std::map<std::string, std::vector<std::string>> edges;
    for (const auto & m : model_.modules) {
      for (const auto & n : m.cfg.nodes) {
        if (const auto * c = std::get_if<CfgNode::Call>(&n.op)) edges[m.name].push_back(c->module);
      }
    }
    std::map<std::string, int> state;  // 0 new, 1 on stack, 2 done
    std::set<std::string> reported;
    std::function<void(const ModuleDef &)> dfs = [&](const ModuleDef & m) {
      state[m.name] = 1;
      for (const auto & callee : edges[m.name]) {
        const auto * target = model_.module(callee);
        if (target == nullptr) continue;
        if (state[callee] == 1) {
          if (reported.insert(callee).second) {
            report("RECURSIVE_CALL", "module '" + callee + "' is called recursively", target->span);
          }
        } else if (state[callee] == 0) {
          dfs(*target);
        }
      }
      state[m.name] = 2;
    };
    for (const auto & m : model_.modules) {
      if (state[m.name] == 0) dfs(m);
    }
  }

  void check_expr(const Expr & e, const TypeEnv & env, std::optional<Type> want, const std::string & what)
  {
    std::vector<const Expr *> vars;
    collect_free_vars(e, vars);
    bool undefined = false;
    for (const auto * v : vars) {
      const auto & name = std::get<Expr::Var>(v->node).name;
      if (env.vars.count(name) == 0) {
        report("UNDEF_VAR", "undefined variable '" + name + "' in " + what, v->span);
        undefined = true;
      }
    }
    if (undefined) return;
    try {
      const Type t = typecheck_expr(e, env);
      if (want && !(t == *want || (*want == Type::Real && t == Type::Int))) {
        report("TYPE_ERROR",
               what + " has type " + std::string(type_name(t)) + ", expected " + std::string(type_name(*want)),
               e.span);
      }
    } catch (const TypeError & err) {
      report("TYPE_ERROR", std::string(err.what()) + " (" + what + ")", err.span());
    }
  }

  void check_cfg(const Cfg & cfg, const TypeEnv & env, const std::string & owner, const SourceSpan & owner_span)
  {
    std::map<std::string, const CfgNode *> by_id;
    for (const auto & n : cfg.nodes) {
      if (!by_id.emplace(n.id, &n).second) {
        report("CFG_DUP_NODE", "duplicate node '" + n.id + "' in " + owner, n.span);
      }
    }
    const auto exit_it = by_id.find(cfg.exit);
    if (exit_it == by_id.end() || !std::holds_alternative<CfgNode::Exit>(exit_it->second->op)) {
      report("CFG_BAD_EXIT", "graph of " + owner + " has no exit node '" + cfg.exit + "'", owner_span);
      return;
    }
    if (by_id.count(cfg.entry) == 0) {
      report("CFG_UNDEF_NODE", "entry node '" + cfg.entry + "' of " + owner + " does not exist", owner_span);
      return;
    }

    std::map<std::string, std::vector<std::string>> succ;
    bool dangling = false;
    for (const auto & n : cfg.nodes) {
      auto link = [&](const std::string & target) {
        if (by_id.count(target) == 0) {
          report("CFG_UNDEF_NODE", "node '" + n.id + "' of " + owner + " jumps to unknown node '" + target + "'",
                 n.span);
          dangling = true;
        } else {
          succ[n.id].push_back(target);
        }
      };
      std::visit(
        [&](const auto & op) {
          using T = std::decay_t<decltype(op)>;
          const std::string where = "node '" + n.id + "' of " + owner;
          if constexpr (std::is_same_v<T, CfgNode::Assign>) {
            if (auto it = env.vars.find(op.target); it == env.vars.end()) {
              report("UNDEF_VAR", "assignment to undeclared variable '" + op.target + "' in " + where, n.span);
            } else {
              Type want = of_kind(it->second);
              check_expr(*op.value, env, want, "assignment in " + where);
            }
            link(op.next);
          } else if constexpr (std::is_same_v<T, CfgNode::Branch>) {
            check_expr(*op.cond, env, Type::Bool, "branch condition in " + where);
            link(op.then_node);
            link(op.else_node);
          } else if constexpr (std::is_same_v<T, CfgNode::Call>) {
            if (model_.module(op.module) == nullptr) {
              report("UNDEF_MODULE", "call to undefined module '" + op.module + "' in " + where, n.span);
            }
            link(op.next);
          } else if constexpr (std::is_same_v<T, CfgNode::Nop>) {
            link(op.next);
          } else {
            if (n.id != cfg.exit) {
              report("CFG_BAD_EXIT", "second exit node '" + n.id + "' in " + owner, n.span);
            }
          }
        },
        n.op);
    }
    if (dangling) return;

    // Cycle detection and reachability from entry.
    std::map<std::string, int> state;
    bool cyclic = false;
    std::function<void(const std::string &)> dfs = [&](const std::string & id) {
      state[id] = 1;
      for (const auto & s : succ[id]) {
        if (state[s] == 1) {
          if (!cyclic) report("CFG_CYCLE", "graph of " + owner + " contains a cycle through '" + s + "'", by_id[s]->span);
          cyclic = true;
        } else if (state[s] == 0) {
          dfs(s);
        }
      }
      state[id] = 2;
    };
    dfs(cfg.entry);
    for (const auto & n : cfg.nodes) {
      if (state[n.id] == 0 && n.id != cfg.exit) {
        report("CFG_UNREACHABLE", "node '" + n.id + "' of " + owner + " is unreachable from the entry", n.span);
      }
    }
    if (cyclic) return;

    // Exit must be reachable from every node.
    std::map<std::string, bool> reaches;
    std::function<bool(const std::string &)> to_exit = [&](const std::string & id) -> bool {
      if (id == cfg.exit) return true;
      if (auto it = reaches.find(id); it != reaches.end()) return it->second;
      reaches[id] = false;
      bool ok = false;
      for (const auto & s : succ[id]) ok = to_exit(s) || ok;
      reaches[id] = ok;
      return ok;
    };
    for (const auto & n : cfg.nodes) {
      if (state[n.id] != 0 && !to_exit(n.id)) {
        report("CFG_NO_EXIT_PATH", "node '" + n.id + "' of " + owner + " cannot reach the exit", n.span);
      }
    }
  }

  void collect_mode_names(const Mode & m, std::set<std::string> & names)
  {
    if (!names.insert(m.name).second) {
      report("DUP_NAME", "mode '" + m.name + "' declared twice", m.span);
    }
    if (const auto * kids = m.children()) {
      for (const auto & k : *kids) collect_mode_names(k, names);
    }
    all_modes_.insert(m.name);
  }

  void check_guard(const Guard & g, const std::string & where)
  {
    std::visit(
      [&](const auto & n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Guard::Cond>) {
          check_expr(*n.expr, globals_, Type::Bool, "guard of " + where);
        } else if constexpr (std::is_same_v<T, Guard::Duration>) {
          check_expr(*n.cond, globals_, Type::Bool, "duration condition of " + where);
          if (!(n.window > 0.0) || !std::isfinite(n.window)) {
            report("NONPOSITIVE_WINDOW", "duration window must be positive in " + where, g.span);
          }
        } else if constexpr (std::is_same_v<T, Guard::After>) {
          if (!(n.window > 0.0) || !std::isfinite(n.window)) {
            report("NONPOSITIVE_WINDOW", "after window must be positive in " + where, g.span);
          }
        } else if constexpr (std::is_same_v<T, Guard::Not>) {
          check_guard(*n.operand, where);
        } else {
          check_guard(*n.lhs, where);
          check_guard(*n.rhs, where);
        }
      },
      g.node);
  }

  void check_mode(const Mode & m, const Mode * parent)
  {
    if (!(m.period > 0.0) || !std::isfinite(m.period)) {
      report("NONPOSITIVE_PERIOD", "mode '" + m.name + "' must have a positive period", m.span);
    }
    if (const auto * leaf = std::get_if<Mode::Leaf>(&m.body)) {
      check_cfg(leaf->cfg, globals_, "mode '" + m.name + "'", m.span);
    } else {
      const auto & comp = std::get<Mode::Composite>(m.body);
      if (comp.children.empty()) {
        report("EMPTY_COMPOSITE", "composite mode '" + m.name + "' has no children", m.span);
      } else if (m.child(comp.initial) == nullptr) {
        report("BAD_INITIAL",
               comp.initial.empty() ? "composite mode '" + m.name + "' declares no initial child"
                                    : "initial child '" + comp.initial + "' of '" + m.name + "' is not a child",
               m.span);
      }
      for (const auto & c : comp.children) check_mode(c, &m);
    }

    std::map<std::int64_t, const Transition *> priorities;
    for (const auto & t : m.transitions) {
      const std::string where = "transition " + m.name + " -> " + t.target;
      if (t.priority < 1) {
        report("BAD_PRIORITY", "priority of " + where + " must be at least 1", t.span);
      } else if (!priorities.emplace(t.priority, &t).second) {
        report("DUP_PRIORITY",
               "priority " + std::to_string(t.priority) + " used twice on transitions out of '" + m.name + "'",
               t.span);
      }
      if (all_modes_.count(t.target) == 0) {
        report("UNDEF_TARGET", "target of " + where + " is not a mode", t.span);
      } else if (parent == nullptr || t.target == m.name || parent->child(t.target) == nullptr) {
        report("NON_SIBLING_TARGET", "target of " + where + " is not a sibling of '" + m.name + "'", t.span);
      }
      if (t.guard) {
        check_guard(*t.guard, where);
      } else {
        report("TYPE_ERROR", where + " has no guard", t.span);
      }
    }
  }

  const Model & model_;
  TypeEnv globals_;
  std::set<std::string> all_modes_;
  std::vector<Diagnostic> diags_;
};

bool find_path(const Mode & m, std::string_view name, std::vector<std::string> & path)
{
  path.push_back(m.name);
  if (m.name == name) return true;
  if (const auto * kids = m.children()) {
    for (const auto & k : *kids) {
      if (find_path(k, name, path)) return true;
    }
  }
  path.pop_back();
  return false;
}

void census(const Mode & m, int depth, ModeCensus & out)
{
  if (depth >= 1) ++out.modes;
  if (depth >= 2) {
    ++out.submodes;
    out.submode_names.push_back(m.name);
  }
  if (const auto * kids = m.children()) {
    for (const auto & k : *kids) census(k, depth + 1, out);
  }
}

}  // namespace

std::vector<Diagnostic> validate(const Model & model) { return Validator(model).run(); }

std::vector<std::string> mode_path(const Model & model, std::string_view name)
{
  std::vector<std::string> path;
  if (!find_path(model.root, name, path)) throw UnknownMode(std::string(name));
  return path;
}

ModeCensus mode_census(const Model & model)
{
  ModeCensus out;
  census(model.root, 0, out);
  return out;
}

}  // namespace mdm
