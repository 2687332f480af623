// tests/support.hpp - Random AST, model and trace generators shared by the test suites
#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "mdm/ast.hpp"
#include "mdm/environment.hpp"
#include "mdm/program.hpp"
#include "mdm/rng.hpp"
#include "mdm/trace.hpp"

namespace mdm_test
{

using namespace mdm;

class Gen
{
public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  int range(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(eng_); }
  template <typename T>
  const T & pick(const std::vector<T> & items)
  {
    return items[static_cast<std::size_t>(range(0, static_cast<int>(items.size()) - 1))];
  }
  std::mt19937_64 & engine() { return eng_; }

private:
  std::mt19937_64 eng_;
};

// ---------------------------------------------------------------------------
// Syntactic generators. Every tree they build is one the parser can produce,
// so parse(print(x)) must reproduce it exactly.

inline const std::vector<std::string> & syntax_vars()
{
  static const std::vector<std::string> names = {"x", "y", "gm", "SK12", "wx", "rate"};
  return names;
}

inline ExprPtr random_literal(Gen & g)
{
  switch (g.range(0, 3)) {
    case 0:
      return ex::int_lit(g.range(0, 1000));
    case 1: {
      static const std::vector<double> reals = {0.0, 0.5, 2.25, 1e-3, 1e10, 123.456, 0.1};
      return ex::real_lit(g.pick(reals));
    }
    case 2:
      return ex::bool_lit(g.chance(0.5));
    default:
      return ex::int_lit(g.range(0, 9));
  }
}

inline ExprPtr random_expr(Gen & g, int depth)
{
  if (depth <= 0 || g.chance(0.25)) {
    return g.chance(0.5) ? ex::var(g.pick(syntax_vars())) : random_literal(g);
  }
  switch (g.range(0, 5)) {
    case 0:
      return ex::unary(g.chance(0.5) ? UnaryOp::Neg : UnaryOp::Not, random_expr(g, depth - 1));
    case 1: {
      const Builtin fn = static_cast<Builtin>(g.range(0, 5));
      std::vector<ExprPtr> args;
      for (std::size_t i = 0; i < builtin_arity(fn); ++i) args.push_back(random_expr(g, depth - 1));
      return ex::call(fn, std::move(args));
    }
    default: {
      const BinaryOp op = static_cast<BinaryOp>(g.range(0, 11));
      return ex::binary(op, random_expr(g, depth - 1), random_expr(g, depth - 1));
    }
  }
}

/// An expression a formula atom or guard atom can start with: no top-level
/// boolean connective and no leading `!`.
inline ExprPtr random_atom_expr(Gen & g, int depth)
{
  while (true) {
    auto e = random_expr(g, depth);
    if (const auto * b = std::get_if<Expr::Binary>(&e->node)) {
      if (b->op == BinaryOp::And || b->op == BinaryOp::Or) continue;
    }
    if (const auto * u = std::get_if<Expr::Unary>(&e->node)) {
      if (u->op == UnaryOp::Not) continue;
    }
    return e;
  }
}

inline double random_window(Gen & g) { return 0.25 * g.range(1, 200); }

/// Guards containing at least one temporal atom below every connective, which
/// is the normal form the parser returns.
inline GuardPtr random_temporal_guard(Gen & g, int depth)
{
  if (depth <= 0 || g.chance(0.3)) {
    return g.chance(0.6) ? gd::duration(random_expr(g, 2), random_window(g)) : gd::after(random_window(g));
  }
  auto other = [&]() {
    return g.chance(0.5) ? random_temporal_guard(g, depth - 1) : gd::cond(random_expr(g, 2));
  };
  switch (g.range(0, 4)) {
    case 0:
      return gd::negate(random_temporal_guard(g, depth - 1));
    case 1:
      return gd::both(random_temporal_guard(g, depth - 1), other());
    case 2:
      return gd::both(other(), random_temporal_guard(g, depth - 1));
    case 3:
      return gd::either(random_temporal_guard(g, depth - 1), other());
    default:
      return gd::either(other(), random_temporal_guard(g, depth - 1));
  }
}

inline GuardPtr random_guard(Gen & g, int depth)
{
  if (g.chance(0.25)) {
    // Plain conditions may carry any boolean structure.
    return gd::cond(random_expr(g, 3));
  }
  return random_temporal_guard(g, depth);
}

inline FormulaPtr random_syntax_formula(Gen & g, int depth)
{
  if (depth <= 0 || g.chance(0.2)) {
    switch (g.range(0, 3)) {
      case 0:
        return fm::tt();
      case 1: {
        static const std::vector<double> secs = {0, 1, 2.5, 600, 0.25};
        return fm::len(static_cast<BinaryOp>(g.range(4, 9)), g.pick(secs));
      }
      case 2:
        return fm::pred(ex::binary(BinaryOp::Eq, ex::var("mode"), g.chance(0.5) ? ex::int_lit(g.range(0, 10))
                                                                               : ex::str_lit("m" + std::to_string(g.range(0, 10)))));
      default:
        return fm::pred(random_atom_expr(g, 3));
    }
  }
  switch (g.range(0, 5)) {
    case 0:
      return fm::negate(random_syntax_formula(g, depth - 1));
    case 1:
      return fm::box(random_syntax_formula(g, depth - 1));
    default:
      return fm::binary(static_cast<Connective>(g.range(0, 3)), random_syntax_formula(g, depth - 1),
                        random_syntax_formula(g, depth - 1));
  }
}

inline Cfg random_syntax_cfg(Gen & g, const std::vector<std::string> & modules)
{
  Cfg cfg;
  const int n = g.range(0, 5);
  auto label = [](int i) { return "n" + std::to_string(i); };
  auto some_target = [&](int i) {
    const int t = g.range(0, n);
    return t == n ? std::string(kExitNode) : label(t == i ? (i + 1 < n ? i + 1 : 0) : t);
  };
  for (int i = 0; i < n; ++i) {
    CfgNode node;
    node.id = label(i);
    const int kind = g.range(0, modules.empty() ? 2 : 3);
    if (kind == 0) {
      node.op = CfgNode::Assign{g.pick(syntax_vars()), random_expr(g, 3), some_target(i)};
    } else if (kind == 1) {
      node.op = CfgNode::Branch{random_expr(g, 2), some_target(i), some_target(i)};
    } else if (kind == 2) {
      node.op = CfgNode::Nop{some_target(i)};
    } else {
      node.op = CfgNode::Call{g.pick(modules), some_target(i)};
    }
    cfg.nodes.push_back(std::move(node));
  }
  cfg.entry = n == 0 ? std::string(kExitNode) : label(0);
  cfg.nodes.push_back(CfgNode{std::string(kExitNode), CfgNode::Exit{}, {}});
  return cfg;
}

inline VariableDecl random_decl(Gen & g, const std::string & name)
{
  VariableDecl d;
  d.name = name;
  d.kind = static_cast<ValueKind>(g.range(0, 2));
  switch (g.range(0, 2)) {
    case 0:
      break;
    case 1:
      d.init = std::get<Expr::Literal>(random_literal(g)->node).value;
      break;
    default:
      // Signed bounds exercise the `-` literal prefix.
      d.init = InitRange{Value::of_int(-g.range(0, 5)), Value::of_real(g.range(0, 50) * 0.5)};
      break;
  }
  return d;
}

inline Mode random_syntax_mode(Gen & g, int depth, int & counter, const std::vector<std::string> & modules)
{
  Mode m;
  m.name = "m" + std::to_string(counter++);
  static const std::vector<double> periods = {1.0, 0.5, 2.0, 0.125, 10.0, 1.5};
  m.period = g.pick(periods);
  if (depth > 0 && g.chance(0.4)) {
    Mode::Composite comp;
    const int k = g.range(1, 3);
    for (int i = 0; i < k; ++i) comp.children.push_back(random_syntax_mode(g, depth - 1, counter, modules));
    comp.initial = g.pick(comp.children).name;
    m.body = std::move(comp);
  } else {
    m.body = Mode::Leaf{random_syntax_cfg(g, modules)};
  }
  const int t = g.range(0, 2);
  for (int i = 0; i < t; ++i) {
    Transition tr;
    tr.target = "m" + std::to_string(g.range(0, 20));
    tr.priority = g.range(1, 5);
    tr.guard = random_guard(g, 3);
    m.transitions.push_back(std::move(tr));
  }
  return m;
}

/// Structurally arbitrary (not necessarily valid) model.
inline Model random_syntax_model(Gen & g)
{
  Model m;
  m.name = "rand" + std::to_string(g.range(0, 99));
  int v = 0;
  for (int i = g.range(0, 3); i > 0; --i) m.vars.push_back(random_decl(g, "v" + std::to_string(v++)));
  for (int i = g.range(0, 2); i > 0; --i) m.inputs.push_back(random_decl(g, "v" + std::to_string(v++)));
  for (int i = g.range(0, 2); i > 0; --i) m.outputs.push_back(random_decl(g, "v" + std::to_string(v++)));
  std::vector<std::string> module_names;
  for (int i = g.range(0, 2); i > 0; --i) {
    ModuleDef mod;
    mod.name = "f" + std::to_string(module_names.size());
    if (g.chance(0.5)) mod.locals.push_back(random_decl(g, "l" + std::to_string(v++)));
    mod.cfg = random_syntax_cfg(g, module_names);
    module_names.push_back(mod.name);
    m.modules.push_back(std::move(mod));
  }
  int counter = 0;
  m.root = random_syntax_mode(g, 3, counter, module_names);
  return m;
}

// ---------------------------------------------------------------------------
// Well-typed model generator: every model passes validation.

struct TypedVar
{
  std::string name;
  ValueKind kind;
};

class TypedGen
{
public:
  TypedGen(Gen & g, bool allow_partial_ops) : g_(g), partial_(allow_partial_ops) {}

  ExprPtr expr(ValueKind want, const std::vector<TypedVar> & vars, int depth)
  {
    std::vector<const TypedVar *> same;
    for (const auto & v : vars) {
      if (v.kind == want || (want == ValueKind::Real && v.kind == ValueKind::Int)) same.push_back(&v);
    }
    if (depth <= 0 || g_.chance(0.3)) {
      if (!same.empty() && g_.chance(0.7)) return ex::var(same[static_cast<std::size_t>(g_.range(0, static_cast<int>(same.size()) - 1))]->name);
      return literal(want);
    }
    switch (want) {
      case ValueKind::Bool: {
        switch (g_.range(0, 3)) {
          case 0:
            return ex::unary(UnaryOp::Not, expr(ValueKind::Bool, vars, depth - 1));
          case 1:
            return ex::binary(g_.chance(0.5) ? BinaryOp::And : BinaryOp::Or, expr(ValueKind::Bool, vars, depth - 1),
                              expr(ValueKind::Bool, vars, depth - 1));
          default: {
            const ValueKind k = g_.chance(0.5) ? ValueKind::Int : ValueKind::Real;
            return ex::binary(static_cast<BinaryOp>(g_.range(4, 9)), expr(k, vars, depth - 1), expr(k, vars, depth - 1));
          }
        }
      }
      case ValueKind::Int: {
        if (g_.chance(0.2)) return ex::unary(UnaryOp::Neg, expr(ValueKind::Int, vars, depth - 1));
        if (g_.chance(0.2)) {
          const Builtin fn = static_cast<Builtin>(g_.range(0, 2) == 0 ? 1 : g_.range(4, 5));
          std::vector<ExprPtr> args;
          for (std::size_t i = 0; i < builtin_arity(fn); ++i) args.push_back(expr(ValueKind::Int, vars, depth - 1));
          return ex::call(fn, std::move(args));
        }
        const int hi = partial_ ? 3 : 2;
        return ex::binary(static_cast<BinaryOp>(g_.range(0, hi)), expr(ValueKind::Int, vars, depth - 1),
                          expr(ValueKind::Int, vars, depth - 1));
      }
      case ValueKind::Real: {
        if (g_.chance(0.2)) {
          static const std::vector<Builtin> fns = {Builtin::Abs, Builtin::Sin, Builtin::Cos, Builtin::Min,
                                                   Builtin::Max, Builtin::Sqrt};
          const Builtin fn = fns[static_cast<std::size_t>(g_.range(0, partial_ ? 5 : 4))];
          std::vector<ExprPtr> args;
          for (std::size_t i = 0; i < builtin_arity(fn); ++i) args.push_back(expr(ValueKind::Real, vars, depth - 1));
          return ex::call(fn, std::move(args));
        }
        const int hi = partial_ ? 3 : 2;
        return ex::binary(static_cast<BinaryOp>(g_.range(0, hi)), expr(ValueKind::Real, vars, depth - 1),
                          expr(ValueKind::Real, vars, depth - 1));
      }
    }
    return literal(want);
  }

  Value value(ValueKind kind)
  {
    switch (kind) {
      case ValueKind::Int:
        return Value::of_int(g_.range(-5, 9));
      case ValueKind::Real:
        return Value::of_real(g_.range(-8, 8) * 0.25);
      case ValueKind::Bool:
        return Value::of_bool(g_.chance(0.5));
    }
    return {};
  }

  ExprPtr literal(ValueKind kind)
  {
    const Value v = value(kind);
    if (v.is_int() && v.as_int() < 0) return ex::unary(UnaryOp::Neg, ex::int_lit(-v.as_int()));
    if (v.is_real() && v.as_real() < 0) return ex::unary(UnaryOp::Neg, ex::real_lit(-v.as_real()));
    return ex::lit(v);
  }

  /// Chain-shaped acyclic graph: node i always reaches i + 1, so every node is
  /// reachable and reaches the exit.
  Cfg cfg(const std::vector<TypedVar> & readable, const std::vector<TypedVar> & writable,
          const std::vector<std::string> & callable, int max_nodes)
  {
    Cfg c;
    const int n = g_.range(0, max_nodes);
    auto label = [](int i) { return "n" + std::to_string(i); };
    auto succ = [&](int i) { return i + 1 < n ? label(i + 1) : std::string(kExitNode); };
    auto later = [&](int i) {
      const int t = g_.range(i + 1, n);
      return t >= n ? std::string(kExitNode) : label(t);
    };
    for (int i = 0; i < n; ++i) {
      CfgNode node;
      node.id = label(i);
      const int kind = g_.range(0, 9);
      if (kind < 5 && !writable.empty()) {
        const auto & target = writable[static_cast<std::size_t>(g_.range(0, static_cast<int>(writable.size()) - 1))];
        node.op = CfgNode::Assign{target.name, expr(target.kind, readable, 3), succ(i)};
      } else if (kind < 8) {
        if (g_.chance(0.5)) {
          node.op = CfgNode::Branch{expr(ValueKind::Bool, readable, 2), succ(i), later(i)};
        } else {
          node.op = CfgNode::Branch{expr(ValueKind::Bool, readable, 2), later(i), succ(i)};
        }
      } else if (!callable.empty()) {
        node.op = CfgNode::Call{g_.pick(callable), succ(i)};
      } else {
        node.op = CfgNode::Nop{succ(i)};
      }
      c.nodes.push_back(std::move(node));
    }
    c.entry = n == 0 ? std::string(kExitNode) : label(0);
    c.nodes.push_back(CfgNode{std::string(kExitNode), CfgNode::Exit{}, {}});
    return c;
  }

  GuardPtr guard(const std::vector<TypedVar> & globals, int depth)
  {
    if (depth <= 0 || g_.chance(0.35)) {
      switch (g_.range(0, 4)) {
        case 0:
        case 1:
          return gd::duration(expr(ValueKind::Bool, globals, 2), 0.25 * g_.range(1, 24));
        case 2:
          return gd::after(0.25 * g_.range(1, 24));
        default:
          return gd::cond(expr(ValueKind::Bool, globals, 2));
      }
    }
    switch (g_.range(0, 2)) {
      case 0:
        return gd::negate(guard(globals, depth - 1));
      case 1:
        return gd::both(guard(globals, depth - 1), guard(globals, depth - 1));
      default:
        return gd::either(guard(globals, depth - 1), guard(globals, depth - 1));
    }
  }

  Model model(int max_depth)
  {
    Model m;
    m.name = "typed";
    std::vector<TypedVar> globals;
    std::vector<TypedVar> writable;
    int id = 0;
    auto decl = [&](std::vector<VariableDecl> & list, bool sampled) {
      VariableDecl d;
      d.name = "v" + std::to_string(id++);
      d.kind = static_cast<ValueKind>(g_.range(0, 2));
      const int init = g_.range(0, 2);
      if (init == 1) {
        d.init = value(d.kind);
      } else if (init == 2 && sampled && d.kind != ValueKind::Bool) {
        const Value a = value(d.kind);
        const Value b = value(d.kind);
        const bool ordered = a.as_real() <= b.as_real();
        d.init = InitRange{ordered ? a : b, ordered ? b : a};
      }
      globals.push_back({d.name, d.kind});
      list.push_back(d);
      return TypedVar{d.name, d.kind};
    };
    for (int i = g_.range(1, 3); i > 0; --i) writable.push_back(decl(m.vars, true));
    for (int i = g_.range(0, 2); i > 0; --i) decl(m.inputs, true);
    for (int i = g_.range(0, 2); i > 0; --i) writable.push_back(decl(m.outputs, true));

    std::vector<std::string> modules;
    for (int i = g_.range(0, 2); i > 0; --i) {
      ModuleDef mod;
      mod.name = "f" + std::to_string(modules.size());
      auto readable = globals;
      auto targets = writable;
      if (g_.chance(0.6)) {
        VariableDecl local;
        local.name = "l" + std::to_string(id++);
        local.kind = static_cast<ValueKind>(g_.range(0, 2));
        local.init = value(local.kind);
        readable.push_back({local.name, local.kind});
        targets.push_back({local.name, local.kind});
        mod.locals.push_back(local);
      }
      mod.cfg = cfg(readable, targets, modules, 4);
      modules.push_back(mod.name);
      m.modules.push_back(std::move(mod));
    }

    int counter = 0;
    m.root = mode(max_depth, counter, globals, writable, modules, true);
    return m;
  }

private:
  Mode mode(int depth, int & counter, const std::vector<TypedVar> & globals, const std::vector<TypedVar> & writable,
            const std::vector<std::string> & modules, bool is_root)
  {
    static const std::vector<double> periods = {0.25, 0.5, 1.0, 2.0};
    Mode m;
    m.name = is_root ? "root" : "m" + std::to_string(counter++);
    m.period = g_.pick(periods);
    if (depth > 0 && (is_root || g_.chance(0.4))) {
      Mode::Composite comp;
      const int k = g_.range(is_root ? 2 : 1, 4);
      for (int i = 0; i < k; ++i) comp.children.push_back(mode(depth - 1, counter, globals, writable, modules, false));
      comp.initial = g_.pick(comp.children).name;
      // Sibling transitions with distinct priorities.
      for (auto & child : comp.children) {
        std::vector<std::int64_t> prios = {1, 2, 3, 4, 5};
        std::shuffle(prios.begin(), prios.end(), g_.engine());
        const int t = g_.range(0, 3);
        for (int i = 0; i < t && k > 1; ++i) {
          std::string target;
          do {
            target = g_.pick(comp.children).name;
          } while (target == child.name);
          child.transitions.push_back(Transition{target, prios[static_cast<std::size_t>(i)], guard(globals, 2), {}});
        }
      }
      m.body = std::move(comp);
    } else {
      m.body = Mode::Leaf{cfg(globals, writable, modules, 5)};
    }
    return m;
  }

  Gen & g_;
  bool partial_;
};

/// Writes uniformly random values into every input each period.
class RandomEnv : public Environment
{
public:
  explicit RandomEnv(const Program & program)
  {
    for (std::size_t k = program.inputs_begin; k < program.inputs_end; ++k) kinds_.push_back(program.slots[k].kind);
  }

  void reset(std::uint64_t seed, std::span<const Value>) override { rng_ = Rng(seed); }

  void step(std::span<const Value>, double, double, std::span<Value> inputs) override
  {
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      switch (kinds_[i]) {
        case ValueKind::Int:
          inputs[i] = Value::of_int(rng_.uniform_int(0, 3));
          break;
        case ValueKind::Real:
          inputs[i] = Value::of_real(rng_.uniform_real(-1.0, 1.0));
          break;
        case ValueKind::Bool:
          // Long runs of true so duration windows actually fill up.
          inputs[i] = Value::of_bool(rng_.uniform01() < 0.85);
          break;
      }
    }
  }

private:
  std::vector<ValueKind> kinds_;
  Rng rng_{0};
};

// ---------------------------------------------------------------------------
// Hand-built traces for interval-logic tests.

/// Columns x:int, y:int, b:bool, gm:int; paths for modes m0, m4/G0, m4/G2, m5, m6, m8.
inline std::shared_ptr<const TraceSchema> test_schema()
{
  static const auto schema = [] {
    auto s = std::make_shared<TraceSchema>();
    s->columns = {{"x", ValueKind::Int}, {"y", ValueKind::Int}, {"b", ValueKind::Bool}, {"gm", ValueKind::Int}};
    s->paths = {
      ModePath::from_names({"root", "m0"}),       ModePath::from_names({"root", "m4", "G0"}),
      ModePath::from_names({"root", "m4", "G2"}), ModePath::from_names({"root", "m5"}),
      ModePath::from_names({"root", "m6"}),       ModePath::from_names({"root", "m8"}),
    };
    return std::shared_ptr<const TraceSchema>(s);
  }();
  return schema;
}

/// Index of the path whose first-level mode has the given code (m4 -> G0).
inline std::uint32_t path_for_mode(int code)
{
  switch (code) {
    case 0:
      return 0;
    case 4:
      return 1;
    case 5:
      return 3;
    case 6:
      return 4;
    case 8:
      return 5;
    default:
      return 0;
  }
}

/// Trace whose mode codes follow `modes`, one second per period, x = y = gm = 0.
inline Trace trace_of_modes(const std::vector<int> & modes)
{
  Trace t(test_schema());
  double time = 0;
  for (int m : modes) {
    time += 1.0;
    const Value vals[] = {Value::of_int(0), Value::of_int(0), Value::of_bool(false), Value::of_int(0)};
    t.push(time, path_for_mode(m), vals);
  }
  return t;
}

inline Trace random_trace(Gen & g, std::size_t n)
{
  Trace t(test_schema());
  static const std::vector<double> steps = {0.5, 1.0, 1.0, 2.0};
  double time = 0;
  for (std::size_t i = 0; i < n; ++i) {
    time += g.pick(steps);
    const Value vals[] = {Value::of_int(g.range(0, 3)), Value::of_int(g.range(0, 3)), Value::of_bool(g.chance(0.6)),
                          Value::of_int(g.range(1, 2))};
    t.push(time, static_cast<std::uint32_t>(g.range(0, 5)), vals);
  }
  return t;
}

/// Random formula over the test schema, well typed, depth bounded.
inline FormulaPtr random_formula(Gen & g, int depth)
{
  if (depth <= 0 || g.chance(0.2)) {
    switch (g.range(0, 6)) {
      case 0:
        return fm::tt();
      case 1:
        return fm::len(static_cast<BinaryOp>(g.range(4, 9)), 0.5 * g.range(0, 8));
      case 2:
        return fm::pred(ex::var("b"));
      case 3:
        return fm::pred(ex::binary(BinaryOp::Eq, ex::var("mode"), ex::int_lit(g.pick(std::vector<int>{0, 4, 5, 6}))));
      case 4:
        return fm::pred(ex::binary(BinaryOp::Eq, ex::var("submode"), ex::str_lit(g.chance(0.5) ? "G0" : "G2")));
      default:
        return fm::pred(ex::binary(static_cast<BinaryOp>(g.range(4, 9)), ex::var(g.chance(0.5) ? "x" : "y"),
                                   ex::int_lit(g.range(0, 3))));
    }
  }
  switch (g.range(0, 6)) {
    case 0:
      return fm::negate(random_formula(g, depth - 1));
    case 1:
    case 2:
      return fm::box(random_formula(g, depth - 1));
    default:
      return fm::binary(static_cast<Connective>(g.range(0, 3)), random_formula(g, depth - 1),
                        random_formula(g, depth - 1));
  }
}

}  // namespace mdm_test
