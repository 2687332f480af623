// src/ast.cpp - AST constructors, lookups and structural equality
#include "mdm/ast.hpp"

#include <algorithm>

namespace mdm
{

std::string_view op_text(UnaryOp op) { return op == UnaryOp::Neg ? "-" : "!"; }

std::string_view op_text(BinaryOp op)
{
  switch (op) {
    case BinaryOp::Add:
      return "+";
    case BinaryOp::Sub:
      return "-";
    case BinaryOp::Mul:
      return "*";
    case BinaryOp::Div:
      return "/";
    case BinaryOp::Eq:
      return "==";
    case BinaryOp::Ne:
      return "!=";
    case BinaryOp::Lt:
      return "<";
    case BinaryOp::Le:
      return "<=";
    case BinaryOp::Gt:
      return ">";
    case BinaryOp::Ge:
      return ">=";
    case BinaryOp::And:
      return "&&";
    case BinaryOp::Or:
      return "||";
  }
  return "?";
}

std::string_view builtin_name(Builtin fn)
{
  switch (fn) {
    case Builtin::Sqrt:
      return "sqrt";
    case Builtin::Abs:
      return "abs";
    case Builtin::Sin:
      return "sin";
    case Builtin::Cos:
      return "cos";
    case Builtin::Min:
      return "min";
    case Builtin::Max:
      return "max";
  }
  return "?";
}

std::size_t builtin_arity(Builtin fn) { return (fn == Builtin::Min || fn == Builtin::Max) ? 2 : 1; }

bool is_comparison(BinaryOp op)
{
  switch (op) {
    case BinaryOp::Eq:
    case BinaryOp::Ne:
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge:
      return true;
    default:
      return false;
  }
}

namespace ex
{
ExprPtr lit(Value v, SourceSpan span)
{
  return std::make_shared<const Expr>(Expr{Expr::Literal{v}, std::move(span)});
}
ExprPtr int_lit(std::int64_t v, SourceSpan span) { return lit(Value::of_int(v), std::move(span)); }
ExprPtr real_lit(double v, SourceSpan span) { return lit(Value::of_real(v), std::move(span)); }
ExprPtr bool_lit(bool v, SourceSpan span) { return lit(Value::of_bool(v), std::move(span)); }
ExprPtr str_lit(std::string v, SourceSpan span)
{
  return std::make_shared<const Expr>(Expr{Expr::StrLit{std::move(v)}, std::move(span)});
}
ExprPtr var(std::string name, SourceSpan span)
{
  return std::make_shared<const Expr>(Expr{Expr::Var{std::move(name)}, std::move(span)});
}
ExprPtr unary(UnaryOp op, ExprPtr operand, SourceSpan span)
{
  return std::make_shared<const Expr>(Expr{Expr::Unary{op, std::move(operand)}, std::move(span)});
}
ExprPtr binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, SourceSpan span)
{
  return std::make_shared<const Expr>(
    Expr{Expr::Binary{op, std::move(lhs), std::move(rhs)}, std::move(span)});
}
ExprPtr call(Builtin fn, std::vector<ExprPtr> args, SourceSpan span)
{
  return std::make_shared<const Expr>(Expr{Expr::Call{fn, std::move(args)}, std::move(span)});
}
}  // namespace ex

namespace gd
{
GuardPtr cond(ExprPtr e, SourceSpan span)
{
  return std::make_shared<const Guard>(Guard{Guard::Cond{std::move(e)}, std::move(span)});
}
GuardPtr duration(ExprPtr c, double window, SourceSpan span)
{
  return std::make_shared<const Guard>(Guard{Guard::Duration{std::move(c), window}, std::move(span)});
}
GuardPtr after(double window, SourceSpan span)
{
  return std::make_shared<const Guard>(Guard{Guard::After{window}, std::move(span)});
}
GuardPtr negate(GuardPtr g, SourceSpan span)
{
  return std::make_shared<const Guard>(Guard{Guard::Not{std::move(g)}, std::move(span)});
}
GuardPtr both(GuardPtr a, GuardPtr b, SourceSpan span)
{
  return std::make_shared<const Guard>(Guard{Guard::And{std::move(a), std::move(b)}, std::move(span)});
}
GuardPtr either(GuardPtr a, GuardPtr b, SourceSpan span)
{
  return std::make_shared<const Guard>(Guard{Guard::Or{std::move(a), std::move(b)}, std::move(span)});
}
}  // namespace gd

namespace fm
{
FormulaPtr tt() { return std::make_shared<const Formula>(Formula{Formula::True{}, {}}); }
FormulaPtr pred(ExprPtr e, SourceSpan span)
{
  return std::make_shared<const Formula>(Formula{Formula::Pred{std::move(e)}, std::move(span)});
}
FormulaPtr len(BinaryOp cmp, double seconds)
{
  return std::make_shared<const Formula>(Formula{Formula::Len{cmp, seconds}, {}});
}
FormulaPtr negate(FormulaPtr f)
{
  return std::make_shared<const Formula>(Formula{Formula::Not{std::move(f)}, {}});
}
FormulaPtr binary(Connective op, FormulaPtr a, FormulaPtr b)
{
  return std::make_shared<const Formula>(Formula{Formula::Binary{op, std::move(a), std::move(b)}, {}});
}
FormulaPtr conj(FormulaPtr a, FormulaPtr b) { return binary(Connective::And, std::move(a), std::move(b)); }
FormulaPtr disj(FormulaPtr a, FormulaPtr b) { return binary(Connective::Or, std::move(a), std::move(b)); }
FormulaPtr implies(FormulaPtr a, FormulaPtr b)
{
  return binary(Connective::Implies, std::move(a), std::move(b));
}
FormulaPtr chop(FormulaPtr a, FormulaPtr b) { return binary(Connective::Chop, std::move(a), std::move(b)); }
FormulaPtr box(FormulaPtr f)
{
  return std::make_shared<const Formula>(Formula{Formula::Box{std::move(f)}, {}});
}
}  // namespace fm

const CfgNode * Cfg::find(std::string_view id) const
{
  auto it = std::find_if(nodes.begin(), nodes.end(), [&](const CfgNode & n) { return n.id == id; });
  return it == nodes.end() ? nullptr : &*it;
}

Cfg empty_cfg()
{
  Cfg cfg;
  cfg.nodes.push_back(CfgNode{std::string(kExitNode), CfgNode::Exit{}, {}});
  return cfg;
}

const std::vector<Mode> * Mode::children() const
{
  if (const auto * c = std::get_if<Composite>(&body)) return &c->children;
  return nullptr;
}

const Mode * Mode::child(std::string_view child_name) const
{
  const auto * kids = children();
  if (kids == nullptr) return nullptr;
  for (const auto & k : *kids) {
    if (k.name == child_name) return &k;
  }
  return nullptr;
}

const ModuleDef * Model::module(std::string_view module_name) const
{
  for (const auto & m : modules) {
    if (m.name == module_name) return &m;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------

namespace
{

template <typename T, typename F>
bool same_ptr(const std::shared_ptr<const T> & a, const std::shared_ptr<const T> & b, F && eq)
{
  if (!a || !b) return !a && !b;
  return eq(*a, *b);
}

bool same_ptr(const ExprPtr & a, const ExprPtr & b)
{
  return same_ptr(a, b, [](const Expr & x, const Expr & y) { return same_structure(x, y); });
}
bool same_ptr(const GuardPtr & a, const GuardPtr & b)
{
  return same_ptr(a, b, [](const Guard & x, const Guard & y) { return same_structure(x, y); });
}
bool same_ptr(const FormulaPtr & a, const FormulaPtr & b)
{
  return same_ptr(a, b, [](const Formula & x, const Formula & y) { return same_structure(x, y); });
}

bool same_init(const VariableDecl & a, const VariableDecl & b)
{
  if (a.init.index() != b.init.index()) return false;
  if (const auto * v = std::get_if<Value>(&a.init)) return *v == std::get<Value>(b.init);
  if (const auto * r = std::get_if<InitRange>(&a.init)) {
    const auto & s = std::get<InitRange>(b.init);
    return r->lo == s.lo && r->hi == s.hi;
  }
  return true;
}

bool same_decls(const std::vector<VariableDecl> & a, const std::vector<VariableDecl> & b)
{
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](const auto & x, const auto & y) {
    return x.name == y.name && x.kind == y.kind && same_init(x, y);
  });
}

}  // namespace

bool same_structure(const Expr & a, const Expr & b)
{
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
    [&](const auto & x) -> bool {
      using T = std::decay_t<decltype(x)>;
      const auto & y = std::get<T>(b.node);
      if constexpr (std::is_same_v<T, Expr::Literal>) {
        return x.value == y.value;
      } else if constexpr (std::is_same_v<T, Expr::StrLit>) {
        return x.value == y.value;
      } else if constexpr (std::is_same_v<T, Expr::Var>) {
        return x.name == y.name;
      } else if constexpr (std::is_same_v<T, Expr::Unary>) {
        return x.op == y.op && same_ptr(x.operand, y.operand);
      } else if constexpr (std::is_same_v<T, Expr::Binary>) {
        return x.op == y.op && same_ptr(x.lhs, y.lhs) && same_ptr(x.rhs, y.rhs);
      } else {
        return x.fn == y.fn &&
               std::equal(x.args.begin(), x.args.end(), y.args.begin(), y.args.end(),
                          [](const ExprPtr & p, const ExprPtr & q) { return same_ptr(p, q); });
      }
    },
    a.node);
}

bool same_structure(const Guard & a, const Guard & b)
{
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
    [&](const auto & x) -> bool {
      using T = std::decay_t<decltype(x)>;
      const auto & y = std::get<T>(b.node);
      if constexpr (std::is_same_v<T, Guard::Cond>) {
        return same_ptr(x.expr, y.expr);
      } else if constexpr (std::is_same_v<T, Guard::Duration>) {
        return x.window == y.window && same_ptr(x.cond, y.cond);
      } else if constexpr (std::is_same_v<T, Guard::After>) {
        return x.window == y.window;
      } else if constexpr (std::is_same_v<T, Guard::Not>) {
        return same_ptr(x.operand, y.operand);
      } else {
        return same_ptr(x.lhs, y.lhs) && same_ptr(x.rhs, y.rhs);
      }
    },
    a.node);
}

bool same_structure(const Cfg & a, const Cfg & b)
{
  if (a.entry != b.entry || a.exit != b.exit || a.nodes.size() != b.nodes.size()) return false;
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    const auto & x = a.nodes[i];
    const auto & y = b.nodes[i];
    if (x.id != y.id || x.op.index() != y.op.index()) return false;
    const bool same = std::visit(
      [&](const auto & p) -> bool {
        using T = std::decay_t<decltype(p)>;
        const auto & q = std::get<T>(y.op);
        if constexpr (std::is_same_v<T, CfgNode::Assign>) {
          return p.target == q.target && p.next == q.next && same_ptr(p.value, q.value);
        } else if constexpr (std::is_same_v<T, CfgNode::Branch>) {
          return p.then_node == q.then_node && p.else_node == q.else_node && same_ptr(p.cond, q.cond);
        } else if constexpr (std::is_same_v<T, CfgNode::Call>) {
          return p.module == q.module && p.next == q.next;
        } else if constexpr (std::is_same_v<T, CfgNode::Nop>) {
          return p.next == q.next;
        } else {
          return true;
        }
      },
      x.op);
    if (!same) return false;
  }
  return true;
}

bool same_structure(const Mode & a, const Mode & b)
{
  if (a.name != b.name || a.period != b.period || a.body.index() != b.body.index()) return false;
  if (a.transitions.size() != b.transitions.size()) return false;
  for (std::size_t i = 0; i < a.transitions.size(); ++i) {
    const auto & s = a.transitions[i];
    const auto & t = b.transitions[i];
    if (s.target != t.target || s.priority != t.priority || !same_ptr(s.guard, t.guard)) return false;
  }
  if (const auto * leaf = std::get_if<Mode::Leaf>(&a.body)) {
    return same_structure(leaf->cfg, std::get<Mode::Leaf>(b.body).cfg);
  }
  const auto & c = std::get<Mode::Composite>(a.body);
  const auto & d = std::get<Mode::Composite>(b.body);
  return c.initial == d.initial &&
         std::equal(c.children.begin(), c.children.end(), d.children.begin(), d.children.end(),
                    [](const Mode & x, const Mode & y) { return same_structure(x, y); });
}

bool same_structure(const Model & a, const Model & b)
{
  if (a.name != b.name || !same_decls(a.vars, b.vars) || !same_decls(a.inputs, b.inputs) ||
      !same_decls(a.outputs, b.outputs) || a.modules.size() != b.modules.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.modules.size(); ++i) {
    const auto & m = a.modules[i];
    const auto & n = b.modules[i];
    if (m.name != n.name || !same_decls(m.locals, n.locals) || !same_structure(m.cfg, n.cfg)) {
      return false;
    }
  }
  return same_structure(a.root, b.root);
}

bool same_structure(const Formula & a, const Formula & b)
{
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
    [&](const auto & x) -> bool {
      using T = std::decay_t<decltype(x)>;
      const auto & y = std::get<T>(b.node);
      if constexpr (std::is_same_v<T, Formula::True>) {
        return true;
      } else if constexpr (std::is_same_v<T, Formula::Pred>) {
        return same_ptr(x.expr, y.expr);
      } else if constexpr (std::is_same_v<T, Formula::Len>) {
        return x.cmp == y.cmp && x.seconds == y.seconds;
      } else if constexpr (std::is_same_v<T, Formula::Not> || std::is_same_v<T, Formula::Box>) {
        return same_ptr(x.operand, y.operand);
      } else {
        return x.op == y.op && same_ptr(x.lhs, y.lhs) && same_ptr(x.rhs, y.rhs);
      }
    },
    a.node);
}

}  // namespace mdm
