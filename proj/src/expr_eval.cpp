// src/expr_eval.cpp - Expression compilation to slot-resolved code, and evaluation
#include "mdm/expr_eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mdm/errors.hpp"
#include "mdm/printer.hpp"
#include "mdm/validate.hpp"

namespace mdm
{

namespace
{

class Compiler
{
public:
  Compiler(ExprCode & code, const SlotResolver & resolve, bool mode_observables)
  : code_(code), resolve_(resolve), mode_observables_(mode_observables)
  {
  }

  std::int32_t compile(const Expr & e)
  {
    return std::visit([&](const auto & n) { return compile_node(e, n); }, e.node);
  }

private:
  std::int32_t emit(ExprInstr instr)
  {
    code_.instrs.push_back(std::move(instr));
    return static_cast<std::int32_t>(code_.instrs.size() - 1);
  }

  std::int32_t compile_node(const Expr &, const Expr::Literal & n)
  {
    ExprInstr i;
    i.op = ExprOp::Const;
    i.constant = n.value;
    return emit(std::move(i));
  }

  std::int32_t compile_node(const Expr & e, const Expr::StrLit &)
  {
    throw TypeError("string literal outside a mode comparison", e.span, print(e));
  }

  std::int32_t compile_node(const Expr & e, const Expr::Var & n)
  {
    ExprInstr i;
    if (auto slot = resolve_(n.name)) {
      i.op = ExprOp::Load;
      i.slot = *slot;
      i.name = n.name;
      return emit(std::move(i));
    }
    if (mode_observables_ && n.name == kModeObservable) {
      i.op = ExprOp::ModeCode;
      return emit(std::move(i));
    }
    if (mode_observables_ && n.name == kSubmodeObservable) {
      i.op = ExprOp::SubmodeCode;
      return emit(std::move(i));
    }
    throw TypeError("unknown variable '" + n.name + "'", e.span, n.name);
  }

  std::int32_t compile_node(const Expr &, const Expr::Unary & n)
  {
    ExprInstr i;
    i.op = n.op == UnaryOp::Neg ? ExprOp::Neg : ExprOp::Not;
    i.a = compile(*n.operand);
    return emit(std::move(i));
  }

  std::int32_t compile_node(const Expr & e, const Expr::Binary & n)
  {
    if (n.op == BinaryOp::Eq || n.op == BinaryOp::Ne) {
      const auto * ls = std::get_if<Expr::StrLit>(&n.lhs->node);
      const auto * rs = std::get_if<Expr::StrLit>(&n.rhs->node);
      if (ls || rs) {
        const Expr & other = ls ? *n.rhs : *n.lhs;
        const auto * var = std::get_if<Expr::Var>(&other.node);
        if (!mode_observables_ || !var || resolve_(var->name) ||
            (var->name != kModeObservable && var->name != kSubmodeObservable)) {
          throw TypeError("string literal compared with a non-mode operand", e.span, print(e));
        }
        ExprInstr i;
        i.op = var->name == kModeObservable ? ExprOp::ModeIs : ExprOp::SubmodeIs;
        i.negate = n.op == BinaryOp::Ne;
        i.name = ls ? ls->value : rs->value;
        return emit(std::move(i));
      }
    }
    ExprInstr i;
    switch (n.op) {
      case BinaryOp::Add: i.op = ExprOp::Add; break;
      case BinaryOp::Sub: i.op = ExprOp::Sub; break;
      case BinaryOp::Mul: i.op = ExprOp::Mul; break;
      case BinaryOp::Div: i.op = ExprOp::Div; break;
      case BinaryOp::Eq: i.op = ExprOp::Eq; break;
      case BinaryOp::Ne: i.op = ExprOp::Ne; break;
      case BinaryOp::Lt: i.op = ExprOp::Lt; break;
      case BinaryOp::Le: i.op = ExprOp::Le; break;
      case BinaryOp::Gt: i.op = ExprOp::Gt; break;
      case BinaryOp::Ge: i.op = ExprOp::Ge; break;
      case BinaryOp::And: i.op = ExprOp::And; break;
      case BinaryOp::Or: i.op = ExprOp::Or; break;
    }
    i.a = compile(*n.lhs);
    i.b = compile(*n.rhs);
    return emit(std::move(i));
  }

  std::int32_t compile_node(const Expr &, const Expr::Call & n)
  {
    ExprInstr i;
    switch (n.fn) {
      case Builtin::Sqrt: i.op = ExprOp::Sqrt; break;
      case Builtin::Abs: i.op = ExprOp::Abs; break;
      case Builtin::Sin: i.op = ExprOp::Sin; break;
      case Builtin::Cos: i.op = ExprOp::Cos; break;
      case Builtin::Min: i.op = ExprOp::Min; break;
      case Builtin::Max: i.op = ExprOp::Max; break;
    }
    i.a = compile(*n.args.at(0));
    if (n.args.size() > 1) i.b = compile(*n.args[1]);
    return emit(std::move(i));
  }

  ExprCode & code_;
  const SlotResolver & resolve_;
  bool mode_observables_;
};

std::int64_t wrap_add(std::int64_t a, std::int64_t b)
{
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
std::int64_t wrap_sub(std::int64_t a, std::int64_t b)
{
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}
std::int64_t wrap_mul(std::int64_t a, std::int64_t b)
{
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

bool compare(ExprOp op, const Value & l, const Value & r)
{
  if (l.is_bool()) {
    return op == ExprOp::Eq ? l.as_bool() == r.as_bool() : l.as_bool() != r.as_bool();
  }
  if (l.is_int() && r.is_int()) {
    const std::int64_t a = l.as_int();
    const std::int64_t b = r.as_int();
    switch (op) {
      case ExprOp::Eq: return a == b;
      case ExprOp::Ne: return a != b;
      case ExprOp::Lt: return a < b;
      case ExprOp::Le: return a <= b;
      case ExprOp::Gt: return a > b;
      default: return a >= b;
    }
  }
  const double a = l.as_real();
  const double b = r.as_real();
  switch (op) {
    case ExprOp::Eq: return a == b;
    case ExprOp::Ne: return a != b;
    case ExprOp::Lt: return a < b;
    case ExprOp::Le: return a <= b;
    case ExprOp::Gt: return a > b;
    default: return a >= b;
  }
}

class Evaluator
{
public:
  Evaluator(const ExprCode & code, const EvalContext & ctx) : code_(code), ctx_(ctx) {}

  Value eval(std::int32_t at) const
  {
    const ExprInstr & in = code_.instrs[static_cast<std::size_t>(at)];
    switch (in.op) {
      case ExprOp::Const:
        return in.constant;
      case ExprOp::Load: {
        const Value & v = ctx_.values[static_cast<std::size_t>(in.slot)];
        if (!v.present()) throw EvalError("variable '" + in.name + "' has no value");
        return v;
      }
      case ExprOp::ModeCode:
        return Value::of_int(path().mode_code);
      case ExprOp::SubmodeCode:
        return Value::of_int(path().submode_code);
      case ExprOp::ModeIs:
        return Value::of_bool(path().contains(in.name) != in.negate);
      case ExprOp::SubmodeIs: {
        const std::string * sub = path().submode_name();
        return Value::of_bool((sub && *sub == in.name) != in.negate);
      }
      case ExprOp::Neg: {
        const Value v = eval(in.a);
        if (v.is_int()) return Value::of_int(wrap_sub(0, v.as_int()));
        return Value::of_real(-v.as_real());
      }
      case ExprOp::Not:
        return Value::of_bool(!eval(in.a).as_bool());
      case ExprOp::And:
        return Value::of_bool(eval(in.a).as_bool() && eval(in.b).as_bool());
      case ExprOp::Or:
        return Value::of_bool(eval(in.a).as_bool() || eval(in.b).as_bool());
      case ExprOp::Eq:
      case ExprOp::Ne:
      case ExprOp::Lt:
      case ExprOp::Le:
      case ExprOp::Gt:
      case ExprOp::Ge:
        return Value::of_bool(compare(in.op, eval(in.a), eval(in.b)));
      case ExprOp::Add:
      case ExprOp::Sub:
      case ExprOp::Mul:
      case ExprOp::Div:
        return arith(in.op, eval(in.a), eval(in.b));
      case ExprOp::Sqrt: {
        const double x = eval(in.a).as_real();
        if (x < 0.0) throw EvalError("sqrt of negative value " + format_real(x));
        return Value::of_real(std::sqrt(x));
      }
      case ExprOp::Abs: {
        const Value v = eval(in.a);
        if (v.is_int()) {
          const std::int64_t x = v.as_int();
          return Value::of_int(x < 0 ? wrap_sub(0, x) : x);
        }
        return Value::of_real(std::fabs(v.as_real()));
      }
      case ExprOp::Sin:
        return Value::of_real(std::sin(eval(in.a).as_real()));
      case ExprOp::Cos:
        return Value::of_real(std::cos(eval(in.a).as_real()));
      case ExprOp::Min:
      case ExprOp::Max: {
        const Value l = eval(in.a);
        const Value r = eval(in.b);
        const bool take_min = in.op == ExprOp::Min;
        if (l.is_int() && r.is_int()) {
          const std::int64_t a = l.as_int();
          const std::int64_t b = r.as_int();
          return Value::of_int(take_min ? std::min(a, b) : std::max(a, b));
        }
        const double a = l.as_real();
        const double b = r.as_real();
        return Value::of_real(take_min ? std::fmin(a, b) : std::fmax(a, b));
      }
    }
    return {};
  }

private:
  const ModePath & path() const
  {
    if (!ctx_.path) throw EvalError("mode observable used without an active mode path");
    return *ctx_.path;
  }

  static Value arith(ExprOp op, const Value & l, const Value & r)
  {
    if (l.is_int() && r.is_int()) {
      const std::int64_t a = l.as_int();
      const std::int64_t b = r.as_int();
      switch (op) {
        case ExprOp::Add: return Value::of_int(wrap_add(a, b));
        case ExprOp::Sub: return Value::of_int(wrap_sub(a, b));
        case ExprOp::Mul: return Value::of_int(wrap_mul(a, b));
        default:
          if (b == 0) throw EvalError("integer division by zero");
          if (a == std::numeric_limits<std::int64_t>::min() && b == -1) return Value::of_int(a);
          return Value::of_int(a / b);
      }
    }
    const double a = l.as_real();
    const double b = r.as_real();
    switch (op) {
      case ExprOp::Add: return Value::of_real(a + b);
      case ExprOp::Sub: return Value::of_real(a - b);
      case ExprOp::Mul: return Value::of_real(a * b);
      default:
        if (b == 0.0) throw EvalError("division by zero");
        return Value::of_real(a / b);
    }
  }

  const ExprCode & code_;
  const EvalContext & ctx_;
};

void collect_loads(const ExprCode & code, std::int32_t at, std::vector<std::int32_t> & out)
{
  if (at < 0) return;
  const ExprInstr & in = code.instrs[static_cast<std::size_t>(at)];
  if (in.op == ExprOp::Load) out.push_back(in.slot);
  collect_loads(code, in.a, out);
  collect_loads(code, in.b, out);
}

}  // namespace

std::int32_t compile_expr(const Expr & e, ExprCode & code, const SlotResolver & resolve, bool mode_observables)
{
  return Compiler(code, resolve, mode_observables).compile(e);
}

Value evaluate(const ExprCode & code, std::int32_t root, const EvalContext & ctx)
{
  return Evaluator(code, ctx).eval(root);
}

std::vector<std::int32_t> loaded_slots(const ExprCode & code, std::int32_t root)
{
  std::vector<std::int32_t> out;
  collect_loads(code, root, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace mdm
