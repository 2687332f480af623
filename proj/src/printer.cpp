// src/printer.cpp - Canonical pretty-printer
//
// Parentheses are inserted from operator precedence only, so that parsing the
// output yields a structurally identical tree.
#include "mdm/printer.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace mdm
{

namespace
{

std::string shortest(double v)
{
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string literal_text(const Value & v)
{
  if (v.is_real()) return format_real(v.as_real());
  return v.to_string();
}

// ---- expressions ----------------------------------------------------------

constexpr int kPrecOr = 1;
constexpr int kPrecAnd = 2;
constexpr int kPrecCmp = 3;
constexpr int kPrecAdd = 4;
constexpr int kPrecMul = 5;
constexpr int kPrecUnary = 6;
constexpr int kPrecAtom = 7;

int binary_prec(BinaryOp op)
{
  switch (op) {
    case BinaryOp::Or:
      return kPrecOr;
    case BinaryOp::And:
      return kPrecAnd;
    case BinaryOp::Add:
    case BinaryOp::Sub:
      return kPrecAdd;
    case BinaryOp::Mul:
    case BinaryOp::Div:
      return kPrecMul;
    default:
      return kPrecCmp;
  }
}

int prec(const Expr & e)
{
  if (const auto * b = std::get_if<Expr::Binary>(&e.node)) return binary_prec(b->op);
  if (std::holds_alternative<Expr::Unary>(e.node)) return kPrecUnary;
  if (const auto * l = std::get_if<Expr::Literal>(&e.node)) {
    // Negative literals only come from hand-built trees; keep them atomic.
    if ((l->value.is_int() && l->value.as_int() < 0) || (l->value.is_real() && std::signbit(l->value.as_real()))) {
      return 0;
    }
  }
  return kPrecAtom;
}

bool is_not(const Expr & e)
{
  const auto * u = std::get_if<Expr::Unary>(&e.node);
  return u != nullptr && u->op == UnaryOp::Not;
}

void emit(std::ostream & os, const Expr & e);

void emit_operand(std::ostream & os, const Expr & e, bool parens)
{
  if (parens) os << '(';
  emit(os, e);
  if (parens) os << ')';
}

void emit(std::ostream & os, const Expr & e)
{
  std::visit(
    [&](const auto & n) {
      using T = std::decay_t<decltype(n)>;
      if constexpr (std::is_same_v<T, Expr::Literal>) {
        os << literal_text(n.value);
      } else if constexpr (std::is_same_v<T, Expr::StrLit>) {
        os << '"';
        for (char c : n.value) {
          if (c == '"' || c == '\\') os << '\\';
          os << c;
        }
        os << '"';
      } else if constexpr (std::is_same_v<T, Expr::Var>) {
        os << n.name;
      } else if constexpr (std::is_same_v<T, Expr::Unary>) {
        os << op_text(n.op);
        emit_operand(os, *n.operand, prec(*n.operand) < kPrecUnary);
      } else if constexpr (std::is_same_v<T, Expr::Binary>) {
        const int p = binary_prec(n.op);
        // A leading `!` inside arithmetic or a comparison is parenthesised so that
        // guard and formula atoms cannot absorb it as a connective.
        const bool lhs_parens =
          prec(*n.lhs) < p || (p == kPrecCmp && prec(*n.lhs) == kPrecCmp) || (p >= kPrecCmp && is_not(*n.lhs));
        const bool rhs_parens = prec(*n.rhs) <= p || (p >= kPrecCmp && is_not(*n.rhs));
        emit_operand(os, *n.lhs, lhs_parens);
        os << ' ' << op_text(n.op) << ' ';
        emit_operand(os, *n.rhs, rhs_parens);
      } else {
        os << builtin_name(n.fn) << '(';
        for (std::size_t i = 0; i < n.args.size(); ++i) {
          if (i > 0) os << ", ";
          emit(os, *n.args[i]);
        }
        os << ')';
      }
    },
    e.node);
}

// ---- guards ---------------------------------------------------------------

int prec(const Guard & g)
{
  if (std::holds_alternative<Guard::Or>(g.node)) return kPrecOr;
  if (std::holds_alternative<Guard::And>(g.node)) return kPrecAnd;
  if (std::holds_alternative<Guard::Not>(g.node)) return kPrecUnary;
  if (const auto * c = std::get_if<Guard::Cond>(&g.node)) return prec(*c->expr);
  return kPrecAtom;
}

void emit(std::ostream & os, const Guard & g);

void emit_guard_binary(std::ostream & os, const Guard & lhs, const Guard & rhs, int p, std::string_view op)
{
  const bool lp = prec(lhs) < p;
  const bool rp = prec(rhs) <= p;
  if (lp) os << '(';
  emit(os, lhs);
  if (lp) os << ')';
  os << ' ' << op << ' ';
  if (rp) os << '(';
  emit(os, rhs);
  if (rp) os << ')';
}

void emit(std::ostream & os, const Guard & g)
{
  std::visit(
    [&](const auto & n) {
      using T = std::decay_t<decltype(n)>;
      if constexpr (std::is_same_v<T, Guard::Cond>) {
        emit(os, *n.expr);
      } else if constexpr (std::is_same_v<T, Guard::Duration>) {
        os << "duration(";
        emit(os, *n.cond);
        os << ", " << format_duration(n.window) << ')';
      } else if constexpr (std::is_same_v<T, Guard::After>) {
        os << "after(" << format_duration(n.window) << ')';
      } else if constexpr (std::is_same_v<T, Guard::Not>) {
        os << '!';
        const bool parens = prec(*n.operand) < kPrecUnary;
        if (parens) os << '(';
        emit(os, *n.operand);
        if (parens) os << ')';
      } else if constexpr (std::is_same_v<T, Guard::And>) {
        emit_guard_binary(os, *n.lhs, *n.rhs, kPrecAnd, "&&");
      } else {
        emit_guard_binary(os, *n.lhs, *n.rhs, kPrecOr, "||");
      }
    },
    g.node);
}

// ---- formulas -------------------------------------------------------------

constexpr int kFPrecChop = 1;
constexpr int kFPrecImplies = 2;
constexpr int kFPrecOr = 3;
constexpr int kFPrecAnd = 4;
constexpr int kFPrecUnary = 5;
constexpr int kFPrecAtom = 6;

int connective_prec(Connective c)
{
  switch (c) {
    case Connective::Chop:
      return kFPrecChop;
    case Connective::Implies:
      return kFPrecImplies;
    case Connective::Or:
      return kFPrecOr;
    case Connective::And:
      return kFPrecAnd;
  }
  return 0;
}

std::string_view connective_text(Connective c)
{
  switch (c) {
    case Connective::Chop:
      return ";";
    case Connective::Implies:
      return "=>";
    case Connective::Or:
      return "||";
    case Connective::And:
      return "&&";
  }
  return "?";
}

int prec(const Formula & f)
{
  if (const auto * b = std::get_if<Formula::Binary>(&f.node)) return connective_prec(b->op);
  if (std::holds_alternative<Formula::Not>(f.node) || std::holds_alternative<Formula::Box>(f.node)) {
    return kFPrecUnary;
  }
  return kFPrecAtom;
}

void emit(std::ostream & os, const Formula & f);

void emit_formula_operand(std::ostream & os, const Formula & f, bool parens)
{
  if (parens) os << '(';
  emit(os, f);
  if (parens) os << ')';
}

void emit(std::ostream & os, const Formula & f)
{
  std::visit(
    [&](const auto & n) {
      using T = std::decay_t<decltype(n)>;
      if constexpr (std::is_same_v<T, Formula::True>) {
        os << "tt";
      } else if constexpr (std::is_same_v<T, Formula::Pred>) {
        // Predicates with a top-level connective would be re-read as formula
        // connectives; the parser never produces them, but print them safely.
        const bool parens = prec(*n.expr) < kPrecCmp || is_not(*n.expr);
        emit_operand(os, *n.expr, parens);
      } else if constexpr (std::is_same_v<T, Formula::Len>) {
        os << "len " << op_text(n.cmp) << ' ' << shortest(n.seconds);
      } else if constexpr (std::is_same_v<T, Formula::Not>) {
        os << '!';
        emit_formula_operand(os, *n.operand, prec(*n.operand) < kFPrecUnary);
      } else if constexpr (std::is_same_v<T, Formula::Box>) {
        os << "[]";
        emit_formula_operand(os, *n.operand, prec(*n.operand) < kFPrecUnary);
      } else {
        const int p = connective_prec(n.op);
        const bool right_assoc = n.op == Connective::Chop || n.op == Connective::Implies;
        const bool lp = right_assoc ? prec(*n.lhs) <= p : prec(*n.lhs) < p;
        const bool rp = right_assoc ? prec(*n.rhs) < p : prec(*n.rhs) <= p;
        emit_formula_operand(os, *n.lhs, lp);
        os << ' ' << connective_text(n.op) << ' ';
        emit_formula_operand(os, *n.rhs, rp);
      }
    },
    f.node);
}

// ---- models ---------------------------------------------------------------

class ModelPrinter
{
public:
  explicit ModelPrinter(std::ostream & os) : os_(os) {}

  void model(const Model & m)
  {
    os_ << "model " << m.name << " {\n";
    ++indent_;
    for (const auto & d : m.vars) decl("var", d);
    for (const auto & d : m.inputs) decl("input", d);
    for (const auto & d : m.outputs) decl("output", d);
    for (const auto & mod : m.modules) module(mod);
    mode(m.root, false);
    --indent_;
    os_ << "}\n";
  }

private:
  void pad() { os_ << std::string(static_cast<std::size_t>(indent_) * 2, ' '); }

  void decl(std::string_view keyword, const VariableDecl & d)
  {
    pad();
    os_ << keyword << ' ' << d.name << ": " << kind_name(d.kind);
    if (const auto * v = std::get_if<Value>(&d.init)) {
      os_ << " init " << literal_text(*v);
    } else if (const auto * r = std::get_if<InitRange>(&d.init)) {
      os_ << " init in [" << literal_text(r->lo) << ", " << literal_text(r->hi) << "]";
    }
    os_ << ";\n";
  }

  void module(const ModuleDef & m)
  {
    pad();
    os_ << "module " << m.name << " {\n";
    ++indent_;
    for (const auto & d : m.locals) decl("var", d);
    graph(m.cfg);
    --indent_;
    pad();
    os_ << "}\n";
  }

  void graph(const Cfg & cfg)
  {
    pad();
    os_ << "graph {\n";
    ++indent_;
    for (const auto & n : cfg.nodes) {
      if (std::holds_alternative<CfgNode::Exit>(n.op)) continue;
      pad();
      os_ << n.id << ": ";
      std::visit(
        [&](const auto & op) {
          using T = std::decay_t<decltype(op)>;
          if constexpr (std::is_same_v<T, CfgNode::Assign>) {
            os_ << op.target << " := ";
            emit(os_, *op.value);
            os_ << " -> " << op.next;
          } else if constexpr (std::is_same_v<T, CfgNode::Branch>) {
            os_ << "if (";
            emit(os_, *op.cond);
            os_ << ") -> " << op.then_node << " else -> " << op.else_node;
          } else if constexpr (std::is_same_v<T, CfgNode::Call>) {
            os_ << "call " << op.module << " -> " << op.next;
          } else if constexpr (std::is_same_v<T, CfgNode::Nop>) {
            os_ << "nop -> " << op.next;
          }
        },
        n.op);
      os_ << ";\n";
    }
    --indent_;
    pad();
    os_ << "}\n";
  }

  void mode(const Mode & m, bool initial)
  {
    pad();
    if (initial) os_ << "init ";
    os_ << "mode " << m.name << " period " << format_duration(m.period) << " {\n";
    ++indent_;
    if (const auto * leaf = std::get_if<Mode::Leaf>(&m.body)) {
      graph(leaf->cfg);
    } else {
      const auto & comp = std::get<Mode::Composite>(m.body);
      for (const auto & c : comp.children) mode(c, c.name == comp.initial);
    }
    for (const auto & t : m.transitions) {
      pad();
      os_ << "transition to " << t.target << " priority " << t.priority << " when ";
      emit(os_, *t.guard);
      os_ << ";\n";
    }
    --indent_;
    pad();
    os_ << "}\n";
  }

  std::ostream & os_;
  int indent_ = 0;
};

}  // namespace

std::string format_duration(double seconds) { return shortest(seconds) + "s"; }

std::string print(const Expr & e)
{
  std::ostringstream os;
  emit(os, e);
  return os.str();
}

std::string print(const Guard & g)
{
  std::ostringstream os;
  emit(os, g);
  return os.str();
}

std::string print(const Formula & f)
{
  std::ostringstream os;
  emit(os, f);
  return os.str();
}

std::string print(const Model & m)
{
  std::ostringstream os;
  ModelPrinter(os).model(m);
  return os.str();
}

std::string print(const std::vector<Property> & props)
{
  std::ostringstream os;
  for (const auto & p : props) {
    os << "prop " << p.name << " := ";
    emit(os, *p.formula);
    os << ";\n";
  }
  return os.str();
}

}  // namespace mdm
