// src/parser.cpp - Recursive-descent parser for models, guards and formulas
#include "mdm/parser.hpp"

#include <algorithm>
#include <set>

#include "mdm/errors.hpp"
#include "mdm/lexer.hpp"

namespace mdm
{

namespace
{

bool is_arith_or_cmp_symbol(const Token & t)
{
  if (t.kind != TokenKind::Symbol) return false;
  static const std::set<std::string, std::less<>> ops = {"==", "!=", "<", "<=", ">", ">=",
                                                          "+",  "-",  "*", "/"};
  return ops.count(t.text) > 0;
}

std::optional<BinaryOp> comparison_op(const Token & t)
{
  if (t.kind != TokenKind::Symbol) return std::nullopt;
  if (t.text == "==") return BinaryOp::Eq;
  if (t.text == "!=") return BinaryOp::Ne;
  if (t.text == "<") return BinaryOp::Lt;
  if (t.text == "<=") return BinaryOp::Le;
  if (t.text == ">") return BinaryOp::Gt;
  if (t.text == ">=") return BinaryOp::Ge;
  return std::nullopt;
}

std::optional<Builtin> builtin_from(std::string_view name)
{
  for (auto fn : {Builtin::Sqrt, Builtin::Abs, Builtin::Sin, Builtin::Cos, Builtin::Min, Builtin::Max}) {
    if (builtin_name(fn) == name) return fn;
  }
  return std::nullopt;
}

/// Collapses guard sub-trees that contain no temporal operator into a single
/// boolean condition, so the AST has one canonical shape per guard text.
GuardPtr normalize_guard(const GuardPtr & g)
{
  return std::visit(
    [&](const auto & node) -> GuardPtr {
      using T = std::decay_t<decltype(node)>;
      if constexpr (std::is_same_v<T, Guard::Not>) {
        auto inner = normalize_guard(node.operand);
        if (const auto * c = std::get_if<Guard::Cond>(&inner->node)) {
          return gd::cond(ex::unary(UnaryOp::Not, c->expr, g->span), g->span);
        }
        return gd::negate(inner, g->span);
      } else if constexpr (std::is_same_v<T, Guard::And> || std::is_same_v<T, Guard::Or>) {
        auto lhs = normalize_guard(node.lhs);
        auto rhs = normalize_guard(node.rhs);
        const auto * lc = std::get_if<Guard::Cond>(&lhs->node);
        const auto * rc = std::get_if<Guard::Cond>(&rhs->node);
        constexpr bool is_and = std::is_same_v<T, Guard::And>;
        if (lc != nullptr && rc != nullptr) {
          return gd::cond(ex::binary(is_and ? BinaryOp::And : BinaryOp::Or, lc->expr, rc->expr, g->span),
                          g->span);
        }
        return is_and ? gd::both(lhs, rhs, g->span) : gd::either(lhs, rhs, g->span);
      } else {
        return g;
      }
    },
    g->node);
}

class Parser
{
public:
  Parser(std::string_view text, const std::string & file) : toks_(tokenize(text, file)) {}

  // ---- entry points -------------------------------------------------------

  Model model()
  {
    Model m;
    m.span = peek().span;
    expect_word("model");
    m.name = expect_ident("model name");
    expect_symbol("{");
    while (true) {
      if (peek().is_word("var")) {
        m.vars.push_back(var_decl("var"));
      } else if (peek().is_word("input")) {
        m.inputs.push_back(var_decl("input"));
      } else if (peek().is_word("output")) {
        m.outputs.push_back(var_decl("output"));
      } else if (peek().is_word("module")) {
        m.modules.push_back(module_def());
      } else {
        break;
      }
    }
    if (!peek().is_word("mode") && !peek().is_word("init")) {
      fail({"var", "input", "output", "module", "mode"});
    }
    bool ignored_init = false;
    m.root = mode(ignored_init);
    expect_symbol("}");
    expect_end();
    return m;
  }

  FormulaPtr single_formula()
  {
    auto f = formula();
    expect_end();
    return f;
  }

  std::vector<Property> properties()
  {
    std::vector<Property> out;
    std::set<std::string> seen;
    while (peek().kind != TokenKind::End) {
      Property p;
      p.span = peek().span;
      expect_word("prop");
      const Token & name_tok = peek();
      p.name = expect_ident("property name");
      if (!seen.insert(p.name).second) {
        throw ParseError("duplicate property '" + p.name + "'", name_tok.span);
      }
      expect_symbol(":=");
      in_property_file_ = true;
      p.formula = formula();
      expect_symbol(";");
      out.push_back(std::move(p));
    }
    return out;
  }

  GuardPtr single_guard()
  {
    auto g = guard();
    expect_end();
    return g;
  }

  ExprPtr single_expr()
  {
    auto e = expr();
    expect_end();
    return e;
  }

private:
  // ---- token helpers ------------------------------------------------------

  const Token & peek(std::size_t ahead = 0) const
  {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }

  const Token & next()
  {
    const Token & t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const
  {
    const Token & t = peek();
    std::string got = t.kind == TokenKind::End ? std::string("end of input") : "'" + t.text + "'";
    std::string msg = "unexpected " + got;
    if (!expected.empty()) {
      msg += ", expected ";
      for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i > 0) msg += (i + 1 == expected.size()) ? " or " : ", ";
        msg += expected[i];
      }
    }
    throw ParseError(msg, t.span, std::move(expected));
  }

  void expect_symbol(std::string_view s)
  {
    if (!peek().is_symbol(s)) fail({"'" + std::string(s) + "'"});
    next();
  }

  void expect_word(std::string_view w)
  {
    if (!peek().is_word(w)) fail({"'" + std::string(w) + "'"});
    next();
  }

  std::string expect_ident(const std::string & what)
  {
    if (peek().kind != TokenKind::Ident) fail({what});
    return next().text;
  }

  double expect_duration()
  {
    if (peek().kind != TokenKind::Duration) fail({"duration (e.g. 40s)"});
    return next().number;
  }

  void expect_end()
  {
    if (peek().kind != TokenKind::End) fail({"end of input"});
  }

  struct DepthGuard
  {
    explicit DepthGuard(Parser & p) : p_(p)
    {
      if (++p_.depth_ > kMaxParseDepth) {
        throw ParseError("nesting too deep", p_.peek().span);
      }
    }
    ~DepthGuard() { --p_.depth_; }
    DepthGuard(const DepthGuard &) = delete;
    DepthGuard & operator=(const DepthGuard &) = delete;
    Parser & p_;
  };

  // ---- declarations -------------------------------------------------------

  Value literal()
  {
    bool negative = false;
    if (peek().is_symbol("-")) {
      negative = true;
      next();
    }
    const Token & t = peek();
    if (t.kind == TokenKind::Int) {
      next();
      return Value::of_int(negative ? -t.integer : t.integer);
    }
    if (t.kind == TokenKind::Real) {
      next();
      return Value::of_real(negative ? -t.number : t.number);
    }
    if (!negative && (t.is_word("true") || t.is_word("false"))) {
      next();
      return Value::of_bool(t.text == "true");
    }
    fail({"literal"});
  }

  VariableDecl var_decl(std::string_view keyword)
  {
    VariableDecl d;
    d.span = peek().span;
    expect_word(keyword);
    d.name = expect_ident("variable name");
    expect_symbol(":");
    const Token & kind_tok = peek();
    auto kind = kind_tok.kind == TokenKind::Ident ? parse_kind(kind_tok.text) : std::nullopt;
    if (!kind) fail({"int", "real", "bool"});
    next();
    d.kind = *kind;
    if (peek().is_word("init")) {
      next();
      if (peek().is_word("in")) {
        next();
        expect_symbol("[");
        InitRange r;
        r.lo = literal();
        expect_symbol(",");
        r.hi = literal();
        expect_symbol("]");
        d.init = r;
      } else {
        d.init = literal();
      }
    }
    expect_symbol(";");
    return d;
  }

  ModuleDef module_def()
  {
    ModuleDef m;
    m.span = peek().span;
    expect_word("module");
    m.name = expect_ident("module name");
    expect_symbol("{");
    while (peek().is_word("var")) m.locals.push_back(var_decl("var"));
    if (!peek().is_word("graph")) fail({"var", "graph"});
    m.cfg = graph();
    expect_symbol("}");
    return m;
  }

  // ---- modes --------------------------------------------------------------

  Mode mode(bool & is_initial)
  {
    DepthGuard depth(*this);
    Mode m;
    m.span = peek().span;
    is_initial = false;
    if (peek().is_word("init")) {
      next();
      is_initial = true;
    }
    expect_word("mode");
    m.name = expect_ident("mode name");
    expect_word("period");
    m.period = expect_duration();
    expect_symbol("{");
    if (peek().is_word("mode") || peek().is_word("init")) {
      Mode::Composite comp;
      while (peek().is_word("mode") || peek().is_word("init")) {
        const SourceSpan child_span = peek().span;
        bool child_initial = false;
        comp.children.push_back(mode(child_initial));
        if (child_initial) {
          if (!comp.initial.empty()) {
            throw ParseError("mode '" + m.name + "' declares more than one initial child", child_span);
          }
          comp.initial = comp.children.back().name;
        }
      }
      m.body = std::move(comp);
    } else if (peek().is_word("graph")) {
      m.body = Mode::Leaf{graph()};
    } else {
      m.body = Mode::Leaf{empty_cfg()};
    }
    while (peek().is_word("transition")) m.transitions.push_back(transition());
    if (!peek().is_symbol("}")) fail({"transition", "'}'"});
    next();
    return m;
  }

  Transition transition()
  {
    Transition t;
    t.span = peek().span;
    expect_word("transition");
    expect_word("to");
    t.target = expect_ident("target mode");
    expect_word("priority");
    if (peek().kind != TokenKind::Int) fail({"integer priority"});
    t.priority = next().integer;
    expect_word("when");
    t.guard = guard();
    expect_symbol(";");
    return t;
  }

  // ---- control flow graphs -----------------------------------------------

  Cfg graph()
  {
    expect_word("graph");
    expect_symbol("{");
    Cfg cfg;
    std::vector<bool> explicit_next;
    while (!peek().is_symbol("}")) {
      if (peek().kind == TokenKind::End) fail({"'}'"});
      CfgNode n;
      n.span = peek().span;
      const SourceSpan id_span = peek().span;
      n.id = expect_ident("node label");
      if (n.id == kExitNode) {
        throw ParseError("node label 'exit' is reserved for the implicit exit node", id_span);
      }
      expect_symbol(":");
      bool has_next = false;
      std::string next_id;
      const Token & head = peek();
      if (head.is_word("if") && peek(1).is_symbol("(")) {
        next();
        expect_symbol("(");
        CfgNode::Branch b;
        b.cond = expr();
        expect_symbol(")");
        expect_symbol("->");
        b.then_node = expect_ident("node label");
        expect_word("else");
        expect_symbol("->");
        b.else_node = expect_ident("node label");
        n.op = std::move(b);
        explicit_next.push_back(true);
        expect_symbol(";");
        cfg.nodes.push_back(std::move(n));
        continue;
      }
      if (head.is_word("call") && peek(1).kind == TokenKind::Ident) {
        next();
        n.op = CfgNode::Call{next().text, {}};
      } else if (head.is_word("nop") && (peek(1).is_symbol("->") || peek(1).is_symbol(";"))) {
        next();
        n.op = CfgNode::Nop{};
      } else if (head.kind == TokenKind::Ident && peek(1).is_symbol(":=")) {
        std::string target = next().text;
        next();
        n.op = CfgNode::Assign{std::move(target), expr(), {}};
      } else {
        fail({"assignment", "if", "call", "nop"});
      }
      if (peek().is_symbol("->")) {
        next();
        next_id = expect_ident("node label");
        has_next = true;
      }
      expect_symbol(";");
      std::visit(
        [&](auto & op) {
          if constexpr (requires { op.next; }) op.next = next_id;
        },
        n.op);
      explicit_next.push_back(has_next);
      cfg.nodes.push_back(std::move(n));
    }
    next();  // '}'

    // Nodes without an explicit successor fall through to the next node.
    for (std::size_t i = 0; i < cfg.nodes.size(); ++i) {
      if (explicit_next[i]) continue;
      const std::string fallthrough =
        i + 1 < cfg.nodes.size() ? cfg.nodes[i + 1].id : std::string(kExitNode);
      std::visit(
        [&](auto & op) {
          if constexpr (requires { op.next; }) op.next = fallthrough;
        },
        cfg.nodes[i].op);
    }
    cfg.entry = cfg.nodes.empty() ? std::string(kExitNode) : cfg.nodes.front().id;
    cfg.nodes.push_back(CfgNode{std::string(kExitNode), CfgNode::Exit{}, {}});
    cfg.exit = std::string(kExitNode);
    return cfg;
  }

  // ---- expressions --------------------------------------------------------

  ExprPtr expr() { return expr_or(); }

  ExprPtr expr_or()
  {
    auto lhs = expr_and();
    while (peek().is_symbol("||")) {
      const SourceSpan span = next().span;
      lhs = ex::binary(BinaryOp::Or, lhs, expr_and(), span);
    }
    return lhs;
  }

  ExprPtr expr_and()
  {
    auto lhs = expr_cmp();
    while (peek().is_symbol("&&")) {
      const SourceSpan span = next().span;
      lhs = ex::binary(BinaryOp::And, lhs, expr_cmp(), span);
    }
    return lhs;
  }

  ExprPtr expr_cmp()
  {
    auto lhs = expr_add();
    if (auto op = comparison_op(peek())) {
      const SourceSpan span = next().span;
      lhs = ex::binary(*op, lhs, expr_add(), span);
    }
    return lhs;
  }

  ExprPtr expr_add()
  {
    auto lhs = expr_mul();
    while (peek().is_symbol("+") || peek().is_symbol("-")) {
      const Token & t = next();
      lhs = ex::binary(t.text == "+" ? BinaryOp::Add : BinaryOp::Sub, lhs, expr_mul(), t.span);
    }
    return lhs;
  }

  ExprPtr expr_mul()
  {
    auto lhs = expr_unary();
    while (peek().is_symbol("*") || peek().is_symbol("/")) {
      const Token & t = next();
      lhs = ex::binary(t.text == "*" ? BinaryOp::Mul : BinaryOp::Div, lhs, expr_unary(), t.span);
    }
    return lhs;
  }

  ExprPtr expr_unary()
  {
    DepthGuard depth(*this);
    if (peek().is_symbol("-") || peek().is_symbol("!")) {
      const Token & t = next();
      return ex::unary(t.text == "-" ? UnaryOp::Neg : UnaryOp::Not, expr_unary(), t.span);
    }
    return expr_primary();
  }

  ExprPtr expr_primary()
  {
    DepthGuard depth(*this);
    const Token & t = peek();
    switch (t.kind) {
      case TokenKind::Int:
        next();
        return ex::int_lit(t.integer, t.span);
      case TokenKind::Real:
        next();
        return ex::real_lit(t.number, t.span);
      case TokenKind::String:
        next();
        return ex::str_lit(t.text, t.span);
      case TokenKind::Ident: {
        if (t.text == "true" || t.text == "false") {
          next();
          return ex::bool_lit(t.text == "true", t.span);
        }
        if (peek(1).is_symbol("(")) {
          auto fn = builtin_from(t.text);
          if (!fn) {
            throw ParseError("unknown function '" + t.text + "'", t.span,
                             {"sqrt", "abs", "sin", "cos", "min", "max"});
          }
          next();
          next();
          std::vector<ExprPtr> args;
          if (!peek().is_symbol(")")) {
            args.push_back(expr());
            while (peek().is_symbol(",")) {
              next();
              args.push_back(expr());
            }
          }
          expect_symbol(")");
          if (args.size() != builtin_arity(*fn)) {
            throw ParseError(t.text + " expects " + std::to_string(builtin_arity(*fn)) + " argument(s)",
                             t.span);
          }
          return ex::call(*fn, std::move(args), t.span);
        }
        next();
        return ex::var(t.text, t.span);
      }
      case TokenKind::Symbol:
        if (t.is_symbol("(")) {
          next();
          auto inner = expr();
          expect_symbol(")");
          return inner;
        }
        break;
      default:
        break;
    }
    fail({"expression"});
  }

  // ---- guards -------------------------------------------------------------

  GuardPtr guard() { return normalize_guard(guard_or()); }

  GuardPtr guard_or()
  {
    auto lhs = guard_and();
    while (peek().is_symbol("||")) {
      const SourceSpan span = next().span;
      lhs = gd::either(lhs, guard_and(), span);
    }
    return lhs;
  }

  GuardPtr guard_and()
  {
    auto lhs = guard_unary();
    while (peek().is_symbol("&&")) {
      const SourceSpan span = next().span;
      lhs = gd::both(lhs, guard_unary(), span);
    }
    return lhs;
  }

  GuardPtr guard_unary()
  {
    DepthGuard depth(*this);
    if (peek().is_symbol("!")) {
      const SourceSpan span = next().span;
      return gd::negate(guard_unary(), span);
    }
    return guard_atom();
  }

  GuardPtr guard_atom()
  {
    DepthGuard depth(*this);
    const Token & t = peek();
    if (t.is_word("duration") && peek(1).is_symbol("(")) {
      next();
      next();
      auto c = expr();
      expect_symbol(",");
      const double window = expect_duration();
      expect_symbol(")");
      return gd::duration(c, window, t.span);
    }
    if (t.is_word("after") && peek(1).is_symbol("(")) {
      next();
      next();
      const double window = expect_duration();
      expect_symbol(")");
      return gd::after(window, t.span);
    }
    if (t.is_symbol("(")) {
      const std::size_t saved = pos_;
      try {
        next();
        auto inner = guard_or();
        expect_symbol(")");
        if (!is_arith_or_cmp_symbol(peek())) return inner;
      } catch (const ParseError &) {
      }
      pos_ = saved;
    }
    return gd::cond(expr_cmp(), t.span);
  }

  // ---- formulas -----------------------------------------------------------

  FormulaPtr formula()
  {
    DepthGuard depth(*this);
    auto lhs = formula_implies();
    if (peek().is_symbol(";")) {
      // In a property file a ';' followed by `prop` or end of input terminates the entry.
      if (in_property_file_ && (peek(1).is_word("prop") || peek(1).kind == TokenKind::End)) {
        return lhs;
      }
      next();
      return fm::chop(lhs, formula());
    }
    return lhs;
  }

  FormulaPtr formula_implies()
  {
    DepthGuard depth(*this);
    auto lhs = formula_or();
    if (peek().is_symbol("=>")) {
      next();
      return fm::implies(lhs, formula_implies());
    }
    return lhs;
  }

  FormulaPtr formula_or()
  {
    auto lhs = formula_and();
    while (peek().is_symbol("||")) {
      next();
      lhs = fm::disj(lhs, formula_and());
    }
    return lhs;
  }

  FormulaPtr formula_and()
  {
    auto lhs = formula_unary();
    while (peek().is_symbol("&&")) {
      next();
      lhs = fm::conj(lhs, formula_unary());
    }
    return lhs;
  }

  FormulaPtr formula_unary()
  {
    DepthGuard depth(*this);
    if (peek().is_symbol("!")) {
      next();
      return fm::negate(formula_unary());
    }
    if (peek().is_symbol("[") && peek(1).is_symbol("]")) {
      next();
      next();
      return fm::box(formula_unary());
    }
    return formula_atom();
  }

  FormulaPtr formula_atom()
  {
    DepthGuard depth(*this);
    const Token & t = peek();
    if (t.is_word("tt")) {
      next();
      return fm::tt();
    }
    if (t.is_word("len")) {
      next();
      auto op = comparison_op(peek());
      if (!op) fail({"comparison operator"});
      next();
      const Token & num = peek();
      if (num.kind != TokenKind::Int && num.kind != TokenKind::Real && num.kind != TokenKind::Duration) {
        fail({"number of seconds"});
      }
      next();
      return fm::len(*op, num.number);
    }
    if (t.is_symbol("(")) {
      const std::size_t saved = pos_;
      const bool saved_prop = in_property_file_;
      try {
        next();
        in_property_file_ = false;
        auto inner = formula();
        in_property_file_ = saved_prop;
        expect_symbol(")");
        if (!is_arith_or_cmp_symbol(peek())) return inner;
      } catch (const ParseError &) {
      }
      in_property_file_ = saved_prop;
      pos_ = saved;
    }
    return fm::pred(expr_cmp(), t.span);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  bool in_property_file_ = false;
};

}  // namespace

Model parse_model(std::string_view text, const std::string & file) { return Parser(text, file).model(); }

FormulaPtr parse_formula(std::string_view text, const std::string & file)
{
  return Parser(text, file).single_formula();
}

std::vector<Property> parse_properties(std::string_view text, const std::string & file)
{
  return Parser(text, file).properties();
}

GuardPtr parse_guard(std::string_view text, const std::string & file)
{
  return Parser(text, file).single_guard();
}

ExprPtr parse_expr(std::string_view text, const std::string & file)
{
  return Parser(text, file).single_expr();
}

}  // namespace mdm
