// mdm/interval_eval.hpp - Interval-logic formulas over finite traces
#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "mdm/ast.hpp"
#include "mdm/expr_eval.hpp"
#include "mdm/trace.hpp"

namespace mdm
{

/// Half-open range [lo, hi) of snapshot indices.
struct Interval
{
  std::size_t lo = 0;
  std::size_t hi = 0;
};

/// A formula type-checked and bound to a trace schema's column layout.
class CompiledFormula
{
public:
  enum class Kind : std::uint8_t { True, Pred, Len, Not, And, Or, Implies, Chop, Box };

  struct Node
  {
    Kind kind = Kind::True;
    std::int32_t a = -1;
    std::int32_t b = -1;
    std::int32_t expr = -1;  // Pred
    BinaryOp cmp = BinaryOp::Ge;
    double seconds = 0.0;
    // Truth on [x, y) implies truth on every non-empty [x, y') with y' <= y.
    bool prefix_closed = false;
    // Truth on [x, y) implies truth on every non-empty [x', y) with x' >= x.
    bool suffix_closed = false;
    std::int32_t slot = -1;  // per-kind cache slot (Pred, Box, Chop)
  };

  /// Throws TypeError if a predicate is not boolean over the schema's columns
  /// and mode observables.
  CompiledFormula(const Formula & formula, std::shared_ptr<const TraceSchema> schema);

  const TraceSchema & schema() const { return *schema_; }
  const std::vector<Node> & nodes() const { return nodes_; }
  std::int32_t root() const { return root_; }
  const ExprCode & exprs() const { return exprs_; }
  std::size_t pred_count() const { return preds_; }
  std::size_t box_count() const { return boxes_; }
  std::size_t chop_count() const { return chops_; }

private:
  std::int32_t lower(const Formula & f);

  std::shared_ptr<const TraceSchema> schema_;
  std::vector<Node> nodes_;
  ExprCode exprs_;
  std::int32_t root_ = -1;
  std::size_t preds_ = 0;
  std::size_t boxes_ = 0;
  std::size_t chops_ = 0;
};

/// Memoising evaluator for one formula over a window of one trace. Queries
/// are relative to the window; intervals never look outside themselves, so a
/// window over a whole trace answers every prefix query of that trace.
class IntervalEvaluator
{
public:
  /// Evaluates every predicate at every snapshot of the window up front and
  /// throws EvalError if any of them fails.
  IntervalEvaluator(const CompiledFormula & formula, const Trace & trace, Interval window);
  IntervalEvaluator(const CompiledFormula & formula, const Trace & trace)
  : IntervalEvaluator(formula, trace, Interval{0, trace.size()})
  {
  }

  std::size_t size() const { return n_; }
  bool holds(Interval iv);

private:
  struct Column
  {
    std::vector<std::uint64_t> bits;
    std::uint32_t filled = 0;
  };

  bool eval(std::int32_t node, std::uint32_t lo, std::uint32_t hi);
  bool eval_chop(std::int32_t node, std::uint32_t lo, std::uint32_t hi);
  bool len_holds(const CompiledFormula::Node & n, std::uint32_t lo, std::uint32_t hi) const;
  std::uint32_t first_false_end(std::int32_t node, std::uint32_t a);
  std::uint32_t first_stable_start(std::int32_t node, std::uint32_t hi);
  const std::vector<std::uint32_t> & box_reach(std::int32_t node);
  bool any_right(std::int32_t node, std::uint32_t m0, std::uint32_t m1, std::uint32_t hi);
  bool any_left(std::int32_t node, std::uint32_t lo, std::uint32_t m0, std::uint32_t m1);
  double time(std::uint32_t i) const { return trace_.time(base_ + i); }

  const CompiledFormula & f_;
  const Trace & trace_;
  std::size_t base_ = 0;
  std::uint32_t n_ = 0;

  std::vector<std::vector<std::uint32_t>> next_false_;   // per Pred: first false index >= i, n if none
  std::vector<std::vector<std::uint32_t>> stable_from_;  // per Pred: 1 + last false index < i, 0 if none
  std::vector<std::vector<std::uint32_t>> reach_;        // per Box: largest hi with Box on [i, hi)
  std::vector<std::vector<Column>> right_cols_;          // per Chop, by hi
  std::vector<std::vector<Column>> left_cols_;           // per Chop, by lo
  std::vector<std::unordered_map<std::uint64_t, bool>> memo_;
};

/// eval(formula, trace, interval); throws DomainError for an interval outside
/// the trace, TypeError / EvalError as described above.
bool eval(const Formula & formula, const Trace & trace, Interval iv);

/// Reference semantics by exhaustive recursion over every split and
/// subinterval, without memoisation. Same contract as eval.
bool eval_bruteforce(const Formula & formula, const Trace & trace, Interval iv);

}  // namespace mdm
