// src/interval_eval.cpp - Interval-logic evaluation: memoised fast path and exhaustive reference
#include "mdm/interval_eval.hpp"

#include <algorithm>
#include <limits>

#include "mdm/errors.hpp"
#include "mdm/validate.hpp"

namespace mdm
{

namespace
{

using Kind = CompiledFormula::Kind;

bool compare_len(BinaryOp cmp, double len, double w)
{
  switch (cmp) {
    case BinaryOp::Eq: return len == w;
    case BinaryOp::Ne: return len != w;
    case BinaryOp::Lt: return len < w;
    case BinaryOp::Le: return len <= w;
    case BinaryOp::Gt: return len > w;
    default: return len >= w;
  }
}

void push_bit(std::vector<std::uint64_t> & bits, std::uint32_t & filled, bool v)
{
  if ((filled >> 6) >= bits.size()) bits.push_back(0);
  if (v) bits[filled >> 6] |= std::uint64_t{1} << (filled & 63);
  ++filled;
}

/// Any set bit with index in [j0, j1].
bool any_bit(const std::vector<std::uint64_t> & bits, std::uint32_t j0, std::uint32_t j1)
{
  if (j0 > j1) return false;
  std::uint32_t w0 = j0 >> 6;
  const std::uint32_t w1 = j1 >> 6;
  const std::uint64_t lo_mask = ~std::uint64_t{0} << (j0 & 63);
  const std::uint64_t hi_mask = ~std::uint64_t{0} >> (63 - (j1 & 63));
  if (w0 == w1) return (bits[w0] & lo_mask & hi_mask) != 0;
  if (bits[w0] & lo_mask) return true;
  for (++w0; w0 < w1; ++w0) {
    if (bits[w0]) return true;
  }
  return (bits[w1] & hi_mask) != 0;
}

void check_window(const Trace & trace, Interval iv)
{
  if (iv.lo > iv.hi || iv.hi > trace.size()) {
    throw DomainError("interval [" + std::to_string(iv.lo) + ", " + std::to_string(iv.hi) +
                      ") is outside a trace of " + std::to_string(trace.size()) + " snapshots");
  }
  if (trace.size() >= std::numeric_limits<std::uint32_t>::max()) throw DomainError("trace too long");
}

bool pred_at(const CompiledFormula & f, std::int32_t expr, const Trace & trace, std::size_t i)
{
  return evaluate(f.exprs(), expr, EvalContext{trace.values(i), &trace.path(i)}).as_bool();
}

}  // namespace

// ---------------------------------------------------------------------------
// Compilation

CompiledFormula::CompiledFormula(const Formula & formula, std::shared_ptr<const TraceSchema> schema)
: schema_(std::move(schema))
{
  TypeEnv env;
  for (const auto & c : schema_->columns) env.vars.emplace(c.name, c.kind);
  env.mode_observables = true;
  typecheck_formula(formula, env);
  root_ = lower(formula);
}

std::int32_t CompiledFormula::lower(const Formula & f)
{
  Node node;
  std::visit(
    [&](const auto & n) {
      using T = std::decay_t<decltype(n)>;
      if constexpr (std::is_same_v<T, Formula::True>) {
        node.kind = Kind::True;
        node.prefix_closed = node.suffix_closed = true;
      } else if constexpr (std::is_same_v<T, Formula::Pred>) {
        node.kind = Kind::Pred;
        const auto & schema = *schema_;
        const SlotResolver resolve = [&](std::string_view name) -> std::optional<std::int32_t> {
          const int idx = schema.column_index(name);
          if (idx < 0) return std::nullopt;
          return idx;
        };
        node.expr = compile_expr(*n.expr, exprs_, resolve, true);
        node.prefix_closed = node.suffix_closed = true;
        node.slot = static_cast<std::int32_t>(preds_++);
      } else if constexpr (std::is_same_v<T, Formula::Len>) {
        node.kind = Kind::Len;
        node.cmp = n.cmp;
        node.seconds = n.seconds;
        node.prefix_closed = node.suffix_closed = n.cmp == BinaryOp::Le || n.cmp == BinaryOp::Lt;
      } else if constexpr (std::is_same_v<T, Formula::Not>) {
        node.kind = Kind::Not;
        node.a = lower(*n.operand);
      } else if constexpr (std::is_same_v<T, Formula::Box>) {
        node.kind = Kind::Box;
        node.a = lower(*n.operand);
        node.prefix_closed = node.suffix_closed = true;
        node.slot = static_cast<std::int32_t>(boxes_++);
      } else {
        node.a = lower(*n.lhs);
        node.b = lower(*n.rhs);
        const Node & l = nodes_[static_cast<std::size_t>(node.a)];
        const Node & r = nodes_[static_cast<std::size_t>(node.b)];
        switch (n.op) {
          case Connective::And:
          case Connective::Or:
            node.kind = n.op == Connective::And ? Kind::And : Kind::Or;
            node.prefix_closed = l.prefix_closed && r.prefix_closed;
            node.suffix_closed = l.suffix_closed && r.suffix_closed;
            break;
          case Connective::Implies:
            node.kind = Kind::Implies;
            break;
          case Connective::Chop:
            node.kind = Kind::Chop;
            node.slot = static_cast<std::int32_t>(chops_++);
            break;
        }
      }
    },
    f.node);
  nodes_.push_back(node);
  return static_cast<std::int32_t>(nodes_.size() - 1);
}

// ---------------------------------------------------------------------------
// Fast evaluator

IntervalEvaluator::IntervalEvaluator(const CompiledFormula & formula, const Trace & trace, Interval window)
: f_(formula), trace_(trace), base_(window.lo)
{
  check_window(trace, window);
  n_ = static_cast<std::uint32_t>(window.hi - window.lo);
  next_false_.resize(f_.pred_count());
  stable_from_.resize(f_.pred_count());
  reach_.resize(f_.box_count());
  right_cols_.resize(f_.chop_count());
  left_cols_.resize(f_.chop_count());
  memo_.resize(f_.chop_count());

  std::vector<std::uint8_t> truth(n_);
  for (const auto & node : f_.nodes()) {
    if (node.kind != Kind::Pred) continue;
    for (std::uint32_t i = 0; i < n_; ++i) truth[i] = pred_at(f_, node.expr, trace_, base_ + i);
    auto & nf = next_false_[static_cast<std::size_t>(node.slot)];
    auto & sf = stable_from_[static_cast<std::size_t>(node.slot)];
    nf.assign(n_ + 1, n_);
    sf.assign(n_ + 1, 0);
    for (std::uint32_t i = n_; i-- > 0;) nf[i] = truth[i] ? nf[i + 1] : i;
    for (std::uint32_t i = 1; i <= n_; ++i) sf[i] = truth[i - 1] ? sf[i - 1] : i;
  }
}

bool IntervalEvaluator::holds(Interval iv)
{
  if (iv.lo > iv.hi || iv.hi > n_) {
    throw DomainError("interval [" + std::to_string(iv.lo) + ", " + std::to_string(iv.hi) +
                      ") is outside the evaluation window of " + std::to_string(n_) + " snapshots");
  }
  return eval(f_.root(), static_cast<std::uint32_t>(iv.lo), static_cast<std::uint32_t>(iv.hi));
}

bool IntervalEvaluator::len_holds(const CompiledFormula::Node & n, std::uint32_t lo, std::uint32_t hi) const
{
  const double len = hi - lo <= 1 ? 0.0 : time(hi - 1) - time(lo);
  return compare_len(n.cmp, len, n.seconds);
}

bool IntervalEvaluator::eval(std::int32_t at, std::uint32_t lo, std::uint32_t hi)
{
  const auto & n = f_.nodes()[static_cast<std::size_t>(at)];
  switch (n.kind) {
    case Kind::True:
      return true;
    case Kind::Pred:
      return hi > lo && next_false_[static_cast<std::size_t>(n.slot)][lo] >= hi;
    case Kind::Len:
      return len_holds(n, lo, hi);
    case Kind::Not:
      return !eval(n.a, lo, hi);
    case Kind::And:
      return eval(n.a, lo, hi) && eval(n.b, lo, hi);
    case Kind::Or:
      return eval(n.a, lo, hi) || eval(n.b, lo, hi);
    case Kind::Implies:
      return !eval(n.a, lo, hi) || eval(n.b, lo, hi);
    case Kind::Box:
      return hi > lo && hi <= box_reach(at)[lo];
    case Kind::Chop:
      return eval_chop(at, lo, hi);
  }
  return false;
}

// Smallest b in (a, n] with the node false on [a, b), or n + 1. Prefix-closed nodes only.
std::uint32_t IntervalEvaluator::first_false_end(std::int32_t at, std::uint32_t a)
{
  const auto & n = f_.nodes()[static_cast<std::size_t>(at)];
  switch (n.kind) {
    case Kind::True:
      return n_ + 1;
    case Kind::Pred:
      return next_false_[static_cast<std::size_t>(n.slot)][a] + 1;
    case Kind::Box:
      return box_reach(at)[a] + 1;
    case Kind::And:
      return std::min(first_false_end(n.a, a), first_false_end(n.b, a));
    case Kind::Or:
      return std::max(first_false_end(n.a, a), first_false_end(n.b, a));
    case Kind::Len: {
      // Len only grows with b, so <= / < hold on a prefix of (a, n].
      std::uint32_t lo = a + 1;
      std::uint32_t hi = n_ + 1;
      while (lo < hi) {
        const std::uint32_t mid = lo + (hi - lo) / 2;
        if (len_holds(n, a, mid)) {
          lo = mid + 1;
        } else {
          hi = mid;
        }
      }
      return lo;
    }
    default:
      throw std::logic_error("first_false_end on a node that is not prefix-closed");
  }
}

// Smallest m in [0, hi] with the node true on every [m', hi), m <= m' < hi. Suffix-closed nodes only.
std::uint32_t IntervalEvaluator::first_stable_start(std::int32_t at, std::uint32_t hi)
{
  const auto & n = f_.nodes()[static_cast<std::size_t>(at)];
  switch (n.kind) {
    case Kind::True:
      return 0;
    case Kind::Pred:
      return stable_from_[static_cast<std::size_t>(n.slot)][hi];
    case Kind::Box: {
      const auto & reach = box_reach(at);
      return static_cast<std::uint32_t>(std::lower_bound(reach.begin(), reach.begin() + hi + 1, hi) - reach.begin());
    }
    case Kind::And:
      return std::max(first_stable_start(n.a, hi), first_stable_start(n.b, hi));
    case Kind::Or:
      return std::min(first_stable_start(n.a, hi), first_stable_start(n.b, hi));
    case Kind::Len: {
      std::uint32_t lo = 0;
      std::uint32_t top = hi;
      while (lo < top) {
        const std::uint32_t mid = lo + (top - lo) / 2;
        if (len_holds(n, mid, hi)) {
          top = mid;
        } else {
          lo = mid + 1;
        }
      }
      return lo;
    }
    default:
      throw std::logic_error("first_stable_start on a node that is not suffix-closed");
  }
}

// reach[i] is the largest hi such that the operand holds on every non-empty
// subinterval of [i, hi). It is non-decreasing in i and reach[n] = n.
const std::vector<std::uint32_t> & IntervalEvaluator::box_reach(std::int32_t at)
{
  const auto & n = f_.nodes()[static_cast<std::size_t>(at)];
  auto & reach = reach_[static_cast<std::size_t>(n.slot)];
  if (!reach.empty()) return reach;
  std::vector<std::uint32_t> r(n_ + 1);
  r[n_] = n_;
  const bool closed = f_.nodes()[static_cast<std::size_t>(n.a)].prefix_closed;
  for (std::uint32_t a = n_; a-- > 0;) {
    if (closed) {
      r[a] = std::min(first_false_end(n.a, a) - 1, r[a + 1]);
      continue;
    }
    r[a] = r[a + 1];
    for (std::uint32_t b = a + 1; b <= r[a + 1]; ++b) {
      if (!eval(n.a, a, b)) {
        r[a] = b - 1;
        break;
      }
    }
  }
  reach = std::move(r);
  return reach;
}

// Exists m in [m0, m1] with the right operand true on [m, hi).
bool IntervalEvaluator::any_right(std::int32_t at, std::uint32_t m0, std::uint32_t m1, std::uint32_t hi)
{
  const auto & n = f_.nodes()[static_cast<std::size_t>(at)];
  if (m0 > m1) return false;
  if (f_.nodes()[static_cast<std::size_t>(n.b)].suffix_closed) {
    if (m1 == hi && eval(n.b, hi, hi)) return true;
    const std::uint32_t from = std::max(m0, first_stable_start(n.b, hi));
    return from <= std::min(m1, hi - 1) && from < hi;
  }
  auto & cols = right_cols_[static_cast<std::size_t>(n.slot)];
  if (cols.empty()) cols.resize(n_ + 1);
  Column & col = cols[hi];
  // Bit j records the right operand on [hi - j, hi).
  const std::uint32_t need = hi - m0 + 1;
  while (col.filled < need) {
    const std::uint32_t m = hi - col.filled;
    const bool v = eval(n.b, m, hi);
    push_bit(col.bits, col.filled, v);
  }
  return any_bit(col.bits, hi - m1, hi - m0);
}

// Exists m in [m0, m1] with the left operand true on [lo, m).
bool IntervalEvaluator::any_left(std::int32_t at, std::uint32_t lo, std::uint32_t m0, std::uint32_t m1)
{
  const auto & n = f_.nodes()[static_cast<std::size_t>(at)];
  if (m0 > m1) return false;
  auto & cols = left_cols_[static_cast<std::size_t>(n.slot)];
  if (cols.empty()) cols.resize(n_ + 1);
  Column & col = cols[lo];
  // Bit j records the left operand on [lo, lo + j).
  const std::uint32_t need = m1 - lo + 1;
  while (col.filled < need) {
    const std::uint32_t m = lo + col.filled;
    const bool v = eval(n.a, lo, m);
    push_bit(col.bits, col.filled, v);
  }
  return any_bit(col.bits, m0 - lo, m1 - lo);
}

bool IntervalEvaluator::eval_chop(std::int32_t at, std::uint32_t lo, std::uint32_t hi)
{
  const auto & n = f_.nodes()[static_cast<std::size_t>(at)];
  const auto & left = f_.nodes()[static_cast<std::size_t>(n.a)];
  const auto & right = f_.nodes()[static_cast<std::size_t>(n.b)];

  if (left.prefix_closed) {
    // The left operand holds on [lo, m) exactly for m in (lo, end), plus possibly m = lo.
    if (eval(n.a, lo, lo) && eval(n.b, lo, hi)) return true;
    if (hi == lo) return false;
    const std::uint32_t top = std::min(hi, first_false_end(n.a, lo) - 1);
    return top > lo && any_right(at, lo + 1, top, hi);
  }
  if (right.suffix_closed) {
    // The right operand holds on [m, hi) exactly for m in [start, hi), plus possibly m = hi.
    if (eval(n.b, hi, hi) && eval(n.a, lo, hi)) return true;
    if (hi == lo) return false;
    const std::uint32_t from = std::max(lo, first_stable_start(n.b, hi));
    return from < hi && any_left(at, lo, from, hi - 1);
  }

  auto & memo = memo_[static_cast<std::size_t>(n.slot)];
  const std::uint64_t key = (std::uint64_t{lo} << 32) | hi;
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  bool result = false;
  for (std::uint32_t m = lo; m <= hi && !result; ++m) {
    result = eval(n.a, lo, m) && eval(n.b, m, hi);
  }
  memo.emplace(key, result);
  return result;
}

// ---------------------------------------------------------------------------
// Entry points

bool eval(const Formula & formula, const Trace & trace, Interval iv)
{
  check_window(trace, iv);
  const CompiledFormula compiled(formula, trace.schema_ptr());
  IntervalEvaluator ev(compiled, trace, iv);
  return ev.holds(Interval{0, iv.hi - iv.lo});
}

namespace
{

class BruteForce
{
public:
  BruteForce(const CompiledFormula & f, const Trace & trace) : f_(f), trace_(trace) {}

  bool eval(std::int32_t at, std::size_t lo, std::size_t hi) const
  {
    const auto & n = f_.nodes()[static_cast<std::size_t>(at)];
    switch (n.kind) {
      case Kind::True:
        return true;
      case Kind::Pred:
        if (hi == lo) return false;
        for (std::size_t i = lo; i < hi; ++i) {
          if (!pred_at(f_, n.expr, trace_, i)) return false;
        }
        return true;
      case Kind::Len: {
        const double len = hi - lo <= 1 ? 0.0 : trace_.time(hi - 1) - trace_.time(lo);
        return compare_len(n.cmp, len, n.seconds);
      }
      case Kind::Not:
        return !eval(n.a, lo, hi);
      case Kind::And:
        return eval(n.a, lo, hi) && eval(n.b, lo, hi);
      case Kind::Or:
        return eval(n.a, lo, hi) || eval(n.b, lo, hi);
      case Kind::Implies:
        return !eval(n.a, lo, hi) || eval(n.b, lo, hi);
      case Kind::Chop:
        for (std::size_t m = lo; m <= hi; ++m) {
          if (eval(n.a, lo, m) && eval(n.b, m, hi)) return true;
        }
        return false;
      case Kind::Box:
        if (hi == lo) return false;
        for (std::size_t a = lo; a < hi; ++a) {
          for (std::size_t b = a + 1; b <= hi; ++b) {
            if (!eval(n.a, a, b)) return false;
          }
        }
        return true;
    }
    return false;
  }

private:
  const CompiledFormula & f_;
  const Trace & trace_;
};

}  // namespace

bool eval_bruteforce(const Formula & formula, const Trace & trace, Interval iv)
{
  check_window(trace, iv);
  const CompiledFormula compiled(formula, trace.schema_ptr());
  // Same error contract as eval: every predicate at every snapshot of the interval.
  for (const auto & node : compiled.nodes()) {
    if (node.kind != Kind::Pred) continue;
    for (std::size_t i = iv.lo; i < iv.hi; ++i) pred_at(compiled, node.expr, trace, i);
  }
  return BruteForce(compiled, trace).eval(compiled.root(), iv.lo, iv.hi);
}

}  // namespace mdm
