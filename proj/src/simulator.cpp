// src/simulator.cpp - Control loop, guard counters, transition selection
#include "mdm/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "mdm/errors.hpp"

namespace mdm
{

namespace
{

Value initial_value(const Slot & s, Rng & rng)
{
  return std::visit(
    [&](const auto & init) -> Value {
      using T = std::decay_t<decltype(init)>;
      if constexpr (std::is_same_v<T, std::monostate>) {
        return Value::zero(s.kind);
      } else if constexpr (std::is_same_v<T, Value>) {
        return init.coerce_to(s.kind);
      } else {
        switch (s.kind) {
          case ValueKind::Int:
            return Value::of_int(rng.uniform_int(init.lo.as_int(), init.hi.as_int()));
          case ValueKind::Real:
            return Value::of_real(rng.uniform_real(init.lo.as_real(), init.hi.as_real()));
          case ValueKind::Bool: {
            const std::int64_t lo = init.lo.as_bool() ? 1 : 0;
            const std::int64_t hi = init.hi.as_bool() ? 1 : 0;
            return Value::of_bool(rng.uniform_int(lo, hi) == 1);
          }
        }
        return Value::zero(s.kind);
      }
    },
    s.init);
}

Value local_init(const Slot & s)
{
  if (const auto * v = std::get_if<Value>(&s.init)) return v->coerce_to(s.kind);
  return Value::zero(s.kind);
}

class Machine
{
public:
  Machine(const Program & p, SimState & s) : p_(p), s_(s) {}

  void run_cfg(const CfgCode & cfg)
  {
    std::int32_t at = cfg.entry;
    while (true) {
      const CfgInstr & in = cfg.nodes[static_cast<std::size_t>(at)];
      switch (in.kind) {
        case CfgInstr::Kind::Exit:
          return;
        case CfgInstr::Kind::Assign:
          s_.values[static_cast<std::size_t>(in.slot)] =
            eval(in.expr).coerce_to(p_.slots[static_cast<std::size_t>(in.slot)].kind);
          at = in.next;
          break;
        case CfgInstr::Kind::Branch:
          at = eval(in.expr).as_bool() ? in.next : in.other;
          break;
        case CfgInstr::Kind::Call: {
          const ModuleCode & m = p_.modules[static_cast<std::size_t>(in.module)];
          for (std::int32_t slot : m.locals) {
            s_.values[static_cast<std::size_t>(slot)] = local_init(p_.slots[static_cast<std::size_t>(slot)]);
          }
          run_cfg(m.cfg);
          at = in.next;
          break;
        }
        case CfgInstr::Kind::Nop:
          at = in.next;
          break;
      }
    }
  }

  Value eval(std::int32_t expr) const { return evaluate(p_.exprs, expr, EvalContext{s_.values, nullptr}); }

  bool atom_holds(std::int32_t id) const
  {
    const TemporalAtom & atom = p_.temporal[static_cast<std::size_t>(id)];
    return window_reached(s_.counters[static_cast<std::size_t>(id)].elapsed, atom.window);
  }

  bool guard_holds(std::int32_t id) const
  {
    const GuardNode & g = p_.guards[static_cast<std::size_t>(id)];
    switch (g.kind) {
      case GuardNode::Kind::Cond:
        return eval(g.expr).as_bool();
      case GuardNode::Kind::Duration:
      case GuardNode::Kind::After:
        return atom_holds(g.counter);
      case GuardNode::Kind::Not:
        return !guard_holds(g.a);
      case GuardNode::Kind::And:
        return guard_holds(g.a) && guard_holds(g.b);
      case GuardNode::Kind::Or:
        return guard_holds(g.a) || guard_holds(g.b);
    }
    return false;
  }

  void update_counters(double dt)
  {
    for (std::int32_t mode : s_.path) {
      for (std::int32_t id : p_.modes[static_cast<std::size_t>(mode)].counters) {
        const TemporalAtom & atom = p_.temporal[static_cast<std::size_t>(id)];
        GuardCounter & c = s_.counters[static_cast<std::size_t>(id)];
        if (atom.kind == GuardNode::Kind::Duration && !eval(atom.cond).as_bool()) {
          c = GuardCounter{};
        } else {
          ++c.periods;
          c.elapsed += dt;
        }
      }
    }
  }

  void enter(std::int32_t depth, std::int32_t target)
  {
    s_.path.resize(static_cast<std::size_t>(depth));
    for (std::int32_t at = target;; at = p_.modes[static_cast<std::size_t>(at)].initial) {
      s_.path.push_back(at);
      if (p_.modes[static_cast<std::size_t>(at)].leaf) break;
    }
    const ModeCode & t = p_.modes[static_cast<std::size_t>(target)];
    for (std::int32_t m = target; m < t.subtree_end; ++m) {
      for (std::int32_t id : p_.modes[static_cast<std::size_t>(m)].counters) {
        s_.counters[static_cast<std::size_t>(id)] = GuardCounter{};
      }
    }
  }

private:
  const Program & p_;
  SimState & s_;
};

}  // namespace

bool window_reached(double elapsed, double window)
{
  return elapsed >= window - 1e-9 * std::max(1.0, window);
}

std::optional<EnabledTransition> select_transition(std::span<const EnabledTransition> enabled)
{
  std::optional<EnabledTransition> best;
  for (const auto & t : enabled) {
    if (!best || t.depth > best->depth || (t.depth == best->depth && t.priority < best->priority)) best = t;
  }
  return best;
}

SimState init_state(const Program & program, Rng & rng)
{
  SimState s;
  s.values.reserve(program.slots.size());
  for (std::size_t i = 0; i < program.slots.size(); ++i) {
    const Slot & slot = program.slots[i];
    s.values.push_back(slot.role == SlotRole::Local ? local_init(slot) : initial_value(slot, rng));
  }
  s.path = program.entry_path(0);
  s.counters.assign(program.temporal.size(), GuardCounter{});
  return s;
}

PeriodOutcome run_period(const Program & program, SimState & state, Environment & env,
                         std::vector<AtomVerdict> * verdicts)
{
  Machine m(program, state);
  PeriodOutcome out;
  out.leaf = state.path.back();
  const ModeCode & leaf = program.modes[static_cast<std::size_t>(out.leaf)];
  const double dt = leaf.period;

  auto values = std::span<Value>(state.values);
  env.step(values.subspan(program.outputs_begin, program.outputs_end - program.outputs_begin), state.time, dt,
           values.subspan(program.inputs_begin, program.inputs_end - program.inputs_begin));
  for (std::size_t k = program.inputs_begin; k < program.inputs_end; ++k) {
    state.values[k] = state.values[k].coerce_to(program.slots[k].kind);
  }

  m.run_cfg(leaf.cfg);
  state.time += dt;
  m.update_counters(dt);

  if (verdicts) {
    verdicts->clear();
    for (std::int32_t mode : state.path) {
      for (std::int32_t id : program.modes[static_cast<std::size_t>(mode)].counters) {
        verdicts->push_back(AtomVerdict{id, m.atom_holds(id)});
      }
    }
  }

  state.scratch.clear();
  for (std::size_t depth = 0; depth < state.path.size(); ++depth) {
    const ModeCode & mode = program.modes[static_cast<std::size_t>(state.path[depth])];
    for (const auto & t : mode.transitions) {
      if (m.guard_holds(t.guard)) {
        state.scratch.push_back(
          EnabledTransition{state.path[depth], static_cast<std::int32_t>(depth), t.priority, t.target});
      }
    }
  }
  out.taken = select_transition(state.scratch);
  if (out.taken) m.enter(out.taken->depth, out.taken->target);
  ++state.periods;
  return out;
}

Trace simulate(const Program & program, Environment & env, std::size_t periods, std::uint64_t seed,
               std::uint64_t trace_index)
{
  if (periods == 0) throw DomainError("period bound must be at least 1");
  Rng rng = Rng::for_trace(seed, trace_index);
  SimState state = init_state(program, rng);
  const auto values = std::span<const Value>(state.values);
  env.reset(rng.next_u64(), values.subspan(program.inputs_begin, program.inputs_end - program.inputs_begin));

  Trace trace(program.schema);
  trace.model_name = program.name;
  trace.seed = seed;
  trace.index = trace_index;
  trace.reserve(periods);
  const auto globals = std::span<const Value>(state.values).first(program.num_globals);
  for (std::size_t i = 0; i < periods; ++i) {
    PeriodOutcome out;
    try {
      out = run_period(program, state, env);
    } catch (const EvalError & e) {
      trace.poisoned = true;
      trace.poison_reason = "period " + std::to_string(i) + ": " + e.what();
      break;
    }
    trace.push(state.time, static_cast<std::uint32_t>(program.modes[static_cast<std::size_t>(out.leaf)].path_id),
               globals);
  }
  return trace;
}

}  // namespace mdm
