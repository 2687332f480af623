// mdm/simulator.hpp - Period-by-period execution of a compiled model
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mdm/environment.hpp"
#include "mdm/program.hpp"
#include "mdm/rng.hpp"
#include "mdm/trace.hpp"

namespace mdm
{

/// Residence bookkeeping for one duration/after atom. `periods` counts whole
/// periods; `elapsed` sums their lengths, which is what windows compare against.
struct GuardCounter
{
  std::int64_t periods = 0;
  double elapsed = 0.0;
};

/// True iff `elapsed` reaches `window` (with a relative tolerance of 1e-9 so
/// that forty 1s periods satisfy a 40s window despite rounding).
bool window_reached(double elapsed, double window);

struct EnabledTransition
{
  std::int32_t source = -1;  // mode index
  std::int32_t depth = 0;
  std::int64_t priority = 1;
  std::int32_t target = -1;
};

/// Innermost source first, then lowest priority number; nullopt when empty.
std::optional<EnabledTransition> select_transition(std::span<const EnabledTransition> enabled);

struct SimState
{
  std::vector<Value> values;        // one per program slot
  std::vector<std::int32_t> path;   // active modes, root..leaf
  std::vector<GuardCounter> counters;
  double time = 0.0;
  std::uint64_t periods = 0;
  std::vector<EnabledTransition> scratch;
};

/// Samples interval-initialised variables and enters the initial leaf.
SimState init_state(const Program & program, Rng & rng);

struct PeriodOutcome
{
  std::int32_t leaf = -1;  // leaf whose CFG ran this period
  std::optional<EnabledTransition> taken;
};

/// Optional per-period report of every temporal atom on the active chain,
/// as evaluated at the period end (after counter update).
struct AtomVerdict
{
  std::int32_t atom = -1;
  bool value = false;
};

/// One control-loop iteration: sense, compute, advance time, update counters,
/// select and take at most one transition. Throws EvalError.
PeriodOutcome run_period(const Program & program, SimState & state, Environment & env,
                         std::vector<AtomVerdict> * verdicts = nullptr);

/// Runs `periods` periods from a random initial state drawn from the stream of
/// (seed, trace_index). A runtime error ends the trace early and marks it poisoned.
Trace simulate(const Program & program, Environment & env, std::size_t periods, std::uint64_t seed,
               std::uint64_t trace_index = 0);

}  // namespace mdm
