// src/smc.cpp - Sample sizing, parallel trace generation and verdict aggregation
#include "mdm/smc.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "mdm/errors.hpp"
#include "mdm/interval_eval.hpp"
#include "mdm/simulator.hpp"
#include "mdm/trace_io.hpp"

namespace mdm
{

std::uint64_t required_samples(double delta, double epsilon)
{
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1), got " + format_real(delta));
  if (!(epsilon > 0.0 && epsilon <= 2.0)) throw DomainError("epsilon must lie in (0, 2], got " + format_real(epsilon));
  const double x = 4.0 * std::log(1.0 / delta) / (epsilon * epsilon);
  if (!(x < 0x1.0p53)) throw DomainError("sample count overflows");
  // Absorb rounding in the logarithm (and truncated constants such as 1/e
  // written to seven digits) so that an exact integer is not bumped up.
  const double n = std::ceil(x - 1e-6);
  return n < 1.0 ? 1 : static_cast<std::uint64_t>(n);
}

void check_config(const SmcConfig & cfg)
{
  if (!cfg.unsafe_params) {
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) {
      throw DomainError("epsilon must lie in (0, 1); --unsafe-params widens this to (0, 2]");
    }
  }
  if (cfg.bound < 1) throw DomainError("period bound must be at least 1");
  if (cfg.workers < 1) throw DomainError("workers must be at least 1");
  required_samples(cfg.delta, cfg.epsilon);
}

namespace
{

std::vector<std::uint8_t> verdicts_for(const CompiledFormula & formula, const Trace & trace,
                                       std::span<const std::size_t> bounds, bool & eval_failed)
{
  std::vector<std::uint8_t> out(bounds.size(), 0);
  try {
    IntervalEvaluator ev(formula, trace);
    for (std::size_t k = 0; k < bounds.size(); ++k) {
      if (bounds[k] <= trace.size()) out[k] = ev.holds(Interval{0, bounds[k]});
    }
    return out;
  } catch (const EvalError &) {
    // A predicate failed somewhere in the trace; retry each prefix on its own.
  }
  for (std::size_t k = 0; k < bounds.size(); ++k) {
    if (bounds[k] > trace.size()) continue;
    try {
      IntervalEvaluator ev(formula, trace, Interval{0, bounds[k]});
      out[k] = ev.holds(Interval{0, bounds[k]});
    } catch (const EvalError &) {
      eval_failed = true;
      out[k] = 2;
    }
  }
  return out;
}

Estimate run(const Program & program, const EnvFactory & make_env, const Formula & formula, const SmcConfig & cfg,
             std::span<const std::size_t> bounds)
{
  check_config(cfg);
  if (bounds.empty()) throw Error("USAGE", "at least one bound is required");
  for (std::size_t k = 0; k < bounds.size(); ++k) {
    if (bounds[k] < 1) throw Error("USAGE", "bounds must be at least 1");
    if (k > 0 && bounds[k] <= bounds[k - 1]) throw Error("USAGE", "bounds must be strictly ascending");
  }
  if (bounds.back() != cfg.bound) throw Error("USAGE", "the largest bound must equal the period bound");

  const CompiledFormula compiled(formula, program.schema);
  const std::uint64_t n = required_samples(cfg.delta, cfg.epsilon);
  if (!cfg.keep_traces.empty()) std::filesystem::create_directories(cfg.keep_traces);
  // Fail on environment binding problems before starting workers.
  make_env(program);

  const std::size_t nb = bounds.size();
  // Per trace and bound: 0 unsatisfied, 1 satisfied, 2 poisoned.
  std::vector<std::uint8_t> verdicts(static_cast<std::size_t>(n) * nb, 0);
  std::atomic<std::uint64_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;

  const auto work = [&] {
    try {
      auto env = make_env(program);
      while (true) {
        const std::uint64_t i = next.fetch_add(1);
        if (i >= n) break;
        const Trace trace = simulate(program, *env, cfg.bound, cfg.seed, i);
        if (!cfg.keep_traces.empty()) {
          write_trace_jsonl(trace, cfg.keep_traces / ("trace_" + std::to_string(i) + ".jsonl"));
        }
        bool eval_failed = false;
        auto v = verdicts_for(compiled, trace, bounds, eval_failed);
        for (std::size_t k = 0; k < nb; ++k) {
          if (bounds[k] > trace.size()) v[k] = 2;
        }
        std::copy(v.begin(), v.end(), verdicts.begin() + static_cast<std::ptrdiff_t>(i * nb));
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next.store(n);
    }
  };

  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(cfg.workers, n));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto & t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  Estimate est;
  est.total = n;
  for (std::size_t k = 0; k < nb; ++k) {
    CurvePoint point;
    point.bound = bounds[k];
    for (std::uint64_t i = 0; i < n; ++i) {
      const std::uint8_t v = verdicts[static_cast<std::size_t>(i) * nb + k];
      point.satisfied += v == 1;
      point.poisoned += v == 2;
    }
    point.p_hat = static_cast<double>(point.satisfied) / static_cast<double>(n);
    est.per_bound.push_back(point);
  }
  est.satisfied = est.per_bound.back().satisfied;
  est.poisoned = est.per_bound.back().poisoned;
  est.p_hat = est.per_bound.back().p_hat;
  return est;
}

}  // namespace

Estimate estimate(const Program & program, const EnvFactory & env, const Formula & formula, const SmcConfig & cfg)
{
  const std::size_t bound = cfg.bound;
  return run(program, env, formula, cfg, std::span<const std::size_t>(&bound, 1));
}

Estimate estimate(const Model & model, const EnvFactory & env, const Formula & formula, const SmcConfig & cfg)
{
  const Program program = Program::compile(model);
  return estimate(program, env, formula, cfg);
}

Estimate sweep(const Program & program, const EnvFactory & env, const Formula & formula, const SmcConfig & cfg,
               std::span<const std::size_t> bounds)
{
  return run(program, env, formula, cfg, bounds);
}

Estimate sweep(const Model & model, const EnvFactory & env, const Formula & formula, const SmcConfig & cfg,
               std::span<const std::size_t> bounds)
{
  const Program program = Program::compile(model);
  return sweep(program, env, formula, cfg, bounds);
}

std::vector<std::size_t> parse_bounds(const std::string & spec)
{
  const auto number = [&](std::string_view text) {
    std::size_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
      throw Error("USAGE", "bad bound '" + std::string(text) + "' in '" + spec + "'");
    }
    return v;
  };
  std::vector<std::size_t> out;
  if (spec.find(':') != std::string::npos) {
    const auto c1 = spec.find(':');
    const auto c2 = spec.find(':', c1 + 1);
    if (c2 == std::string::npos || spec.find(':', c2 + 1) != std::string::npos) {
      throw Error("USAGE", "bounds range must be lo:hi:step, got '" + spec + "'");
    }
    const std::string_view view(spec);
    const std::size_t lo = number(view.substr(0, c1));
    const std::size_t hi = number(view.substr(c1 + 1, c2 - c1 - 1));
    const std::size_t step = number(view.substr(c2 + 1));
    if (step == 0) throw Error("USAGE", "bounds step must be positive");
    if (lo > hi) throw Error("USAGE", "bounds range is empty: '" + spec + "'");
    for (std::size_t b = lo; b <= hi; b += step) out.push_back(b);
  } else {
    std::string_view rest(spec);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      out.push_back(number(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
      if (rest.empty()) throw Error("USAGE", "trailing comma in bounds '" + spec + "'");
    }
  }
  if (out.empty()) throw Error("USAGE", "no bounds given");
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (out[k] < 1) throw Error("USAGE", "bounds must be at least 1");
    if (k > 0 && out[k] <= out[k - 1]) throw Error("USAGE", "bounds must be strictly ascending");
  }
  return out;
}

std::string format_probability(double p)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, p);
  return std::string(buf, res.ptr);
}

void write_csv(const Estimate & est, std::ostream & out)
{
  out << "bound,satisfied,poisoned,total,probability\n";
  for (const auto & p : est.per_bound) {
    out << p.bound << ',' << p.satisfied << ',' << p.poisoned << ',' << est.total << ','
        << format_probability(p.p_hat) << '\n';
  }
}

std::string summary_json(const std::string & property, const SmcConfig & cfg, const Estimate & est)
{
  nlohmann::ordered_json j;
  j["property"] = property;
  j["delta"] = cfg.delta;
  j["epsilon"] = cfg.epsilon;
  j["N"] = est.total;
  j["seed"] = cfg.seed;
  j["bound"] = cfg.bound;
  j["satisfied"] = est.satisfied;
  j["poisoned"] = est.poisoned;
  j["p_hat"] = est.p_hat;
  return j.dump();
}

}  // namespace mdm
