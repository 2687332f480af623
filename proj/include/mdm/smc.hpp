// mdm/smc.hpp - Statistical model checking: sample sizing, estimation, bound sweeps
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mdm/ast.hpp"
#include "mdm/environment.hpp"
#include "mdm/program.hpp"

namespace mdm
{

/// N = ceil(4 ln(1/delta) / epsilon^2), at least 1. Throws DomainError unless
/// 0 < delta < 1 and 0 < epsilon <= 2.
std::uint64_t required_samples(double delta, double epsilon);

struct SmcConfig
{
  double delta = 0.01;
  double epsilon = 0.05;
  std::size_t bound = 5000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  /// Accept epsilon up to 2 and delta outside the usual range (testing only).
  bool unsafe_params = false;
  /// When set, every trace is written there as trace_<index>.jsonl.
  std::filesystem::path keep_traces;
};

struct CurvePoint
{
  std::size_t bound = 0;
  std::uint64_t satisfied = 0;
  std::uint64_t poisoned = 0;
  double p_hat = 0.0;
};

struct Estimate
{
  std::uint64_t satisfied = 0;
  std::uint64_t total = 0;
  std::uint64_t poisoned = 0;
  double p_hat = 0.0;
  std::vector<CurvePoint> per_bound;
};

/// Checks the configuration; throws DomainError.
void check_config(const SmcConfig & cfg);

/// Simulates N traces of cfg.bound periods and counts those satisfying the
/// formula on their full interval. Poisoned traces count as unsatisfied.
Estimate estimate(const Program & program, const EnvFactory & env, const Formula & formula, const SmcConfig & cfg);
Estimate estimate(const Model & model, const EnvFactory & env, const Formula & formula, const SmcConfig & cfg);

/// Simulates N traces once to the largest bound and evaluates every prefix
/// length in `bounds` (strictly ascending, last equal to cfg.bound). The
/// headline figures are those of the last bound.
Estimate sweep(const Program & program, const EnvFactory & env, const Formula & formula, const SmcConfig & cfg,
               std::span<const std::size_t> bounds);
Estimate sweep(const Model & model, const EnvFactory & env, const Formula & formula, const SmcConfig & cfg,
               std::span<const std::size_t> bounds);

/// `lo:hi:step` or a comma-separated list. Throws Error("USAGE").
std::vector<std::size_t> parse_bounds(const std::string & spec);

/// `bound,satisfied,poisoned,total,probability` then one row per curve point.
void write_csv(const Estimate & est, std::ostream & out);

/// `{property, delta, epsilon, N, seed, bound, satisfied, poisoned, p_hat}` as one JSON object.
std::string summary_json(const std::string & property, const SmcConfig & cfg, const Estimate & est);

/// Shortest decimal text that round-trips (`1`, `0.7`, `0.70028497760890215`).
std::string format_probability(double p);

}  // namespace mdm
