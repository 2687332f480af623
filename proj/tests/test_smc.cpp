// tests/test_smc.cpp - Sample sizing, estimation, sweeps and their invariants
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include <unistd.h>

#include "json.hpp"
#include "mdm/demo_pack.hpp"
#include "mdm/errors.hpp"
#include "mdm/interval_eval.hpp"
#include "mdm/parser.hpp"
#include "mdm/simulator.hpp"
#include "mdm/smc.hpp"
#include "mdm/trace_io.hpp"
#include "support.hpp"

namespace
{

using namespace mdm;

const char * kToy = "model toy { var x: int init in [0, 9]; mode main period 1s {} }";

SmcConfig small_config(std::size_t bound, std::uint64_t seed = 1)
{
  SmcConfig cfg;
  cfg.delta = 0.05;
  cfg.epsilon = 0.1;
  cfg.bound = bound;
  cfg.seed = seed;
  return cfg;
}

TEST(RequiredSamples, PublishedAndDerivedValues)
{
  EXPECT_EQ(required_samples(0.01, 0.05), 7369u);
  EXPECT_EQ(required_samples(std::exp(-1.0), 2.0), 1u);
  EXPECT_EQ(required_samples(0.3678794, 2.0), 1u);
  // 4 ln 20 / 0.01 = 1198.29...
  const long double x = 4.0L * std::log(20.0L) / (0.1L * 0.1L);
  EXPECT_GT(x, 1198.0L);
  EXPECT_LT(x, 1199.0L);
  EXPECT_EQ(required_samples(0.05, 0.1), 1199u);
}

TEST(RequiredSamples, CeilingProperty)
{
  mdm_test::Gen g(61);
  for (int i = 0; i < 2000; ++i) {
    const double delta = std::uniform_real_distribution<double>(1e-6, 0.999)(g.engine());
    const double epsilon = std::uniform_real_distribution<double>(0.02, 2.0)(g.engine());
    const long double x = 4.0L * std::log(1.0L / static_cast<long double>(delta)) /
                          (static_cast<long double>(epsilon) * static_cast<long double>(epsilon));
    const auto n = static_cast<long double>(required_samples(delta, epsilon));
    EXPECT_GE(n, 1.0L);
    EXPECT_GE(n, x - 1e-6L);
    EXPECT_LT(n - 1.0L, std::max(x, 0.0L));
  }
}

TEST(RequiredSamples, DomainErrors)
{
  EXPECT_THROW(required_samples(0.0, 0.05), DomainError);
  EXPECT_THROW(required_samples(1.0, 0.05), DomainError);
  EXPECT_THROW(required_samples(0.01, 0.0), DomainError);
  EXPECT_THROW(required_samples(0.01, 2.5), DomainError);
  EXPECT_THROW(required_samples(std::nan(""), 0.1), DomainError);
}

TEST(Config, EpsilonRangeNeedsUnsafeFlag)
{
  SmcConfig cfg;
  cfg.epsilon = 2.0;
  cfg.delta = 0.3678794;
  EXPECT_THROW(check_config(cfg), DomainError);
  cfg.unsafe_params = true;
  EXPECT_NO_THROW(check_config(cfg));
  cfg.workers = 0;
  EXPECT_THROW(check_config(cfg), DomainError);
}

TEST(Estimate, TrivialFormulas)
{
  const Model m = parse_model(kToy);
  const auto env = make_env_factory("const");
  const SmcConfig cfg = small_config(10);
  const Estimate yes = estimate(m, env, *parse_formula("tt"), cfg);
  EXPECT_EQ(yes.total, 1199u);
  EXPECT_EQ(yes.satisfied, 1199u);
  EXPECT_EQ(yes.p_hat, 1.0);
  const Estimate no = estimate(m, env, *parse_formula("!tt"), cfg);
  EXPECT_EQ(no.satisfied, 0u);
  EXPECT_EQ(no.p_hat, 0.0);
  ASSERT_EQ(yes.per_bound.size(), 1u);
  EXPECT_EQ(yes.per_bound[0].bound, 10u);
}

TEST(Estimate, UniformToyAtPaperParameters)
{
  SmcConfig cfg;
  cfg.bound = 10;
  cfg.seed = 7;
  const Estimate e = estimate(parse_model(kToy), make_env_factory("const"), *parse_formula("[](x >= 3)"), cfg);
  EXPECT_EQ(e.total, 7369u);
  EXPECT_GE(e.p_hat, 0.68);
  EXPECT_LE(e.p_hat, 0.72);
  EXPECT_EQ(e.p_hat, static_cast<double>(e.satisfied) / static_cast<double>(e.total));
}

// Over 100 independent estimates with half-width 0.05 at confidence 0.9, the
// hit rate must be at least 1 - 0.1 - 0.03.
TEST(Estimate, Coverage)
{
  const Program p = Program::compile(parse_model(kToy));
  const auto env = make_env_factory("const");
  const auto f = parse_formula("[](x >= 3)");
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Estimate e = estimate(p, env, *f, small_config(2, seed * 7919));
    hits += std::abs(e.p_hat - 0.7) <= 0.05 ? 1 : 0;
  }
  EXPECT_GE(hits, 87);
}

TEST(Estimate, ErrorsSurfaceBeforeSimulation)
{
  const Model m = parse_model(kToy);
  EXPECT_THROW(estimate(m, make_env_factory("const"), *parse_formula("[](y >= 3)"), small_config(5)), TypeError);
  EXPECT_THROW(estimate(parse_model("model z { mode m period 0s {} }"), make_env_factory("const"), *fm::tt(), small_config(5)),
               Error);
  SmcConfig bad = small_config(5);
  bad.delta = 2;
  EXPECT_THROW(estimate(m, make_env_factory("const"), *fm::tt(), bad), DomainError);
}

TEST(Sweep, SingleBoundMatchesHeadline)
{
  const Program p = Program::compile(parse_model(kToy));
  const std::vector<std::size_t> bounds = {10};
  const Estimate s = sweep(p, make_env_factory("const"), *parse_formula("[](x >= 3)"), small_config(10, 3), bounds);
  const Estimate e = estimate(p, make_env_factory("const"), *parse_formula("[](x >= 3)"), small_config(10, 3));
  ASSERT_EQ(s.per_bound.size(), 1u);
  EXPECT_EQ(s.per_bound[0].satisfied, s.satisfied);
  EXPECT_EQ(s.per_bound[0].p_hat, s.p_hat);
  EXPECT_EQ(s.satisfied, e.satisfied);
}

TEST(Sweep, SettlingCounterIsAStep)
{
  const Model m = parse_model("model s { var c: int init 0; mode main period 1s { graph { a: c := c + 1; } } }");
  const auto bounds = parse_bounds("5:50:5");
  ASSERT_EQ(bounds.size(), 10u);
  const Estimate e = sweep(m, make_env_factory("const"), *parse_formula("tt ; [](c >= 25)"), small_config(50), bounds);
  ASSERT_EQ(e.per_bound.size(), 10u);
  for (const auto & pt : e.per_bound) EXPECT_EQ(pt.p_hat, pt.bound >= 25 ? 1.0 : 0.0) << pt.bound;
}

TEST(Sweep, BoundListValidation)
{
  const Model m = parse_model(kToy);
  const auto env = make_env_factory("const");
  auto run = [&](std::vector<std::size_t> bounds) { sweep(m, env, *fm::tt(), small_config(10), bounds); };
  EXPECT_THROW(run({}), Error);
  EXPECT_THROW(run({5, 5, 10}), Error);
  EXPECT_THROW(run({5, 8}), Error);
  EXPECT_THROW(run({0, 10}), Error);
  EXPECT_NO_THROW(run({1, 10}));
}

// Identical results for any worker count, on a model whose outcome depends
// on the random environment.
TEST(Sweep, ScheduleIndependence)
{
  mdm_test::Gen g(62);
  for (int k = 0; k < 5; ++k) {
    const Program p = Program::compile(mdm_test::TypedGen(g, true).model(3));
    const EnvFactory env = [](const Program & q) { return std::make_unique<mdm_test::RandomEnv>(q); };
    const auto f = parse_formula("tt ; [](mode == 0 || mode == 2)");
    const std::vector<std::size_t> bounds = {10, 40, 80};
    std::vector<Estimate> results;
    for (unsigned workers : {1u, 4u, 8u}) {
      SmcConfig cfg = small_config(80, 11);
      cfg.workers = workers;
      results.push_back(sweep(p, env, *f, cfg, bounds));
    }
    for (std::size_t r = 1; r < results.size(); ++r) {
      EXPECT_EQ(results[r].satisfied, results[0].satisfied);
      EXPECT_EQ(results[r].poisoned, results[0].poisoned);
      ASSERT_EQ(results[r].per_bound.size(), results[0].per_bound.size());
      for (std::size_t b = 0; b < bounds.size(); ++b) {
        EXPECT_EQ(results[r].per_bound[b].satisfied, results[0].per_bound[b].satisfied);
        EXPECT_EQ(results[r].per_bound[b].poisoned, results[0].per_bound[b].poisoned);
      }
    }
  }
}

// Each bound's count equals evaluation on the prefix of the very same traces,
// recomputed one by one; prefixes agree with shorter simulations.
TEST(Sweep, PrefixConsistency)
{
  mdm_test::Gen g(63);
  for (int k = 0; k < 4; ++k) {
    const Program p = Program::compile(mdm_test::TypedGen(g, true).model(3));
    const EnvFactory env = [](const Program & q) { return std::make_unique<mdm_test::RandomEnv>(q); };
    const auto f = parse_formula("(mode == 0) ; tt ; [](mode != 0)");
    const std::vector<std::size_t> bounds = {3, 17, 30, 60};
    SmcConfig cfg;
    cfg.delta = 0.2;
    cfg.epsilon = 0.5;
    cfg.bound = 60;
    cfg.seed = 5;
    cfg.workers = 3;
    const Estimate e = sweep(p, env, *f, cfg, bounds);
    const auto n = required_samples(cfg.delta, cfg.epsilon);
    ASSERT_EQ(e.total, n);

    std::vector<std::uint64_t> sat(bounds.size(), 0);
    std::vector<std::uint64_t> poisoned(bounds.size(), 0);
    for (std::uint64_t i = 0; i < n; ++i) {
      auto e1 = env(p);
      const Trace full = simulate(p, *e1, 60, cfg.seed, i);
      for (std::size_t b = 0; b < bounds.size(); ++b) {
        if (full.size() < bounds[b]) {
          ++poisoned[b];
          continue;
        }
        sat[b] += eval(*f, full, {0, bounds[b]}) ? 1 : 0;
      }
      auto e2 = env(p);
      const Trace shorter = simulate(p, *e2, 17, cfg.seed, i);
      for (std::size_t s = 0; s < shorter.size(); ++s) {
        ASSERT_EQ(shorter.time(s), full.time(s));
        ASSERT_EQ(shorter.path_id(s), full.path_id(s));
      }
    }
    for (std::size_t b = 0; b < bounds.size(); ++b) {
      EXPECT_EQ(e.per_bound[b].satisfied, sat[b]);
      EXPECT_EQ(e.per_bound[b].poisoned, poisoned[b]);
      EXPECT_EQ(e.per_bound[b].p_hat, static_cast<double>(sat[b]) / static_cast<double>(n));
      EXPECT_LE(e.per_bound[b].satisfied + e.per_bound[b].poisoned, n);
    }
  }
}

TEST(Sweep, PoisonedTracesAreCountedAsUnsatisfied)
{
  const Model m = parse_model(
    "model z { var x: int init 0; var y: int; mode m period 1s { graph { a: x := x + 1; b: y := 10 / (x - 3); } } }");
  const std::vector<std::size_t> bounds = {2, 5};
  const Estimate e = sweep(m, make_env_factory("const"), *fm::tt(), small_config(5), bounds);
  EXPECT_EQ(e.per_bound[0].satisfied, e.total);
  EXPECT_EQ(e.per_bound[0].poisoned, 0u);
  EXPECT_EQ(e.per_bound[1].satisfied, 0u);
  EXPECT_EQ(e.per_bound[1].poisoned, e.total);
  EXPECT_EQ(e.poisoned, e.total);
}

TEST(Sweep, KeepTracesWritesJsonLines)
{
  const auto dir = std::filesystem::temp_directory_path() / ("mdm_keep_" + std::to_string(::getpid()));
  SmcConfig cfg;
  cfg.delta = 0.5;
  cfg.epsilon = 0.9;
  cfg.bound = 4;
  cfg.keep_traces = dir;
  const Estimate e = estimate(parse_model(kToy), make_env_factory("const"), *fm::tt(), cfg);
  for (std::uint64_t i = 0; i < e.total; ++i) {
    const Trace t = read_trace_jsonl(dir / ("trace_" + std::to_string(i) + ".jsonl"));
    EXPECT_EQ(t.size(), 4u);
    EXPECT_EQ(t.index, i);
  }
  std::filesystem::remove_all(dir);
}

TEST(Bounds, Parsing)
{
  EXPECT_EQ(parse_bounds("500:5000:500").size(), 10u);
  EXPECT_EQ(parse_bounds("500:5000:500").back(), 5000u);
  EXPECT_EQ(parse_bounds("1:10:4"), (std::vector<std::size_t>{1, 5, 9}));
  EXPECT_EQ(parse_bounds("10,20,35"), (std::vector<std::size_t>{10, 20, 35}));
  EXPECT_EQ(parse_bounds("7"), std::vector<std::size_t>{7});
  for (const char * bad : {"", "a", "5:1:1", "1:5:0", "1:5", "10,5", "0", "3,", "1:x:1"}) {
    try {
      parse_bounds(bad);
      ADD_FAILURE() << bad;
    } catch (const Error & e) {
      EXPECT_EQ(e.code(), "USAGE") << bad;
    }
  }
}

TEST(Output, CsvAndSummary)
{
  Estimate e;
  e.total = 4;
  e.satisfied = 3;
  e.p_hat = 0.75;
  e.per_bound = {{10, 1, 0, 0.25}, {20, 3, 1, 0.75}};
  std::ostringstream csv;
  write_csv(e, csv);
  EXPECT_EQ(csv.str(), "bound,satisfied,poisoned,total,probability\n10,1,0,4,0.25\n20,3,1,4,0.75\n");

  SmcConfig cfg;
  cfg.bound = 20;
  cfg.seed = 9;
  const auto j = nlohmann::json::parse(summary_json("P", cfg, e));
  EXPECT_EQ(j["property"], "P");
  EXPECT_EQ(j["N"], 4);
  EXPECT_EQ(j["seed"], 9);
  EXPECT_EQ(j["p_hat"], 0.75);
  EXPECT_EQ(j["delta"], 0.01);
  EXPECT_EQ(j["epsilon"], 0.05);
  EXPECT_EQ(summary_json("P", cfg, e).find("\"property\""), 1u);

  EXPECT_EQ(format_probability(1.0), "1");
  EXPECT_EQ(format_probability(0.0), "0");
  EXPECT_EQ(format_probability(0.7), "0.7");
  EXPECT_EQ(std::stod(format_probability(5162.0 / 7369.0)), 5162.0 / 7369.0);
}

}  // namespace
