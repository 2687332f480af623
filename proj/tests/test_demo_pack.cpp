// tests/test_demo_pack.cpp - Shipped example packs: structure, validity, pinned results
#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "mdm/demo_pack.hpp"
#include "mdm/errors.hpp"
#include "mdm/parser.hpp"
#include "mdm/smc.hpp"
#include "mdm/validate.hpp"

namespace
{

using namespace mdm;

std::string read_file(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string demo_path(const ExamplePack & pack, const std::string & file)
{
  return std::string(MDM_DEMO_DIR) + "/" + pack.name + "/" + file;
}

std::vector<ExamplePack> all_packs()
{
  std::vector<ExamplePack> packs;
  packs.push_back(build_demo_spacecraft());
  packs.push_back(build_defective_spacecraft());
  packs.push_back(build_regression_pack());
  packs.push_back(build_settling_pack());
  return packs;
}

std::string sweep_csv(const ExamplePack & pack, const std::string & prop)
{
  const Estimate e = sweep(pack.model, make_env_factory(pack.env), *pack.property(prop).formula, pack.config, pack.bounds);
  std::ostringstream csv;
  write_csv(e, csv);
  return csv.str();
}

TEST(DemoPack, SpacecraftCensus)
{
  const ExamplePack pack = build_demo_spacecraft();
  const ModeCensus c = mode_census(pack.model);
  EXPECT_EQ(c.modes, 17u);
  EXPECT_EQ(c.submodes, 6u);
  std::set<std::string> names(c.submode_names.begin(), c.submode_names.end());
  EXPECT_EQ(names, (std::set<std::string>{"G0", "G1", "G2", "S1", "S5", "S10"}));
  EXPECT_EQ(mode_path(pack.model, "G2"), (std::vector<std::string>{"root", "m4", "G2"}));
  EXPECT_EQ(mode_path(pack.model, "S10"), (std::vector<std::string>{"root", "m7", "S10"}));
  EXPECT_EQ(pack.env, "toy-kinematics");
}

TEST(DemoPack, SpacecraftFigureTransition)
{
  const ExamplePack pack = build_demo_spacecraft();
  const Mode * m4 = pack.model.root.child("m4");
  ASSERT_NE(m4, nullptr);
  const auto expected = parse_guard("SK12 == 10 && duration(gm == 2, 40s)");
  bool found = false;
  for (const auto & t : m4->transitions) {
    found = found || (t.target == "m6" && same_structure(*t.guard, *expected));
  }
  EXPECT_TRUE(found);
}

TEST(DemoPack, SpacecraftProperties)
{
  const ExamplePack pack = build_demo_spacecraft();
  EXPECT_NE(pack.properties_text.find("prop P2 := (mode == 0) ; tt ; [](mode == 5 || mode == 6 || mode == 8);"),
            std::string::npos);
  for (const char * name : {"P1", "P2", "P3"}) EXPECT_NO_THROW(pack.property(name));
  const auto & p1 = pack.property("P1");
  EXPECT_NE(pack.properties_text.find("sqrt(wx * wx + wy * wy + wz * wz)"), std::string::npos);
  EXPECT_TRUE(std::holds_alternative<Formula::Binary>(p1.formula->node));
  try {
    pack.property("P9");
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), "UNKNOWN_PROPERTY");
  }
}

TEST(DemoPack, EverythingValidates)
{
  for (const auto & pack : all_packs()) {
    const auto diags = validate(pack.model);
    EXPECT_TRUE(diags.empty()) << pack.name << ": " << (diags.empty() ? "" : diags.front().message);
    const TypeEnv env = observables(pack.model);
    for (const auto & p : pack.properties) EXPECT_NO_THROW(typecheck_formula(*p.formula, env)) << pack.name << " " << p.name;
    EXPECT_NO_THROW(make_env_factory(pack.env)(Program::compile(pack.model)));
    EXPECT_NO_THROW(check_config(pack.config));
    ASSERT_FALSE(pack.bounds.empty());
    EXPECT_EQ(pack.bounds.back(), pack.config.bound);
  }
}

TEST(DemoPack, EmbeddedTextMatchesFiles)
{
  for (const auto & pack : all_packs()) {
    EXPECT_EQ(pack.model_text, read_file(demo_path(pack, pack.model_file))) << pack.name;
    EXPECT_EQ(pack.properties_text, read_file(demo_path(pack, pack.properties_file))) << pack.name;
  }
}

TEST(DemoPack, ExpectationsCarryProvenance)
{
  const std::set<std::string> known = {"structure", "analytic", "constructed", "frozen"};
  for (const auto & pack : all_packs()) {
    EXPECT_FALSE(pack.expected.empty()) << pack.name;
    for (const auto & e : pack.expected) {
      EXPECT_TRUE(known.count(e.provenance)) << pack.name << " " << e.property;
      EXPECT_NO_THROW(pack.property(e.property));
      EXPECT_LE(e.lo, e.hi);
      EXPECT_TRUE(std::find(pack.bounds.begin(), pack.bounds.end(), e.bound) != pack.bounds.end());
    }
  }
}

// The pinned P1 sweep is a non-decreasing curve that reaches 1, and is
// reproduced bit for bit.
TEST(DemoPack, SpacecraftStableStateCurve)
{
  const ExamplePack pack = build_demo_spacecraft();
  const Estimate e =
    sweep(pack.model, make_env_factory(pack.env), *pack.property("P1").formula, pack.config, pack.bounds);
  ASSERT_EQ(e.per_bound.size(), 10u);
  for (std::size_t i = 1; i < e.per_bound.size(); ++i) EXPECT_GE(e.per_bound[i].p_hat, e.per_bound[i - 1].p_hat);
  EXPECT_LT(e.per_bound.front().p_hat, 1.0);
  EXPECT_EQ(e.per_bound.back().p_hat, 1.0);
  std::ostringstream csv;
  write_csv(e, csv);
  EXPECT_EQ(csv.str(), read_file(demo_path(pack, "expected_P1.csv")));
}

TEST(DemoPack, DefectiveModelMissesTerminalModes)
{
  const ExamplePack pack = build_defective_spacecraft();
  const std::string csv = sweep_csv(pack, "P2");
  EXPECT_EQ(csv, read_file(demo_path(pack, "expected_P2_defective.csv")));
  const Estimate e = estimate(pack.model, make_env_factory(pack.env), *pack.property("P2").formula, pack.config);
  for (const auto & x : pack.expected) {
    if (x.property == "P2" && x.bound == pack.config.bound) {
      EXPECT_GE(e.p_hat, x.lo);
      EXPECT_LE(e.p_hat, x.hi);
    }
  }
  // The nominal model always reaches a terminal mode by the last bound.
  const ExamplePack good = build_demo_spacecraft();
  EXPECT_EQ(estimate(good.model, make_env_factory(good.env), *good.property("P2").formula, good.config).p_hat, 1.0);
}

// The expensive step property is checked on fewer samples; a band of [1, 1]
// does not depend on the sample count.
TEST(DemoPack, SpacecraftStepPropertyOnFewerSamples)
{
  const ExamplePack pack = build_demo_spacecraft();
  SmcConfig cfg = pack.config;
  cfg.delta = 0.1;
  cfg.epsilon = 0.5;
  const Estimate e = estimate(pack.model, make_env_factory(pack.env), *pack.property("P3").formula, cfg);
  EXPECT_EQ(e.total, 37u);
  EXPECT_EQ(e.p_hat, 1.0);
}

TEST(DemoPack, RegressionPackMatchesFrozenCsv)
{
  const ExamplePack pack = build_regression_pack();
  EXPECT_EQ(sweep_csv(pack, "AtLeast3"), read_file(demo_path(pack, "expected_AtLeast3.csv")));
  EXPECT_EQ(sweep_csv(pack, "Always"), "bound,satisfied,poisoned,total,probability\n10,7369,0,7369,1\n");
  EXPECT_EQ(sweep_csv(pack, "Never"), "bound,satisfied,poisoned,total,probability\n10,0,0,7369,0\n");
  for (const auto & x : pack.expected) {
    const Estimate e = estimate(pack.model, make_env_factory(pack.env), *pack.property(x.property).formula, pack.config);
    EXPECT_GE(e.p_hat, x.lo) << x.property;
    EXPECT_LE(e.p_hat, x.hi) << x.property;
  }
  EXPECT_THROW(sweep(pack.model, make_env_factory(pack.env), *fm::tt(), pack.config, std::vector<std::size_t>{}), Error);
}

TEST(DemoPack, SettlingPackSteps)
{
  const ExamplePack pack = build_settling_pack();
  const Estimate e = sweep(pack.model, make_env_factory(pack.env), *pack.property("Settled").formula, pack.config,
                           pack.bounds);
  for (const auto & pt : e.per_bound) EXPECT_EQ(pt.p_hat, pt.bound >= 25 ? 1.0 : 0.0);
  for (const auto & x : pack.expected) {
    for (const auto & pt : e.per_bound) {
      if (pt.bound != x.bound) continue;
      EXPECT_GE(pt.p_hat, x.lo);
      EXPECT_LE(pt.p_hat, x.hi);
    }
  }
}

}  // namespace
