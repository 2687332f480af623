// mdm/demo_pack.hpp - Shipped example models, property suites and expectations
#pragma once

#include <string>
#include <vector>

#include "mdm/ast.hpp"
#include "mdm/smc.hpp"

namespace mdm
{

/// Expected probability band for one property at one bound. `provenance`
/// says where the band comes from: "structure" (mode counts / names of the
/// case study), "analytic" (closed-form probability), "constructed" (known by
/// construction of the model), or "frozen" (recorded from this implementation).
struct Expectation
{
  std::string property;
  std::size_t bound = 0;
  double lo = 0.0;
  double hi = 1.0;
  std::string provenance;
};

struct ExamplePack
{
  std::string name;
  std::string model_file;       // file name under demos/<name>/
  std::string properties_file;  // file name under demos/<name>/
  std::string model_text;
  std::string properties_text;
  Model model;
  std::vector<Property> properties;
  std::string env;
  SmcConfig config;
  std::vector<std::size_t> bounds;
  std::vector<Expectation> expected;

  /// Throws Error("UNKNOWN_PROPERTY").
  const Property & property(const std::string & name) const;
};

/// 17-mode attitude control model with the toy-kinematics plant, P1-P3.
ExamplePack build_demo_spacecraft();
/// Same structure with a step counter that never advances; P2 fails on nominal runs.
ExamplePack build_defective_spacecraft();
/// Uniform integer toy with pinned seed and frozen results.
ExamplePack build_regression_pack();
/// Deterministic counter that settles after exactly 25 periods.
ExamplePack build_settling_pack();

}  // namespace mdm
