// mdm/environment.hpp - Closed-loop plant simulators fed by model outputs
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mdm/value.hpp"

namespace mdm
{

class Program;

/// Produces sensor inputs from actuator outputs once per period. Spans are in
/// the program's declaration order of inputs and outputs respectively.
class Environment
{
public:
  virtual ~Environment() = default;

  /// Restarts the plant. `initial_inputs` holds the sampled initial values of
  /// the model's inputs, which a plant may take as its initial state.
  virtual void reset(std::uint64_t seed, std::span<const Value> initial_inputs) = 0;

  /// Writes fresh input values given the outputs of the previous period.
  /// `dt` is the period of the leaf mode about to run.
  virtual void step(std::span<const Value> outputs, double time, double dt, std::span<Value> inputs) = 0;
};

struct EnvOptions
{
  std::filesystem::path script;  // `script` environment: JSONL replay file
};

/// Builds one environment instance per worker for a given program.
using EnvFactory = std::function<std::unique_ptr<Environment>(const Program &)>;

/// Names accepted by make_env_factory.
std::vector<std::string> environment_names();

/// Throws Error("UNKNOWN_ENV") for a name outside the registry. Binding errors
/// (missing variables, unreadable script) surface when the factory is invoked.
EnvFactory make_env_factory(const std::string & name, const EnvOptions & options = {});

/// Damped rotational plant: for each axis a in {x, y, z} with inputs `wa`
/// (angle) and `dwa` (rate), and optional output `ua` (torque command),
///   rate  += dt * (-damping * rate - stiffness * angle + u)
///   angle += dt * rate
struct ToyKinematicsParams
{
  double stiffness = 0.0;
  double damping = 0.01;
};

std::unique_ptr<Environment> make_toy_kinematics(const Program & program, ToyKinematicsParams params = {});

}  // namespace mdm
