// src/environment.cpp - Built-in environment registry: const, script, toy-kinematics
#include "mdm/environment.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "mdm/errors.hpp"
#include "mdm/program.hpp"

namespace mdm
{

namespace
{

/// Inputs keep the values they were initialised with.
class ConstEnv final : public Environment
{
public:
  void reset(std::uint64_t, std::span<const Value> initial_inputs) override
  {
    held_.assign(initial_inputs.begin(), initial_inputs.end());
  }

  void step(std::span<const Value>, double, double, std::span<Value> inputs) override
  {
    std::copy(held_.begin(), held_.end(), inputs.begin());
  }

private:
  std::vector<Value> held_;
};

/// Replays one JSON object per period; the last line is held once exhausted.
/// Inputs a line does not mention keep their previous value.
class ScriptEnv final : public Environment
{
public:
  ScriptEnv(const Program & program, const std::filesystem::path & file)
  {
    std::ifstream in(file);
    if (!in) throw Error("IO", "cannot open environment script " + file.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      nlohmann::json obj;
      try {
        obj = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception & e) {
        throw Error("SCRIPT", file.string() + ":" + std::to_string(lineno) + ": " + e.what());
      }
      if (!obj.is_object()) throw Error("SCRIPT", file.string() + ":" + std::to_string(lineno) + ": expected an object");
      std::vector<std::optional<Value>> row(program.inputs_end - program.inputs_begin);
      for (const auto & [key, val] : obj.items()) {
        std::size_t k = program.inputs_begin;
        while (k < program.inputs_end && program.slots[k].name != key) ++k;
        if (k == program.inputs_end) {
          throw Error("SCRIPT", file.string() + ":" + std::to_string(lineno) + ": '" + key + "' is not an input");
        }
        row[k - program.inputs_begin] = convert(val, program.slots[k].kind, file, lineno, key);
      }
      rows_.push_back(std::move(row));
    }
  }

  void reset(std::uint64_t, std::span<const Value> initial_inputs) override
  {
    current_.assign(initial_inputs.begin(), initial_inputs.end());
    next_ = 0;
  }

  void step(std::span<const Value>, double, double, std::span<Value> inputs) override
  {
    if (next_ < rows_.size()) {
      const auto & row = rows_[next_++];
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (row[i]) current_[i] = *row[i];
      }
    }
    std::copy(current_.begin(), current_.end(), inputs.begin());
  }

private:
  static Value convert(const nlohmann::json & v, ValueKind kind, const std::filesystem::path & file,
                       std::size_t lineno, const std::string & key)
  {
    const auto fail = [&] {
      return Error("SCRIPT", file.string() + ":" + std::to_string(lineno) + ": value of '" + key +
                               "' is not of kind " + std::string(kind_name(kind)));
    };
    switch (kind) {
      case ValueKind::Bool:
        if (!v.is_boolean()) throw fail();
        return Value::of_bool(v.get<bool>());
      case ValueKind::Int:
        if (!v.is_number_integer()) throw fail();
        return Value::of_int(v.get<std::int64_t>());
      case ValueKind::Real:
        if (!v.is_number()) throw fail();
        return Value::of_real(v.get<double>());
    }
    throw fail();
  }

  std::vector<std::vector<std::optional<Value>>> rows_;
  std::vector<Value> current_;
  std::size_t next_ = 0;
};

class ToyKinematicsEnv final : public Environment
{
public:
  ToyKinematicsEnv(const Program & program, ToyKinematicsParams params) : params_(params)
  {
    const auto input = [&](const std::string & name) -> int {
      for (std::size_t k = program.inputs_begin; k < program.inputs_end; ++k) {
        if (program.slots[k].name == name) {
          if (program.slots[k].kind != ValueKind::Real) {
            throw Error("ENV_BINDING", "toy-kinematics needs input '" + name + "' to be real");
          }
          return static_cast<int>(k - program.inputs_begin);
        }
      }
      return -1;
    };
    const auto output = [&](const std::string & name) -> int {
      for (std::size_t k = program.outputs_begin; k < program.outputs_end; ++k) {
        if (program.slots[k].name == name && program.slots[k].kind != ValueKind::Bool) {
          return static_cast<int>(k - program.outputs_begin);
        }
      }
      return -1;
    };
    for (const char * axis : {"x", "y", "z"}) {
      Axis a{input(std::string("w") + axis), input(std::string("dw") + axis), output(std::string("u") + axis)};
      if ((a.angle < 0) != (a.rate < 0)) {
        throw Error("ENV_BINDING", std::string("toy-kinematics axis ") + axis + " needs both w" + axis + " and dw" +
                                     axis + " inputs");
      }
      if (a.angle >= 0) axes_.push_back(a);
    }
    if (axes_.empty()) throw Error("ENV_BINDING", "toy-kinematics needs real inputs wx and dwx (or y / z)");
  }

  void reset(std::uint64_t, std::span<const Value> initial_inputs) override
  {
    state_.clear();
    for (const auto & a : axes_) {
      state_.push_back({initial_inputs[a.angle].as_real(), initial_inputs[a.rate].as_real()});
    }
    pending_dt_ = 0.0;
  }

  void step(std::span<const Value> outputs, double, double dt, std::span<Value> inputs) override
  {
    // Outputs were computed during the previous period, so they act over it.
    for (std::size_t i = 0; i < axes_.size(); ++i) {
      auto & s = state_[i];
      const double u = axes_[i].torque >= 0 ? outputs[axes_[i].torque].as_real() : 0.0;
      s.rate += pending_dt_ * (-params_.damping * s.rate - params_.stiffness * s.angle + u);
      s.angle += pending_dt_ * s.rate;
      inputs[axes_[i].angle] = Value::of_real(s.angle);
      inputs[axes_[i].rate] = Value::of_real(s.rate);
    }
    pending_dt_ = dt;
  }

private:
  struct Axis
  {
    int angle;
    int rate;
    int torque;
  };
  struct State
  {
    double angle;
    double rate;
  };

  ToyKinematicsParams params_;
  std::vector<Axis> axes_;
  std::vector<State> state_;
  double pending_dt_ = 0.0;
};

}  // namespace

std::vector<std::string> environment_names()
{
  return {"const", "script", "toy-kinematics"};
}

EnvFactory make_env_factory(const std::string & name, const EnvOptions & options)
{
  if (name == "const") {
    return [](const Program &) { return std::make_unique<ConstEnv>(); };
  }
  if (name == "script") {
    if (options.script.empty()) throw Error("USAGE", "the script environment needs a script file");
    return [file = options.script](const Program & p) { return std::make_unique<ScriptEnv>(p, file); };
  }
  if (name == "toy-kinematics") {
    return [](const Program & p) { return make_toy_kinematics(p); };
  }
  std::string known;
  for (const auto & n : environment_names()) known += (known.empty() ? "" : ", ") + n;
  throw Error("UNKNOWN_ENV", "unknown environment '" + name + "' (known: " + known + ")");
}

std::unique_ptr<Environment> make_toy_kinematics(const Program & program, ToyKinematicsParams params)
{
  return std::make_unique<ToyKinematicsEnv>(program, params);
}

}  // namespace mdm
