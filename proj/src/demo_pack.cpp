// src/demo_pack.cpp - Example packs built from the embedded demo sources
#include "mdm/demo_pack.hpp"

#include "demo_texts.hpp"
#include "mdm/errors.hpp"
#include "mdm/parser.hpp"

namespace mdm
{

const Property & ExamplePack::property(const std::string & name) const
{
  for (const auto & p : properties) {
    if (p.name == name) return p;
  }
  throw Error("UNKNOWN_PROPERTY", "pack '" + this->name + "' has no property '" + name + "'");
}

namespace
{

ExamplePack make_pack(std::string name, std::string model_file, std::string_view model_text, std::string props_file,
                      std::string_view props_text)
{
  ExamplePack pack;
  pack.name = std::move(name);
  pack.model_file = std::move(model_file);
  pack.properties_file = std::move(props_file);
  pack.model_text = std::string(model_text);
  pack.properties_text = std::string(props_text);
  pack.model = parse_model(pack.model_text, pack.model_file);
  pack.properties = parse_properties(pack.properties_text, pack.properties_file);
  return pack;
}

std::vector<std::size_t> range(std::size_t lo, std::size_t hi, std::size_t step)
{
  std::vector<std::size_t> out;
  for (std::size_t b = lo; b <= hi; b += step) out.push_back(b);
  return out;
}

}  // namespace

ExamplePack build_demo_spacecraft()
{
  ExamplePack pack = make_pack("spacecraft", "spacecraft.mdm", demo_text::spacecraft_model, "spacecraft.mprop",
                               demo_text::spacecraft_props);
  pack.env = "toy-kinematics";
  pack.config.seed = 20240601;
  pack.config.bound = 500;
  pack.bounds = range(50, 500, 50);
  pack.expected = {
    {"P1", 500, 1.0, 1.0, "constructed"},
    {"P2", 500, 1.0, 1.0, "constructed"},
    {"P3", 500, 1.0, 1.0, "constructed"},
  };
  return pack;
}

ExamplePack build_defective_spacecraft()
{
  ExamplePack pack = make_pack("spacecraft", "spacecraft_b.mdm", demo_text::spacecraft_b_model, "spacecraft.mprop",
                               demo_text::spacecraft_props);
  pack.env = "toy-kinematics";
  pack.config.seed = 20240601;
  pack.config.bound = 500;
  pack.bounds = range(50, 500, 50);
  pack.expected = {
    {"P2", 500, 0.25, 0.55, "frozen"},
  };
  return pack;
}

ExamplePack build_regression_pack()
{
  ExamplePack pack = make_pack("regression", "toy.mdm", demo_text::toy_model, "toy.mprop", demo_text::toy_props);
  pack.env = "const";
  pack.config.seed = 7;
  pack.config.bound = 10;
  pack.bounds = {10};
  pack.expected = {
    {"AtLeast3", 10, 0.68, 0.72, "analytic"},
    {"Always", 10, 1.0, 1.0, "analytic"},
    {"Never", 10, 0.0, 0.0, "analytic"},
  };
  return pack;
}

ExamplePack build_settling_pack()
{
  ExamplePack pack =
    make_pack("settling", "settling.mdm", demo_text::settling_model, "settling.mprop", demo_text::settling_props);
  pack.env = "const";
  pack.config.seed = 1;
  pack.config.bound = 50;
  pack.bounds = range(5, 50, 5);
  pack.expected = {
    {"Settled", 20, 0.0, 0.0, "constructed"},
    {"Settled", 25, 1.0, 1.0, "constructed"},
  };
  return pack;
}

}  // namespace mdm
