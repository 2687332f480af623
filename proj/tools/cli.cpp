// tools/cli.cpp - Subcommands validate, simulate, eval, check and sweep
#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "mdm/environment.hpp"
#include "mdm/errors.hpp"
#include "mdm/interval_eval.hpp"
#include "mdm/parser.hpp"
#include "mdm/program.hpp"
#include "mdm/simulator.hpp"
#include "mdm/smc.hpp"
#include "mdm/trace_io.hpp"
#include "mdm/validate.hpp"

namespace mdmc
{

namespace
{

using namespace mdm;

/// Failure carrying its exit code, raised inside subcommands.
struct Exit
{
  int code;
};

std::string read_file(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IO", "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string & path, const std::string & text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IO", "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("IO", "failed writing '" + path + "'");
}

int exit_code_for(const Error & e)
{
  const std::string & c = e.code();
  if (c == "TYPE_ERROR" || c == "INVALID_MODEL" || c == "EVAL_ERROR" || c == "ENV_BINDING" || c == "UNKNOWN_MODE") {
    return kExitSemantic;
  }
  return kExitUsage;
}

void report(std::ostream & err, const Error & e)
{
  err << "error[" << e.code() << "]: ";
  if (const auto * pe = dynamic_cast<const ParseError *>(&e)) {
    err << pe->span().to_string() << ": " << pe->what();
    if (!pe->expected().empty()) {
      err << " (expected ";
      for (std::size_t i = 0; i < pe->expected().size(); ++i) err << (i ? ", " : "") << pe->expected()[i];
      err << ")";
    }
  } else if (const auto * te = dynamic_cast<const TypeError *>(&e)) {
    err << te->span().to_string() << ": " << te->what() << " in '" << te->subexpr() << "'";
  } else {
    err << e.what();
  }
  err << '\n';
}

struct Common
{
  std::string model;
  std::string props;
  std::string prop;
  std::string env = "const";
  std::string env_script;
  double delta = 0.01;
  double epsilon = 0.05;
  std::size_t bound = 5000;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  bool unsafe = false;
  std::string keep_traces;
  std::string csv;
  std::string json;
  std::string bounds;
};

unsigned default_workers()
{
  if (const char * env = std::getenv("MDMC_WORKERS"); env && *env) {
    char * end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 4096) throw Error("USAGE", "MDMC_WORKERS must be a positive integer");
    return static_cast<unsigned>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

Model load_model(const std::string & path)
{
  return parse_model(read_file(path), path);
}

Program load_program(const std::string & path, std::ostream & err)
{
  const Model model = load_model(path);
  const auto diags = validate(model);
  if (!diags.empty()) {
    for (const auto & d : diags) err << "error[" << d.code << "]: " << d.span.to_string() << ": " << d.message << '\n';
    throw Exit{kExitSemantic};
  }
  return Program::compile(model);
}

EnvFactory env_factory(const Common & c)
{
  EnvOptions options;
  options.script = c.env_script;
  return make_env_factory(c.env, options);
}

Property pick_property(const std::vector<Property> & props, const std::string & name, const std::string & file)
{
  if (name.empty()) {
    if (props.size() == 1) return props.front();
    throw Error("USAGE", "'" + file + "' defines " + std::to_string(props.size()) + " properties; choose one with --prop");
  }
  for (const auto & p : props) {
    if (p.name == name) return p;
  }
  throw Error("UNKNOWN_PROPERTY", "no property '" + name + "' in '" + file + "'");
}

// ---------------------------------------------------------------------------

int cmd_validate(const std::string & path, bool json, std::ostream & out, std::ostream & err)
{
  nlohmann::ordered_json doc;
  doc["file"] = path;
  Model model;
  try {
    model = load_model(path);
  } catch (const ParseError & e) {
    if (!json) throw;
    doc["valid"] = false;
    doc["diagnostics"] = nlohmann::ordered_json::array(
      {{{"code", "PARSE"}, {"message", e.what()}, {"line", e.span().line}, {"column", e.span().column}}});
    out << doc.dump() << '\n';
    return kExitUsage;
  }
  const auto diags = validate(model);
  if (json) {
    doc["model"] = model.name;
    doc["valid"] = diags.empty();
    auto list = nlohmann::ordered_json::array();
    for (const auto & d : diags) {
      list.push_back({{"code", d.code}, {"message", d.message}, {"line", d.span.line}, {"column", d.span.column}});
    }
    doc["diagnostics"] = std::move(list);
    if (diags.empty()) {
      const ModeCensus census = mode_census(model);
      doc["modes"] = census.modes;
      doc["submodes"] = census.submodes;
    }
    out << doc.dump() << '\n';
  } else {
    for (const auto & d : diags) err << "error[" << d.code << "]: " << d.span.to_string() << ": " << d.message << '\n';
    if (diags.empty()) {
      const ModeCensus census = mode_census(model);
      out << "model " << model.name << " is valid: " << census.modes << " modes, " << census.submodes
          << " sub-modes\n";
    }
  }
  return diags.empty() ? kExitOk : kExitSemantic;
}

int cmd_simulate(const Common & c, std::size_t periods, std::uint64_t index, const std::string & output,
                 std::ostream & out, std::ostream & err)
{
  const Program program = load_program(c.model, err);
  const auto env = env_factory(c)(program);
  const Trace trace = simulate(program, *env, periods, c.seed, index);
  if (output.empty() || output == "-") {
    write_trace_jsonl(trace, out);
  } else {
    write_trace_jsonl(trace, std::filesystem::path(output));
  }
  if (trace.poisoned) err << "warning: trace poisoned: " << trace.poison_reason << '\n';
  return kExitOk;
}

int cmd_eval(const std::string & trace_path, const std::string & props_path, const std::string & name,
             std::ostream & out)
{
  const Trace trace = read_trace_jsonl(std::filesystem::path(trace_path));
  if (!std::filesystem::exists(trace_path)) throw Error("IO", "cannot read '" + trace_path + "'");
  const auto props = parse_properties(read_file(props_path), props_path);
  std::vector<Property> selected;
  if (name.empty()) {
    selected = props;
  } else {
    selected.push_back(pick_property(props, name, props_path));
  }
  for (const auto & p : selected) {
    const bool v = eval(*p.formula, trace, Interval{0, trace.size()});
    out << p.name << ": " << (v ? "true" : "false") << '\n';
  }
  return kExitOk;
}

SmcConfig smc_config(const Common & c)
{
  SmcConfig cfg;
  cfg.delta = c.delta;
  cfg.epsilon = c.epsilon;
  cfg.bound = c.bound;
  cfg.seed = c.seed;
  cfg.workers = c.workers ? c.workers : default_workers();
  cfg.unsafe_params = c.unsafe;
  cfg.keep_traces = c.keep_traces;
  check_config(cfg);
  return cfg;
}

int cmd_check(const Common & c, bool is_sweep, bool bound_given, std::ostream & out, std::ostream & err)
{
  SmcConfig cfg = smc_config(c);
  std::vector<std::size_t> bounds;
  if (is_sweep) {
    bounds = parse_bounds(c.bounds);
    if (bound_given && c.bound != bounds.back()) {
      throw Error("USAGE", "--bound " + std::to_string(c.bound) + " differs from the largest sweep bound " +
                             std::to_string(bounds.back()));
    }
    cfg.bound = bounds.back();
  } else {
    bounds = {cfg.bound};
  }
  const auto props = parse_properties(read_file(c.props), c.props);
  const Property prop = pick_property(props, c.prop, c.props);
  const Program program = load_program(c.model, err);
  const Estimate est = sweep(program, env_factory(c), *prop.formula, cfg, bounds);

  std::ostringstream csv;
  write_csv(est, csv);
  const std::string summary = summary_json(prop.name, cfg, est) + "\n";
  if (!c.csv.empty()) write_file(c.csv, csv.str());
  if (!c.json.empty()) write_file(c.json, summary);
  if (is_sweep) {
    if (c.csv.empty()) out << csv.str();
  } else {
    out << summary;
  }
  err << prop.name << ": N = " << est.total << ", satisfied = " << est.satisfied << ", poisoned = " << est.poisoned
      << ", p_hat = " << format_probability(est.p_hat) << '\n';
  return kExitOk;
}

void add_smc_options(CLI::App & cmd, Common & c, bool sweep)
{
  cmd.add_option("model", c.model, "Model file (.mdm)")->required();
  cmd.add_option("properties", c.props, "Property file (.mprop)")->required();
  cmd.add_option("--prop", c.prop, "Property name (optional when the file defines one)");
  cmd.add_option("--env", c.env, "Environment: const, script, toy-kinematics")->capture_default_str();
  cmd.add_option("--env-script", c.env_script, "JSONL input script for --env script");
  cmd.add_option("--delta", c.delta, "Confidence-interval half width")->capture_default_str();
  cmd.add_option("--epsilon", c.epsilon, "Error rate")->capture_default_str();
  cmd.add_option("--bound", c.bound, "Period bound")->capture_default_str()->check(CLI::PositiveNumber);
  cmd.add_option("--seed", c.seed, "Master seed")->capture_default_str();
  cmd.add_option("--workers", c.workers, "Worker threads (default: $MDMC_WORKERS or all cores)")
    ->check(CLI::PositiveNumber);
  cmd.add_flag("--unsafe-params", c.unsafe, "Allow epsilon up to 2 (testing only)");
  cmd.add_option("--keep-traces", c.keep_traces, "Write every trace to DIR/trace_<i>.jsonl");
  cmd.add_option("--csv", c.csv, "Write the CSV result here");
  cmd.add_option("--json", c.json, "Write the JSON summary here");
  if (sweep) cmd.add_option("--bounds", c.bounds, "lo:hi:step or a comma-separated list")->required();
}

}  // namespace

int run_cli(const std::vector<std::string> & args, std::ostream & out, std::ostream & err)
{
  CLI::App app{"Mode diagram model checker", "mdmc"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  std::string validate_path;
  bool validate_json = false;
  auto * validate_cmd = app.add_subcommand("validate", "Check a model against the static rules");
  validate_cmd->add_option("model", validate_path, "Model file (.mdm)")->required();
  validate_cmd->add_flag("--json", validate_json, "Print diagnostics as JSON");

  Common sim;
  std::size_t periods = 0;
  std::uint64_t trace_index = 0;
  std::string sim_output;
  auto * simulate_cmd = app.add_subcommand("simulate", "Simulate one trace and print it as JSON Lines");
  simulate_cmd->add_option("model", sim.model, "Model file (.mdm)")->required();
  simulate_cmd->add_option("--env", sim.env, "Environment: const, script, toy-kinematics")->capture_default_str();
  simulate_cmd->add_option("--env-script", sim.env_script, "JSONL input script for --env script");
  simulate_cmd->add_option("--periods", periods, "Number of periods")->required()->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  simulate_cmd->add_option("--trace-index", trace_index, "Trace index within the seed's batch")->capture_default_str();
  simulate_cmd->add_option("-o,--output", sim_output, "Output file (default: standard output)");

  std::string eval_trace;
  std::string eval_props;
  std::string eval_prop;
  auto * eval_cmd = app.add_subcommand("eval", "Evaluate properties on a stored trace");
  eval_cmd->add_option("trace", eval_trace, "Trace file (.jsonl)")->required();
  eval_cmd->add_option("properties", eval_props, "Property file (.mprop)")->required();
  eval_cmd->add_option("--prop", eval_prop, "Only this property");

  Common check;
  auto * check_cmd = app.add_subcommand("check", "Estimate the probability that a property holds");
  add_smc_options(*check_cmd, check, false);

  Common sweep_opts;
  auto * sweep_cmd = app.add_subcommand("sweep", "Estimate probabilities over a range of period bounds");
  add_smc_options(*sweep_cmd, sweep_opts, true);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError & e) {
    err << "error[USAGE]: " << e.what() << '\n';
    err << "run 'mdmc --help' for usage\n";
    return kExitUsage;
  }

  try {
    if (*validate_cmd) return cmd_validate(validate_path, validate_json, out, err);
    if (*simulate_cmd) return cmd_simulate(sim, periods, trace_index, sim_output, out, err);
    if (*eval_cmd) return cmd_eval(eval_trace, eval_props, eval_prop, out);
    if (*check_cmd) return cmd_check(check, false, false, out, err);
    if (*sweep_cmd) return cmd_check(sweep_opts, true, sweep_cmd->count("--bound") > 0, out, err);
  } catch (const Exit & e) {
    return e.code;
  } catch (const Error & e) {
    report(err, e);
    return exit_code_for(e);
  } catch (const std::filesystem::filesystem_error & e) {
    err << "error[IO]: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception & e) {
    err << "error[INTERNAL]: " << e.what() << '\n';
    return kExitSemantic;
  }
  return kExitUsage;
}

}  // namespace mdmc
