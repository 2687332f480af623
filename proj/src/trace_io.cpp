// src/trace_io.cpp - JSON Lines reader and writer for traces
#include "mdm/trace_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "mdm/errors.hpp"

namespace mdm
{

namespace
{

using json = nlohmann::ordered_json;

json to_json(const Value & v)
{
  if (v.is_int()) return v.as_int();
  if (v.is_bool()) return v.as_bool();
  return v.as_real();
}

}  // namespace

void write_trace_jsonl(const Trace & trace, std::ostream & out)
{
  json header = json::object();
  header["model"] = trace.model_name;
  header["seed"] = trace.seed;
  header["index"] = trace.index;
  header["poisoned"] = trace.poisoned;
  if (trace.poisoned) header["error"] = trace.poison_reason;
  out << header.dump() << '\n';

  const auto & cols = trace.schema().columns;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    json vars = json::object();
    const auto vals = trace.values(i);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (vals[c].present()) vars[cols[c].name] = to_json(vals[c]);
    }
    json line = json::object();
    line["i"] = i;
    line["t"] = trace.time(i);
    line["mode"] = trace.path(i).names;
    line["vars"] = std::move(vars);
    out << line.dump() << '\n';
  }
}

void write_trace_jsonl(const Trace & trace, const std::filesystem::path & file)
{
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("IO", "cannot write " + file.string());
  write_trace_jsonl(trace, out);
  if (!out) throw Error("IO", "failed writing " + file.string());
}

Trace read_trace_jsonl(std::istream & in, const std::string & source)
{
  struct Row
  {
    double time;
    std::vector<std::string> path;
    std::map<std::string, Value> vars;
  };

  const auto fail = [&](std::size_t lineno, const std::string & msg) {
    return Error("TRACE_FORMAT", source + ":" + std::to_string(lineno) + ": " + msg);
  };

  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  Trace meta;
  std::vector<Row> rows;
  std::map<std::string, ValueKind> kinds;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception & e) {
      throw fail(lineno, e.what());
    }
    if (!obj.is_object()) throw fail(lineno, "expected a JSON object");
    try {
      if (!have_header) {
        have_header = true;
        meta.model_name = obj.value("model", std::string());
        meta.seed = obj.value("seed", std::uint64_t{0});
        meta.index = obj.value("index", std::uint64_t{0});
        meta.poisoned = obj.value("poisoned", false);
        meta.poison_reason = obj.value("error", std::string());
        continue;
      }
      Row row;
      if (obj.at("i").get<std::size_t>() != rows.size()) throw fail(lineno, "snapshot index out of sequence");
      row.time = obj.at("t").get<double>();
      if (!rows.empty() && !(row.time > rows.back().time)) throw fail(lineno, "snapshot time does not increase");
      row.path = obj.at("mode").get<std::vector<std::string>>();
      if (row.path.empty()) throw fail(lineno, "empty mode path");
      for (const auto & [key, val] : obj.at("vars").items()) {
        Value v;
        ValueKind kind;
        if (val.is_boolean()) {
          v = Value::of_bool(val.get<bool>());
          kind = ValueKind::Bool;
        } else if (val.is_number_integer()) {
          v = Value::of_int(val.get<std::int64_t>());
          kind = ValueKind::Int;
        } else if (val.is_number()) {
          v = Value::of_real(val.get<double>());
          kind = ValueKind::Real;
        } else {
          throw fail(lineno, "value of '" + key + "' is not a scalar");
        }
        auto [it, fresh] = kinds.emplace(key, kind);
        if (!fresh && it->second != kind) {
          const bool numeric = it->second != ValueKind::Bool && kind != ValueKind::Bool;
          if (!numeric) throw fail(lineno, "variable '" + key + "' changes kind");
          it->second = ValueKind::Real;
        }
        row.vars.emplace(key, v);
      }
      rows.push_back(std::move(row));
    } catch (const json::exception & e) {
      throw fail(lineno, e.what());
    }
  }
  if (!have_header) throw fail(lineno, "missing header line");

  auto schema = std::make_shared<TraceSchema>();
  for (const auto & [name, kind] : kinds) schema->columns.push_back({name, kind});
  std::map<std::vector<std::string>, std::uint32_t> path_ids;
  for (const auto & r : rows) {
    if (path_ids.emplace(r.path, static_cast<std::uint32_t>(schema->paths.size())).second) {
      schema->paths.push_back(ModePath::from_names(r.path));
    }
  }

  Trace trace(schema);
  trace.model_name = meta.model_name;
  trace.seed = meta.seed;
  trace.index = meta.index;
  trace.poisoned = meta.poisoned;
  trace.poison_reason = meta.poison_reason;
  trace.reserve(rows.size());
  std::vector<Value> vals(schema->columns.size());
  for (const auto & r : rows) {
    for (std::size_t c = 0; c < vals.size(); ++c) {
      auto it = r.vars.find(schema->columns[c].name);
      vals[c] = it == r.vars.end() ? Value{} : it->second.coerce_to(schema->columns[c].kind);
    }
    trace.push(r.time, path_ids.at(r.path), vals);
  }
  return trace;
}

Trace read_trace_jsonl(const std::filesystem::path & file)
{
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("IO", "cannot open trace " + file.string());
  return read_trace_jsonl(in, file.string());
}

}  // namespace mdm
