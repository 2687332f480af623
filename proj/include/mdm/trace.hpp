// mdm/trace.hpp - End-of-period snapshots produced by one simulation run
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mdm/value.hpp"

namespace mdm
{

struct Column
{
  std::string name;
  ValueKind kind = ValueKind::Int;
};

/// One root-to-leaf chain of active modes, plus the numeric codes that the
/// `mode` and `submode` observables compare against.
struct ModePath
{
  std::vector<std::string> names;
  std::int64_t mode_code = -1;     // trailing digits of the first mode below the root
  std::int64_t submode_code = -1;  // trailing digits of the second level, -1 if absent

  static ModePath from_names(std::vector<std::string> names);
  bool contains(std::string_view name) const;
  const std::string * submode_name() const;
};

/// Trailing decimal digits of a mode name (`m4` -> 4, `S10` -> 10), -1 when absent.
std::int64_t mode_code_of(std::string_view name);

/// Column layout and mode-path table shared by every trace of one model.
struct TraceSchema
{
  std::vector<Column> columns;
  std::vector<ModePath> paths;

  int column_index(std::string_view name) const;
};

/// Value-semantic materialisation of one snapshot.
struct Snapshot
{
  std::size_t index = 0;
  double time = 0.0;
  std::vector<std::string> mode_path;
  std::map<std::string, Value> valuation;
};

class Trace
{
public:
  Trace() = default;
  explicit Trace(std::shared_ptr<const TraceSchema> schema) : schema_(std::move(schema)) {}

  std::string model_name;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;  // position within a batch run under `seed`
  bool poisoned = false;
  std::string poison_reason;

  const TraceSchema & schema() const { return *schema_; }
  const std::shared_ptr<const TraceSchema> & schema_ptr() const { return schema_; }

  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }

  double time(std::size_t i) const { return times_[i]; }
  std::uint32_t path_id(std::size_t i) const { return paths_[i]; }
  const ModePath & path(std::size_t i) const { return schema_->paths[paths_[i]]; }
  std::span<const Value> values(std::size_t i) const
  {
    const std::size_t w = schema_->columns.size();
    return std::span<const Value>(values_).subspan(i * w, w);
  }

  void reserve(std::size_t n);
  /// Appends a snapshot; `vals` must have one entry per schema column.
  void push(double time, std::uint32_t path_id, std::span<const Value> vals);
  /// Keeps the first n snapshots.
  void truncate(std::size_t n);

  Snapshot snapshot(std::size_t i) const;

private:
  std::shared_ptr<const TraceSchema> schema_;
  std::vector<double> times_;
  std::vector<std::uint32_t> paths_;
  std::vector<Value> values_;
};

}  // namespace mdm
