// src/trace.cpp - Snapshot storage and mode-path codes
#include "mdm/trace.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace mdm
{

std::int64_t mode_code_of(std::string_view name)
{
  std::size_t start = name.size();
  while (start > 0 && std::isdigit(static_cast<unsigned char>(name[start - 1]))) --start;
  if (start == name.size()) return -1;
  std::int64_t code = 0;
  const auto res = std::from_chars(name.data() + start, name.data() + name.size(), code);
  if (res.ec != std::errc{}) return -1;
  return code;
}

ModePath ModePath::from_names(std::vector<std::string> names)
{
  ModePath p;
  p.names = std::move(names);
  if (p.names.size() == 1) {
    p.mode_code = mode_code_of(p.names[0]);
  } else if (p.names.size() >= 2) {
    p.mode_code = mode_code_of(p.names[1]);
  }
  if (p.names.size() >= 3) p.submode_code = mode_code_of(p.names[2]);
  return p;
}

bool ModePath::contains(std::string_view name) const
{
  return std::find(names.begin(), names.end(), name) != names.end();
}

const std::string * ModePath::submode_name() const
{
  return names.size() >= 3 ? &names[2] : nullptr;
}

int TraceSchema::column_index(std::string_view name) const
{
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

void Trace::reserve(std::size_t n)
{
  times_.reserve(n);
  paths_.reserve(n);
  values_.reserve(n * schema_->columns.size());
}

void Trace::push(double time, std::uint32_t path_id, std::span<const Value> vals)
{
  times_.push_back(time);
  paths_.push_back(path_id);
  values_.insert(values_.end(), vals.begin(), vals.end());
}

void Trace::truncate(std::size_t n)
{
  if (n >= size()) return;
  times_.resize(n);
  paths_.resize(n);
  values_.resize(n * schema_->columns.size());
}

Snapshot Trace::snapshot(std::size_t i) const
{
  Snapshot s;
  s.index = i;
  s.time = times_[i];
  s.mode_path = path(i).names;
  const auto vals = values(i);
  for (std::size_t c = 0; c < vals.size(); ++c) {
    if (vals[c].present()) s.valuation.emplace(schema_->columns[c].name, vals[c]);
  }
  return s;
}

}  // namespace mdm
