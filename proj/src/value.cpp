// src/value.cpp - Scalar value helpers
#include "mdm/value.hpp"

#include <charconv>
#include <cmath>

namespace mdm
{

std::string_view kind_name(ValueKind kind)
{
  switch (kind) {
    case ValueKind::Int:
      return "int";
    case ValueKind::Real:
      return "real";
    case ValueKind::Bool:
      return "bool";
  }
  return "?";
}

std::optional<ValueKind> parse_kind(std::string_view text)
{
  if (text == "int") return ValueKind::Int;
  if (text == "real") return ValueKind::Real;
  if (text == "bool") return ValueKind::Bool;
  return std::nullopt;
}

Value Value::coerce_to(ValueKind kind) const
{
  if (kind == ValueKind::Real && tag_ == Tag::Int) {
    return of_real(static_cast<double>(int_));
  }
  return *this;
}

bool operator==(const Value & a, const Value & b) noexcept
{
  if (a.tag_ != b.tag_) return false;
  switch (a.tag_) {
    case Value::Tag::None:
      return true;
    case Value::Tag::Int:
      return a.int_ == b.int_;
    case Value::Tag::Real:
      // Bitwise identity so that NaN == NaN and -0.0 != 0.0 for structural checks.
      return std::signbit(a.real_) == std::signbit(b.real_) &&
             (a.real_ == b.real_ || (std::isnan(a.real_) && std::isnan(b.real_)));
    case Value::Tag::Bool:
      return a.bool_ == b.bool_;
  }
  return false;
}

std::string Value::to_string() const
{
  switch (tag_) {
    case Tag::None:
      return "<absent>";
    case Tag::Int:
      return std::to_string(int_);
    case Tag::Real:
      return format_real(real_);
    case Tag::Bool:
      return bool_ ? "true" : "false";
  }
  return "?";
}

std::string format_real(double v)
{
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  std::string out(buf, res.ptr);
  if (out.find_first_of(".e") == std::string::npos) {
    out += ".0";
  }
  return out;
}

}  // namespace mdm
