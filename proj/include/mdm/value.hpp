// mdm/value.hpp - Scalar runtime values (64-bit int, binary64 real, bool)
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mdm
{

enum class ValueKind : std::uint8_t { Int, Real, Bool };

std::string_view kind_name(ValueKind kind);
std::optional<ValueKind> parse_kind(std::string_view text);

/// A tagged scalar. A default-constructed Value is "absent" and is what a
/// trace holds for a variable missing from a snapshot.
class Value
{
public:
  constexpr Value() = default;

  static constexpr Value of_int(std::int64_t v)
  {
    Value out;
    out.tag_ = Tag::Int;
    out.int_ = v;
    return out;
  }
  static constexpr Value of_real(double v)
  {
    Value out;
    out.tag_ = Tag::Real;
    out.real_ = v;
    return out;
  }
  static constexpr Value of_bool(bool v)
  {
    Value out;
    out.tag_ = Tag::Bool;
    out.bool_ = v;
    return out;
  }
  /// Zero of the given kind (0, 0.0, false).
  static constexpr Value zero(ValueKind kind)
  {
    switch (kind) {
      case ValueKind::Int:
        return of_int(0);
      case ValueKind::Real:
        return of_real(0.0);
      case ValueKind::Bool:
        return of_bool(false);
    }
    return {};
  }

  constexpr bool present() const noexcept { return tag_ != Tag::None; }
  constexpr bool is_int() const noexcept { return tag_ == Tag::Int; }
  constexpr bool is_real() const noexcept { return tag_ == Tag::Real; }
  constexpr bool is_bool() const noexcept { return tag_ == Tag::Bool; }
  constexpr bool is_numeric() const noexcept { return tag_ == Tag::Int || tag_ == Tag::Real; }

  /// Kind of a present value; unspecified for an absent one.
  constexpr ValueKind kind() const noexcept
  {
    return tag_ == Tag::Int ? ValueKind::Int : tag_ == Tag::Real ? ValueKind::Real : ValueKind::Bool;
  }

  constexpr std::int64_t as_int() const noexcept { return int_; }
  /// Numeric value with int promoted to real.
  constexpr double as_real() const noexcept
  {
    return tag_ == Tag::Int ? static_cast<double>(int_) : real_;
  }
  constexpr bool as_bool() const noexcept { return bool_; }

  /// Converts to the declared kind of a variable (int -> real promotion only).
  Value coerce_to(ValueKind kind) const;

  friend bool operator==(const Value & a, const Value & b) noexcept;

  std::string to_string() const;

private:
  enum class Tag : std::uint8_t { None, Int, Real, Bool };
  Tag tag_ = Tag::None;
  union {
    std::int64_t int_ = 0;
    double real_;
    bool bool_;
  };
};

/// Shortest decimal text that reads back to exactly `v`; always contains
/// '.' or an exponent so it lexes as a real literal.
std::string format_real(double v);

}  // namespace mdm
