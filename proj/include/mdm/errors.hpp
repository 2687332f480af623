// mdm/errors.hpp - Exception types shared by every stage of the toolkit
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mdm/source_span.hpp"

namespace mdm
{

/// Base of all toolkit errors. `code()` is a stable, machine-readable tag.
class Error : public std::runtime_error
{
public:
  Error(std::string code, const std::string & message)
  : std::runtime_error(message), code_(std::move(code))
  {
  }

  const std::string & code() const noexcept { return code_; }

private:
  std::string code_;
};

class ParseError : public Error
{
public:
  ParseError(const std::string & message, SourceSpan span, std::vector<std::string> expected = {})
  : Error("PARSE", message), span_(std::move(span)), expected_(std::move(expected))
  {
  }

  const SourceSpan & span() const noexcept { return span_; }
  const std::vector<std::string> & expected() const noexcept { return expected_; }

private:
  SourceSpan span_;
  std::vector<std::string> expected_;
};

class TypeError : public Error
{
public:
  TypeError(const std::string & message, SourceSpan span, std::string subexpr)
  : Error("TYPE_ERROR", message), span_(std::move(span)), subexpr_(std::move(subexpr))
  {
  }

  const SourceSpan & span() const noexcept { return span_; }
  /// Canonical text of the offending subexpression.
  const std::string & subexpr() const noexcept { return subexpr_; }

private:
  SourceSpan span_;
  std::string subexpr_;
};

/// Runtime numeric failure (division by zero, sqrt of a negative, missing variable).
class EvalError : public Error
{
public:
  explicit EvalError(const std::string & message) : Error("EVAL_ERROR", message) {}
};

class DomainError : public Error
{
public:
  explicit DomainError(const std::string & message) : Error("DOMAIN_ERROR", message) {}
};

class UnknownMode : public Error
{
public:
  explicit UnknownMode(const std::string & name) : Error("UNKNOWN_MODE", "unknown mode '" + name + "'")
  {
  }
};

}  // namespace mdm
