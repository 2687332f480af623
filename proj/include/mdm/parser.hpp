// mdm/parser.hpp - Text front-end for models (*.mdm) and properties (*.mprop)
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mdm/ast.hpp"

namespace mdm
{

/// Parses a model. Throws ParseError carrying the span and expected tokens.
Model parse_model(std::string_view text, const std::string & file = {});

/// Parses a single formula.
FormulaPtr parse_formula(std::string_view text, const std::string & file = {});

/// Parses a property file: a sequence of `prop NAME := formula;`.
std::vector<Property> parse_properties(std::string_view text, const std::string & file = {});

/// Parses one guard expression (the text after `when`).
GuardPtr parse_guard(std::string_view text, const std::string & file = {});

/// Parses one expression.
ExprPtr parse_expr(std::string_view text, const std::string & file = {});

/// Nesting limit for parenthesised / prefix constructs.
inline constexpr int kMaxParseDepth = 1000;

}  // namespace mdm
