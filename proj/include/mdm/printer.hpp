// mdm/printer.hpp - Canonical text for models, guards, expressions and formulas
#pragma once

#include <string>
#include <vector>

#include "mdm/ast.hpp"

namespace mdm
{

std::string print(const Expr & e);
std::string print(const Guard & g);
std::string print(const Formula & f);
std::string print(const Model & m);
std::string print(const std::vector<Property> & props);

/// `40s`, `0.25s`: shortest spelling that reads back to the same double.
std::string format_duration(double seconds);

}  // namespace mdm
