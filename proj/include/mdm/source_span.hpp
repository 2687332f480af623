// mdm/source_span.hpp - Source locations
#pragma once

#include <cstdint>
#include <string>

namespace mdm
{

struct SourceSpan
{
  std::string file;
  std::uint32_t line = 1;    // 1-based
  std::uint32_t column = 1;  // 1-based
  std::uint32_t length = 0;

  std::string to_string() const
  {
    return (file.empty() ? std::string("<input>") : file) + ":" + std::to_string(line) + ":" +
           std::to_string(column);
  }
};

}  // namespace mdm
