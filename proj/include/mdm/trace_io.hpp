// mdm/trace_io.hpp - JSON Lines serialisation of traces
#pragma once

#include <filesystem>
#include <iosfwd>

#include "mdm/trace.hpp"

namespace mdm
{

/// Header line `{"model":..,"seed":..,"index":..,"poisoned":..[,"error":..]}`
/// followed by one `{"i":..,"t":..,"mode":[..],"vars":{..}}` line per snapshot.
void write_trace_jsonl(const Trace & trace, std::ostream & out);
void write_trace_jsonl(const Trace & trace, const std::filesystem::path & file);

/// Rebuilds a trace, inferring the column set and kinds from the snapshots.
/// Throws Error("TRACE_FORMAT") on malformed input.
Trace read_trace_jsonl(std::istream & in, const std::string & source = "<trace>");
Trace read_trace_jsonl(const std::filesystem::path & file);

}  // namespace mdm
