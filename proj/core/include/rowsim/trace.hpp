#pragma once

#include <iosfwd>
#include <string>

#include "rowsim/command.hpp"

namespace rowsim::dram {

/// One command per line: `<timestamp_ns> <KIND> [row]`. Blank lines and `#` comments are skipped.
Trace read_trace(std::istream& in);
Trace load_trace(const std::string& path);

void write_trace(std::ostream& out, const Trace& trace);
void save_trace(const Trace& trace, const std::string& path);

/// Throws StateError on the first timestamp regression.
void check_monotone(const Trace& trace);

/// Time between the first and last command, zero for empty traces.
Nanos duration(const Trace& trace);

}  // namespace rowsim::dram
