#pragma once

#include <iosfwd>
#include <string>

namespace qcdma {

/// Shortest round-trip decimal representation of a double ('.' separator,
/// never locale dependent).
std::string format_double(double v);

/// Appends one CSV cell (no quoting; numeric payloads only).
void append_cell(std::string& line, double v);

} // namespace qcdma
