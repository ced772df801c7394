#include "qcdma/csv.hpp"

#include <charconv>
#include <system_error>

namespace qcdma {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void append_cell(std::string& line, double v) {
    if (!line.empty() && line.back() != '\n') line.push_back(',');
    line += format_double(v);
}

} // namespace qcdma
