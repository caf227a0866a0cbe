#ifndef KLEIN_FORMAT_HPP
#define KLEIN_FORMAT_HPP

#include <charconv>
#include <cstdio>
#include <string>

namespace klein::num {

// Shortest decimal representation that round-trips the double exactly
// (never more than 17 significant digits). Used for all CSV/report output
// so that identical runs produce byte-identical files.
inline std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace klein::num

#endif
