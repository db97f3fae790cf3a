#ifndef UWROUTE_FORMAT_HPP
#define UWROUTE_FORMAT_HPP

#include <charconv>
#include <cmath>
#include <string>

namespace uwroute
{

/// Shortest round-trip decimal form; identical bytes for identical doubles.
inline std::string
format_number(double value)
{
    if (std::isnan(value))
    {
        return "nan";
    }
    if (std::isinf(value))
    {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, end);
}

} // namespace uwroute

#endif
