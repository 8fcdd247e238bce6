#include "casmi/text.hpp"

#include <charconv>

namespace casmi::text {

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace casmi::text
