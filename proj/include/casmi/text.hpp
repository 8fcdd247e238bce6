#pragma once

#include <string>

namespace casmi::text {

/// Shortest decimal representation that round-trips the double.
std::string format_double(double v);

}  // namespace casmi::text
