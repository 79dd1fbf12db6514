#pragma once

#include <string>
#include <vector>

namespace mpbo {

// Canonical decimal text for a double: integral values print without a
// decimal point, everything else uses the shortest form that round-trips.
std::string format_number(double v);

std::vector<std::string> split_ws(const std::string& line);

}  // namespace mpbo
