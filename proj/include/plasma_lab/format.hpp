#pragma once

#include <string>

namespace plasma_lab {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace plasma_lab
