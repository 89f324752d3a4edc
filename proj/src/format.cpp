#include "plasma_lab/format.hpp"

#include <array>
#include <charconv>

namespace plasma_lab {

std::string format_double(double value) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return ec == std::errc() ? std::string(buf.data(), ptr) : std::string("nan");
}

}  // namespace plasma_lab
