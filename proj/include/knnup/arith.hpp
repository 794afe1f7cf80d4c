#pragma once

#include <cmath>
#include <cstdint>

namespace knnup {

// Floor/ceil division for possibly negative numerators and positive divisors.
constexpr int floor_div(int a, int b) {
    int q = a / b;
    return (a % b != 0 && a < 0) ? q - 1 : q;
}

constexpr int ceil_div(int a, int b) {
    return -floor_div(-a, b);
}

// Round half up for non-negative integer ratios. Exact for even and odd
// divisors: with an odd divisor the ratio can never land on an exact half.
constexpr std::uint64_t round_div(std::uint64_t sum, std::uint64_t count) {
    return (sum + count / 2) / count;
}

// Round half up on a non-negative double, clamped to the 8-bit range.
inline std::uint8_t quantize_sample(double v) {
    double r = std::floor(v + 0.5);
    if (r < 0.0) r = 0.0;
    if (r > 255.0) r = 255.0;
    return static_cast<std::uint8_t>(r);
}

} // namespace knnup
