#pragma once

#include <cstdint>
#include <vector>

#include <knnup/image.hpp>

namespace knnup {

/// Per-channel 2-D prefix sums over an image, sized (H+1) x (W+1) so that any
/// inclusive rectangle sum is four lookups. Entries are 64-bit, so the sums
/// are exact integer arithmetic with no rounding.
struct SummedAreaTable {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<std::uint64_t> table; // channel-major planes of (H+1)*(W+1)

    explicit SummedAreaTable(const Image& img)
        : height(img.height), width(img.width), channels(img.channels),
          table(static_cast<std::size_t>(img.channels) * (img.height + 1) * (img.width + 1), 0) {
        for (int ch = 0; ch < channels; ++ch) {
            std::uint64_t* plane = plane_ptr(ch);
            for (int r = 0; r < height; ++r) {
                std::uint64_t* cur = plane + static_cast<std::size_t>(r + 1) * (width + 1);
                const std::uint64_t* above = plane + static_cast<std::size_t>(r) * (width + 1);
                for (int c = 0; c < width; ++c) {
                    cur[c + 1] = img.at(r, c, ch) + cur[c] + above[c + 1] - above[c];
                }
            }
        }
    }

    /// Sum over rows [r0, r1] and columns [c0, c1], both ends inclusive.
    std::uint64_t rect_sum(int r0, int r1, int c0, int c1, int ch) const {
        const std::uint64_t* plane = plane_ptr(ch);
        std::size_t w1 = static_cast<std::size_t>(width) + 1;
        return plane[static_cast<std::size_t>(r1 + 1) * w1 + (c1 + 1)] -
               plane[static_cast<std::size_t>(r0) * w1 + (c1 + 1)] -
               plane[static_cast<std::size_t>(r1 + 1) * w1 + c0] +
               plane[static_cast<std::size_t>(r0) * w1 + c0];
    }

private:
    std::uint64_t* plane_ptr(int ch) {
        return table.data() + static_cast<std::size_t>(ch) * (height + 1) * (width + 1);
    }
    const std::uint64_t* plane_ptr(int ch) const {
        return table.data() + static_cast<std::size_t>(ch) * (height + 1) * (width + 1);
    }
};

} // namespace knnup
