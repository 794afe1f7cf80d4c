#pragma once

#include <algorithm>
#include <cstdint>
#include <string>

#include <knnup/arith.hpp>
#include <knnup/errors.hpp>
#include <knnup/image.hpp>

namespace knnup {

namespace detail {

inline void check_factors(int f_y, int f_x) {
    if (f_y < 1 || f_x < 1) {
        throw ConfigError("downsample factors must be >= 1, got f_y=" + std::to_string(f_y) +
                          " f_x=" + std::to_string(f_x));
    }
}

} // namespace detail

/// Keep every f-th pixel along each axis: out[r][c] = in[r*f_y][c*f_x].
/// Output size is ceil(H/f_y) x ceil(W/f_x), so partial strides survive.
inline Image downsample_decimate(const Image& img, int f_y, int f_x) {
    detail::check_factors(f_y, f_x);
    int out_h = ceil_div(img.height, f_y);
    int out_w = ceil_div(img.width, f_x);
    Image out(out_h, out_w, img.channels);
    for (int r = 0; r < out_h; ++r) {
        for (int c = 0; c < out_w; ++c) {
            for (int ch = 0; ch < img.channels; ++ch) {
                out.at(r, c, ch) = img.at(r * f_y, c * f_x, ch);
            }
        }
    }
    return out;
}

/// Block mean: out[r][c] is the rounded per-channel mean of the f_y x f_x
/// block anchored at (r*f_y, c*f_x), clipped at the image borders.
inline Image downsample_box(const Image& img, int f_y, int f_x) {
    detail::check_factors(f_y, f_x);
    int out_h = ceil_div(img.height, f_y);
    int out_w = ceil_div(img.width, f_x);
    Image out(out_h, out_w, img.channels);
    for (int r = 0; r < out_h; ++r) {
        int r0 = r * f_y;
        int r1 = std::min(r0 + f_y, img.height);
        for (int c = 0; c < out_w; ++c) {
            int c0 = c * f_x;
            int c1 = std::min(c0 + f_x, img.width);
            std::uint64_t count = static_cast<std::uint64_t>(r1 - r0) * (c1 - c0);
            for (int ch = 0; ch < img.channels; ++ch) {
                std::uint64_t sum = 0;
                for (int rr = r0; rr < r1; ++rr) {
                    for (int cc = c0; cc < c1; ++cc) {
                        sum += img.at(rr, cc, ch);
                    }
                }
                out.at(r, c, ch) = static_cast<std::uint8_t>(round_div(sum, count));
            }
        }
    }
    return out;
}

} // namespace knnup
