#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <knnup/arith.hpp>
#include <knnup/errors.hpp>
#include <knnup/image.hpp>
#include <knnup/parallel.hpp>
#include <knnup/sat.hpp>

namespace knnup {

/// Integer upsampling parameters. The neighborhood radius k is measured in
/// output-pixel units; k >= max(f_y, f_x) - 1 guarantees every interpolated
/// pixel sees at least one original, so no window can come up empty.
struct UpsampleConfig {
    int f_y = 1;
    int f_x = 1;
    int k = 1;
    bool axis_aware = false;
};

/// Default radius: the smallest round value that satisfies the coverage bound
/// with margin.
inline int auto_radius(int f_y, int f_x) { return std::max(f_y, f_x); }

inline void validate_config(const UpsampleConfig& cfg) {
    if (cfg.f_y < 1 || cfg.f_x < 1) {
        throw ConfigError("upsample factors must be >= 1, got f_y=" + std::to_string(cfg.f_y) +
                          " f_x=" + std::to_string(cfg.f_x));
    }
    if (cfg.k < 1) {
        throw ConfigError("neighborhood radius k must be >= 1, got k=" + std::to_string(cfg.k));
    }
    int bound = std::max(cfg.f_y, cfg.f_x) - 1;
    if (cfg.k < bound) {
        throw ConfigError("k=" + std::to_string(cfg.k) + " violates k >= max(f_y,f_x)-1 = " +
                          std::to_string(bound) + "; windows would contain no original pixels");
    }
}

/// Shape-aware variant: additionally rejects configs whose output would not
/// fit in the address space.
inline void validate_config(const UpsampleConfig& cfg, const Image& img) {
    validate_config(cfg);
    long long out_h = static_cast<long long>(img.height) * cfg.f_y;
    long long out_w = static_cast<long long>(img.width) * cfg.f_x;
    if (out_h > std::numeric_limits<int>::max() || out_w > std::numeric_limits<int>::max() ||
        out_h * out_w > (1LL << 33) / img.channels) {
        throw ConfigError("upsampled output " + std::to_string(out_h) + "x" +
                          std::to_string(out_w) + " is too large");
    }
}

namespace detail {

// Source-index range feeding each output index along one axis: the window
// |r*factor - i| <= k resolves to r in [ceil((i-k)/factor), floor((i+k)/factor)],
// clamped to the valid source range. A locked axis (axis-aware interpolation
// with factor 1) pins the range to the output index itself.
struct AxisWindows {
    std::vector<int> lo, hi;
};

inline AxisWindows axis_windows(int in_extent, int factor, int k, bool locked) {
    int out_extent = in_extent * factor;
    AxisWindows w;
    w.lo.resize(static_cast<std::size_t>(out_extent));
    w.hi.resize(static_cast<std::size_t>(out_extent));
    for (int i = 0; i < out_extent; ++i) {
        if (locked) {
            w.lo[static_cast<std::size_t>(i)] = i;
            w.hi[static_cast<std::size_t>(i)] = i;
        } else {
            w.lo[static_cast<std::size_t>(i)] = std::max(0, ceil_div(i - k, factor));
            w.hi[static_cast<std::size_t>(i)] = std::min(in_extent - 1, floor_div(i + k, factor));
        }
    }
    return w;
}

inline bool lock_rows(const UpsampleConfig& cfg) {
    return cfg.axis_aware && cfg.f_y == 1 && cfg.f_x != 1;
}

inline bool lock_cols(const UpsampleConfig& cfg) {
    return cfg.axis_aware && cfg.f_x == 1 && cfg.f_y != 1;
}

} // namespace detail

/// KNN interpolation, reference path. Output is (H*f_y) x (W*f_x). Output
/// positions divisible by both factors receive exact copies of the originals;
/// every other pixel is the rounded per-channel mean of all original pixels
/// whose output-grid positions lie within Chebyshev distance k. Windows clamp
/// at the borders. With axis_aware set and exactly one factor equal to 1, the
/// window is restricted to the unchanged row or column.
inline Image upsample_knn(const Image& img, const UpsampleConfig& cfg, int threads = 1) {
    validate_config(cfg, img);
    const int out_h = img.height * cfg.f_y;
    const int out_w = img.width * cfg.f_x;
    const bool lock_r = detail::lock_rows(cfg);
    const bool lock_c = detail::lock_cols(cfg);
    Image out(out_h, out_w, img.channels);

    detail::parallel_rows(out_h, threads, [&](int i) {
        for (int j = 0; j < out_w; ++j) {
            if (i % cfg.f_y == 0 && j % cfg.f_x == 0) {
                for (int ch = 0; ch < img.channels; ++ch) {
                    out.at(i, j, ch) = img.at(i / cfg.f_y, j / cfg.f_x, ch);
                }
                continue;
            }
            int oy_lo = lock_r ? i : std::max(0, i - cfg.k);
            int oy_hi = lock_r ? i : std::min(out_h - 1, i + cfg.k);
            int ox_lo = lock_c ? j : std::max(0, j - cfg.k);
            int ox_hi = lock_c ? j : std::min(out_w - 1, j + cfg.k);
            std::uint64_t sum[3] = {0, 0, 0};
            std::uint64_t count = 0;
            for (int oy = oy_lo; oy <= oy_hi; ++oy) {
                if (oy % cfg.f_y != 0) continue;
                for (int ox = ox_lo; ox <= ox_hi; ++ox) {
                    if (ox % cfg.f_x != 0) continue;
                    for (int ch = 0; ch < img.channels; ++ch) {
                        sum[ch] += img.at(oy / cfg.f_y, ox / cfg.f_x, ch);
                    }
                    ++count;
                }
            }
            assert(count > 0); // guaranteed by the k lower bound
            for (int ch = 0; ch < img.channels; ++ch) {
                out.at(i, j, ch) = static_cast<std::uint8_t>(round_div(sum[ch], count));
            }
        }
    });
    return out;
}

/// Same contract and bit-identical output as upsample_knn, with the window
/// mean answered by one summed-area-table rectangle query per channel.
inline Image upsample_knn_fast(const Image& img, const UpsampleConfig& cfg, int threads = 1) {
    validate_config(cfg, img);
    const int out_h = img.height * cfg.f_y;
    const int out_w = img.width * cfg.f_x;
    const SummedAreaTable sat(img);
    const detail::AxisWindows rows =
        detail::axis_windows(img.height, cfg.f_y, cfg.k, detail::lock_rows(cfg));
    const detail::AxisWindows cols =
        detail::axis_windows(img.width, cfg.f_x, cfg.k, detail::lock_cols(cfg));
    Image out(out_h, out_w, img.channels);

    detail::parallel_rows(out_h, threads, [&](int i) {
        const int r_lo = rows.lo[static_cast<std::size_t>(i)];
        const int r_hi = rows.hi[static_cast<std::size_t>(i)];
        for (int j = 0; j < out_w; ++j) {
            if (i % cfg.f_y == 0 && j % cfg.f_x == 0) {
                for (int ch = 0; ch < img.channels; ++ch) {
                    out.at(i, j, ch) = img.at(i / cfg.f_y, j / cfg.f_x, ch);
                }
                continue;
            }
            const int c_lo = cols.lo[static_cast<std::size_t>(j)];
            const int c_hi = cols.hi[static_cast<std::size_t>(j)];
            const std::uint64_t count =
                static_cast<std::uint64_t>(r_hi - r_lo + 1) * (c_hi - c_lo + 1);
            for (int ch = 0; ch < img.channels; ++ch) {
                std::uint64_t sum = sat.rect_sum(r_lo, r_hi, c_lo, c_hi, ch);
                out.at(i, j, ch) = static_cast<std::uint8_t>(round_div(sum, count));
            }
        }
    });
    return out;
}

} // namespace knnup
