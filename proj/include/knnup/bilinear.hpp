#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <knnup/arith.hpp>
#include <knnup/errors.hpp>
#include <knnup/image.hpp>
#include <knnup/parallel.hpp>

namespace knnup {

namespace detail {

// Half-pixel-center source coordinates, precomputed per output index.
struct BilinearAxis {
    std::vector<int> lo, hi;
    std::vector<double> frac;
};

inline BilinearAxis bilinear_axis(int in_extent, int out_extent) {
    BilinearAxis axis;
    axis.lo.resize(static_cast<std::size_t>(out_extent));
    axis.hi.resize(static_cast<std::size_t>(out_extent));
    axis.frac.resize(static_cast<std::size_t>(out_extent));
    for (int i = 0; i < out_extent; ++i) {
        double s = (i + 0.5) * in_extent / out_extent - 0.5;
        s = std::clamp(s, 0.0, static_cast<double>(in_extent - 1));
        int lo = static_cast<int>(s);
        axis.lo[static_cast<std::size_t>(i)] = lo;
        axis.hi[static_cast<std::size_t>(i)] = std::min(lo + 1, in_extent - 1);
        axis.frac[static_cast<std::size_t>(i)] = s - lo;
    }
    return axis;
}

} // namespace detail

/// Bilinear resampling with the half-pixel-center mapping
/// s = (i + 0.5) * in/out - 0.5, clamped to the source range. The four-point
/// blend runs in double precision and is rounded once at the end.
inline Image upsample_bilinear(const Image& img, int out_h, int out_w, int threads = 1) {
    if (out_h < 1 || out_w < 1) {
        throw ConfigError("bilinear output dimensions must be >= 1, got " +
                          std::to_string(out_h) + "x" + std::to_string(out_w));
    }
    if (static_cast<long long>(out_h) * out_w * img.channels > (1LL << 33)) {
        throw ConfigError("bilinear output " + std::to_string(out_h) + "x" +
                          std::to_string(out_w) + " is too large");
    }
    const detail::BilinearAxis ys = detail::bilinear_axis(img.height, out_h);
    const detail::BilinearAxis xs = detail::bilinear_axis(img.width, out_w);
    Image out(out_h, out_w, img.channels);

    detail::parallel_rows(out_h, threads, [&](int i) {
        const int y0 = ys.lo[static_cast<std::size_t>(i)];
        const int y1 = ys.hi[static_cast<std::size_t>(i)];
        const double wy = ys.frac[static_cast<std::size_t>(i)];
        for (int j = 0; j < out_w; ++j) {
            const int x0 = xs.lo[static_cast<std::size_t>(j)];
            const int x1 = xs.hi[static_cast<std::size_t>(j)];
            const double wx = xs.frac[static_cast<std::size_t>(j)];
            for (int ch = 0; ch < img.channels; ++ch) {
                double v = (1.0 - wy) * (1.0 - wx) * img.at(y0, x0, ch) +
                           (1.0 - wy) * wx * img.at(y0, x1, ch) +
                           wy * (1.0 - wx) * img.at(y1, x0, ch) +
                           wy * wx * img.at(y1, x1, ch);
                out.at(i, j, ch) = quantize_sample(v);
            }
        }
    });
    return out;
}

} // namespace knnup
