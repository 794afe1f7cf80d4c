#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <knnup/arith.hpp>
#include <knnup/errors.hpp>
#include <knnup/image.hpp>
#include <knnup/parallel.hpp>
#include <knnup/sat.hpp>
#include <knnup/upsample.hpp>

namespace knnup {

/// Per-pixel color-gradient magnitudes on the source image: the largest
/// absolute sample difference against any 4-connected neighbor, over all
/// channels. Border pixels only consult the neighbors that exist.
struct GradientMap {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> grad;

    std::uint8_t at(int r, int c) const {
        return grad[static_cast<std::size_t>(r) * width + c];
    }
};

/// Flat-region detection parameters. grad_thresh is compared strictly, so
/// grad_thresh=1 selects exactly the zero-gradient pixels and grad_thresh=0
/// selects nothing. Connected components smaller than min_region_size are
/// dropped from the mask (0 disables the size filter). Only 4-connectivity is
/// supported, keeping region semantics aligned with the gradient definition.
struct SelectiveConfig {
    int grad_thresh = 1;
    int min_region_size = 0;
    int connectivity = 4;
};

inline void validate_config(const SelectiveConfig& cfg) {
    if (cfg.grad_thresh < 0 || cfg.grad_thresh > 256) {
        throw ConfigError("grad_thresh must be in [0,256], got " +
                          std::to_string(cfg.grad_thresh));
    }
    if (cfg.min_region_size < 0) {
        throw ConfigError("min_region_size must be >= 0, got " +
                          std::to_string(cfg.min_region_size));
    }
    if (cfg.connectivity != 4) {
        throw ConfigError("only 4-connectivity is supported, got " +
                          std::to_string(cfg.connectivity));
    }
}

/// Boolean grid over source pixels; true marks membership in a near-constant
/// region whose output pixels may be served by copies.
struct FlatMask {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> mask;

    bool at(int r, int c) const {
        return mask[static_cast<std::size_t>(r) * width + c] != 0;
    }
};

struct SelectiveStats {
    std::uint64_t copied_pixels = 0;
    std::uint64_t interpolated_pixels = 0;
    double selectivity = 0.0; // copied / (copied + interpolated); 0 when no non-grid pixels
    double wall_ms = 0.0;
};

inline GradientMap gradient_map(const Image& img) {
    GradientMap g;
    g.height = img.height;
    g.width = img.width;
    g.grad.assign(static_cast<std::size_t>(img.height) * img.width, 0);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            int best = 0;
            auto consider = [&](int nr, int nc) {
                for (int ch = 0; ch < img.channels; ++ch) {
                    int d = std::abs(static_cast<int>(img.at(r, c, ch)) -
                                     static_cast<int>(img.at(nr, nc, ch)));
                    best = std::max(best, d);
                }
            };
            if (r > 0) consider(r - 1, c);
            if (r + 1 < img.height) consider(r + 1, c);
            if (c > 0) consider(r, c - 1);
            if (c + 1 < img.width) consider(r, c + 1);
            g.grad[static_cast<std::size_t>(r) * img.width + c] =
                static_cast<std::uint8_t>(best);
        }
    }
    return g;
}

/// Threshold the gradient map (strict <), then clear 4-connected components
/// smaller than min_region_size via flood labeling.
inline FlatMask flat_mask(const GradientMap& grad, const SelectiveConfig& cfg) {
    validate_config(cfg);
    FlatMask m;
    m.height = grad.height;
    m.width = grad.width;
    m.mask.resize(grad.grad.size());
    for (std::size_t i = 0; i < grad.grad.size(); ++i) {
        m.mask[i] = grad.grad[i] < cfg.grad_thresh ? 1 : 0;
    }
    if (cfg.min_region_size < 2) return m;

    const int h = m.height, w = m.width;
    std::vector<std::uint8_t> visited(m.mask.size(), 0);
    std::vector<std::size_t> stack, component;
    for (std::size_t seed = 0; seed < m.mask.size(); ++seed) {
        if (!m.mask[seed] || visited[seed]) continue;
        stack.assign(1, seed);
        component.clear();
        visited[seed] = 1;
        while (!stack.empty()) {
            std::size_t p = stack.back();
            stack.pop_back();
            component.push_back(p);
            int r = static_cast<int>(p / static_cast<std::size_t>(w));
            int c = static_cast<int>(p % static_cast<std::size_t>(w));
            auto push = [&](int nr, int nc) {
                std::size_t q = static_cast<std::size_t>(nr) * w + nc;
                if (m.mask[q] && !visited[q]) {
                    visited[q] = 1;
                    stack.push_back(q);
                }
            };
            if (r > 0) push(r - 1, c);
            if (r + 1 < h) push(r + 1, c);
            if (c > 0) push(r, c - 1);
            if (c + 1 < w) push(r, c + 1);
        }
        if (component.size() < static_cast<std::size_t>(cfg.min_region_size)) {
            for (std::size_t p : component) m.mask[p] = 0;
        }
    }
    return m;
}

namespace detail {

// Nearest original index for output index i at the given factor, ties toward
// the top-left (round half down), clamped to the source range.
inline int nearest_source(int i, int factor, int in_extent) {
    int bias = factor / 2 - (factor % 2 == 0 ? 1 : 0);
    return std::min((i + bias) / factor, in_extent - 1);
}

} // namespace detail

/// KNN upsampling with a flat-region short circuit: output pixels whose
/// nearest original lies in a flat region receive that original's value
/// directly; everything else gets the full window mean via the fast path.
/// Grid positions are exact copies, as in upsample_knn.
inline std::pair<Image, SelectiveStats> upsample_selective(const Image& img,
                                                           const UpsampleConfig& ucfg,
                                                           const SelectiveConfig& scfg,
                                                           int threads = 1) {
    validate_config(ucfg, img);
    validate_config(scfg);
    const auto t0 = std::chrono::steady_clock::now();

    const GradientMap grad = gradient_map(img);
    const FlatMask flat = flat_mask(grad, scfg);
    const SummedAreaTable sat(img);
    const int out_h = img.height * ucfg.f_y;
    const int out_w = img.width * ucfg.f_x;
    const detail::AxisWindows rows =
        detail::axis_windows(img.height, ucfg.f_y, ucfg.k, detail::lock_rows(ucfg));
    const detail::AxisWindows cols =
        detail::axis_windows(img.width, ucfg.f_x, ucfg.k, detail::lock_cols(ucfg));

    std::vector<int> nearest_r(static_cast<std::size_t>(out_h));
    for (int i = 0; i < out_h; ++i) {
        nearest_r[static_cast<std::size_t>(i)] = detail::nearest_source(i, ucfg.f_y, img.height);
    }
    std::vector<int> nearest_c(static_cast<std::size_t>(out_w));
    for (int j = 0; j < out_w; ++j) {
        nearest_c[static_cast<std::size_t>(j)] = detail::nearest_source(j, ucfg.f_x, img.width);
    }

    Image out(out_h, out_w, img.channels);
    std::vector<std::uint64_t> copied_by_row(static_cast<std::size_t>(out_h), 0);
    std::vector<std::uint64_t> interp_by_row(static_cast<std::size_t>(out_h), 0);

    detail::parallel_rows(out_h, threads, [&](int i) {
        const int r_lo = rows.lo[static_cast<std::size_t>(i)];
        const int r_hi = rows.hi[static_cast<std::size_t>(i)];
        const int r_near = nearest_r[static_cast<std::size_t>(i)];
        std::uint64_t copied = 0, interpolated = 0;
        for (int j = 0; j < out_w; ++j) {
            if (i % ucfg.f_y == 0 && j % ucfg.f_x == 0) {
                for (int ch = 0; ch < img.channels; ++ch) {
                    out.at(i, j, ch) = img.at(i / ucfg.f_y, j / ucfg.f_x, ch);
                }
                continue;
            }
            const int c_near = nearest_c[static_cast<std::size_t>(j)];
            if (flat.at(r_near, c_near)) {
                for (int ch = 0; ch < img.channels; ++ch) {
                    out.at(i, j, ch) = img.at(r_near, c_near, ch);
                }
                ++copied;
            } else {
                const int c_lo = cols.lo[static_cast<std::size_t>(j)];
                const int c_hi = cols.hi[static_cast<std::size_t>(j)];
                const std::uint64_t count =
                    static_cast<std::uint64_t>(r_hi - r_lo + 1) * (c_hi - c_lo + 1);
                for (int ch = 0; ch < img.channels; ++ch) {
                    std::uint64_t sum = sat.rect_sum(r_lo, r_hi, c_lo, c_hi, ch);
                    out.at(i, j, ch) = static_cast<std::uint8_t>(round_div(sum, count));
                }
                ++interpolated;
            }
        }
        copied_by_row[static_cast<std::size_t>(i)] = copied;
        interp_by_row[static_cast<std::size_t>(i)] = interpolated;
    });

    SelectiveStats stats;
    for (int i = 0; i < out_h; ++i) {
        stats.copied_pixels += copied_by_row[static_cast<std::size_t>(i)];
        stats.interpolated_pixels += interp_by_row[static_cast<std::size_t>(i)];
    }
    const std::uint64_t non_grid = stats.copied_pixels + stats.interpolated_pixels;
    stats.selectivity = non_grid ? static_cast<double>(stats.copied_pixels) /
                                       static_cast<double>(non_grid)
                                 : 0.0;
    stats.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(out), stats};
}

} // namespace knnup
