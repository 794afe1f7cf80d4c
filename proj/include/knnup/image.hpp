#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <knnup/arith.hpp>
#include <knnup/errors.hpp>

namespace knnup {

/// Row-major, channel-interleaved 8-bit raster; channels is 1 (gray) or 3 (RGB).
/// Images are treated as immutable once filled: every operation in this library
/// takes them by const reference and returns fresh ones, so concurrent use is safe.
struct Image {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<std::uint8_t> data;

    Image() = default;

    Image(int h, int w, int c, std::uint8_t fill = 0)
        : height(h), width(w), channels(c), data(checked_size(h, w, c), fill) {}

    Image(int h, int w, int c, std::vector<std::uint8_t> samples)
        : height(h), width(w), channels(c), data(std::move(samples)) {
        if (data.size() != checked_size(h, w, c)) {
            throw ConfigError("image data length " + std::to_string(data.size()) +
                              " does not equal height*width*channels = " +
                              std::to_string(static_cast<std::size_t>(h) * w * c));
        }
    }

    std::size_t index(int r, int c, int ch) const {
        return (static_cast<std::size_t>(r) * width + c) * channels + ch;
    }

    std::uint8_t& at(int r, int c, int ch = 0) { return data[index(r, c, ch)]; }
    std::uint8_t at(int r, int c, int ch = 0) const { return data[index(r, c, ch)]; }

    std::size_t sample_count() const { return data.size(); }

    bool same_shape(const Image& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }

    bool operator==(const Image&) const = default;

private:
    static std::size_t checked_size(int h, int w, int c) {
        if (h < 1 || w < 1) {
            throw ConfigError("image dimensions must be at least 1x1, got " +
                              std::to_string(h) + "x" + std::to_string(w));
        }
        if (c != 1 && c != 3) {
            throw ConfigError("channel count must be 1 or 3, got " + std::to_string(c));
        }
        return static_cast<std::size_t>(h) * w * c;
    }
};

/// The same raster on the [0,1] scale (sample = raw / 255). Quantizing back
/// recovers the source image exactly.
struct NormalizedImage {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> data;

    std::size_t index(int r, int c, int ch) const {
        return (static_cast<std::size_t>(r) * width + c) * channels + ch;
    }

    double at(int r, int c, int ch = 0) const { return data[index(r, c, ch)]; }

    bool same_shape(const NormalizedImage& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }
};

inline NormalizedImage normalize(const Image& img) {
    NormalizedImage out;
    out.height = img.height;
    out.width = img.width;
    out.channels = img.channels;
    out.data.resize(img.data.size());
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        out.data[i] = img.data[i] / 255.0;
    }
    return out;
}

inline Image quantize(const NormalizedImage& img) {
    Image out(img.height, img.width, img.channels);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        out.data[i] = quantize_sample(img.data[i] * 255.0);
    }
    return out;
}

} // namespace knnup
