#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <knnup/errors.hpp>
#include <knnup/image.hpp>
#include <knnup/image_io.hpp>

namespace knnup {

inline constexpr std::size_t kCifarRecordBytes = 3073; // label + 3 x 1024 planes
inline constexpr int kCifarSide = 32;

/// Read a CIFAR-10 binary batch: records of one label byte followed by planar
/// 32x32 R, G, B planes. Returns up to `limit` images with the planes
/// re-interleaved to row-major RGB; labels are discarded.
inline std::vector<Image> load_cifar10_batch(
    const std::string& path,
    std::size_t limit = std::numeric_limits<std::size_t>::max()) {
    std::vector<std::uint8_t> bytes = detail::read_file(path);
    if (bytes.empty() || bytes.size() % kCifarRecordBytes != 0) {
        throw IoError("CIFAR-10 batch size " + std::to_string(bytes.size()) +
                      " is not a positive multiple of " + std::to_string(kCifarRecordBytes));
    }
    std::size_t records = bytes.size() / kCifarRecordBytes;
    std::size_t n = std::min(records, limit);

    constexpr int plane = kCifarSide * kCifarSide;
    std::vector<Image> out;
    out.reserve(n);
    for (std::size_t rec = 0; rec < n; ++rec) {
        const std::uint8_t* base = bytes.data() + rec * kCifarRecordBytes + 1;
        Image img(kCifarSide, kCifarSide, 3);
        for (int p = 0; p < plane; ++p) {
            img.data[static_cast<std::size_t>(p) * 3 + 0] = base[p];
            img.data[static_cast<std::size_t>(p) * 3 + 1] = base[plane + p];
            img.data[static_cast<std::size_t>(p) * 3 + 2] = base[2 * plane + p];
        }
        out.push_back(std::move(img));
    }
    return out;
}

} // namespace knnup
