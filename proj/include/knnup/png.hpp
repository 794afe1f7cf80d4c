#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include <zlib.h>

#include <knnup/errors.hpp>
#include <knnup/image.hpp>

namespace knnup {

namespace detail {

inline constexpr std::array<std::uint8_t, 8> kPngSignature = {
    0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

inline void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

inline std::uint32_t get_u32_be(const std::uint8_t* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

inline void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                         const std::uint8_t* data, std::size_t len) {
    put_u32_be(out, static_cast<std::uint32_t>(len));
    std::size_t type_pos = out.size();
    out.insert(out.end(), type, type + 4);
    if (len) out.insert(out.end(), data, data + len);
    uLong crc = crc32(0L, out.data() + type_pos, static_cast<uInt>(4 + len));
    put_u32_be(out, static_cast<std::uint32_t>(crc));
}

inline std::uint8_t paeth_predict(int a, int b, int c) {
    int p = a + b - c;
    int pa = std::abs(p - a);
    int pb = std::abs(p - b);
    int pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return static_cast<std::uint8_t>(a);
    if (pb <= pc) return static_cast<std::uint8_t>(b);
    return static_cast<std::uint8_t>(c);
}

// Reverse one scanline filter in place. prev is the reconstructed row above
// (all zeros for the first row).
inline void unfilter_row(int filter, std::uint8_t* row, const std::uint8_t* prev,
                         std::size_t stride, int bpp) {
    switch (filter) {
    case 0:
        break;
    case 1:
        for (std::size_t x = 0; x < stride; ++x) {
            int a = x >= static_cast<std::size_t>(bpp) ? row[x - bpp] : 0;
            row[x] = static_cast<std::uint8_t>(row[x] + a);
        }
        break;
    case 2:
        for (std::size_t x = 0; x < stride; ++x) {
            row[x] = static_cast<std::uint8_t>(row[x] + prev[x]);
        }
        break;
    case 3:
        for (std::size_t x = 0; x < stride; ++x) {
            int a = x >= static_cast<std::size_t>(bpp) ? row[x - bpp] : 0;
            row[x] = static_cast<std::uint8_t>(row[x] + (a + prev[x]) / 2);
        }
        break;
    case 4:
        for (std::size_t x = 0; x < stride; ++x) {
            int a = x >= static_cast<std::size_t>(bpp) ? row[x - bpp] : 0;
            int c = x >= static_cast<std::size_t>(bpp) ? prev[x - bpp] : 0;
            row[x] = static_cast<std::uint8_t>(row[x] + paeth_predict(a, prev[x], c));
        }
        break;
    default:
        throw IoError("PNG: unknown scanline filter type " + std::to_string(filter));
    }
}

} // namespace detail

/// Serialize to PNG: 8-bit grayscale (color type 0) or truecolor (2),
/// non-interlaced, filter 0 on every scanline, a single IDAT chunk.
inline std::vector<std::uint8_t> encode_png(const Image& img) {
    const int bpp = img.channels;
    const std::size_t stride = static_cast<std::size_t>(img.width) * bpp;
    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<std::size_t>(img.height) * (stride + 1));
    for (int r = 0; r < img.height; ++r) {
        raw.push_back(0); // filter: None
        const std::uint8_t* src = img.data.data() + static_cast<std::size_t>(r) * stride;
        raw.insert(raw.end(), src, src + stride);
    }

    uLongf comp_len = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> comp(comp_len);
    if (compress2(comp.data(), &comp_len, raw.data(), static_cast<uLong>(raw.size()),
                  Z_DEFAULT_COMPRESSION) != Z_OK) {
        throw IoError("PNG: deflate failed");
    }
    comp.resize(comp_len);

    std::uint8_t ihdr[13];
    std::vector<std::uint8_t> hdr;
    detail::put_u32_be(hdr, static_cast<std::uint32_t>(img.width));
    detail::put_u32_be(hdr, static_cast<std::uint32_t>(img.height));
    std::memcpy(ihdr, hdr.data(), 8);
    ihdr[8] = 8;                                  // bit depth
    ihdr[9] = img.channels == 1 ? 0 : 2;          // color type
    ihdr[10] = 0;                                 // compression
    ihdr[11] = 0;                                 // filter method
    ihdr[12] = 0;                                 // no interlacing

    std::vector<std::uint8_t> out(detail::kPngSignature.begin(), detail::kPngSignature.end());
    detail::append_chunk(out, "IHDR", ihdr, sizeof ihdr);
    detail::append_chunk(out, "IDAT", comp.data(), comp.size());
    detail::append_chunk(out, "IEND", nullptr, 0);
    return out;
}

/// Decode a PNG. Supports 8-bit grayscale and truecolor, non-interlaced,
/// all five scanline filters. Chunk CRCs are verified.
inline Image decode_png(const std::vector<std::uint8_t>& bytes) {
    using detail::get_u32_be;
    if (bytes.size() < 8 ||
        !std::equal(detail::kPngSignature.begin(), detail::kPngSignature.end(), bytes.begin())) {
        throw IoError("PNG: bad signature");
    }

    int width = 0, height = 0, channels = 0;
    bool saw_ihdr = false, saw_iend = false;
    std::vector<std::uint8_t> idat;

    std::size_t pos = 8;
    while (pos < bytes.size() && !saw_iend) {
        if (bytes.size() - pos < 12) throw IoError("PNG: truncated chunk header");
        std::uint32_t len = get_u32_be(&bytes[pos]);
        if (bytes.size() - pos - 12 < len) throw IoError("PNG: truncated chunk payload");
        const std::uint8_t* type = &bytes[pos + 4];
        const std::uint8_t* data = &bytes[pos + 8];
        std::uint32_t crc_stored = get_u32_be(data + len);
        uLong crc = crc32(0L, type, static_cast<uInt>(4 + len));
        std::string type_str(reinterpret_cast<const char*>(type), 4);
        if (static_cast<std::uint32_t>(crc) != crc_stored) {
            throw IoError("PNG: CRC mismatch in chunk " + type_str);
        }

        if (type_str == "IHDR") {
            if (len != 13) throw IoError("PNG: IHDR length " + std::to_string(len));
            std::uint32_t w = get_u32_be(data);
            std::uint32_t h = get_u32_be(data + 4);
            int depth = data[8], color = data[9], interlace = data[12];
            if (w == 0 || h == 0 ||
                static_cast<std::uint64_t>(w) * h > (std::uint64_t(1) << 28)) {
                throw IoError("PNG: unsupported dimensions " + std::to_string(w) + "x" +
                              std::to_string(h));
            }
            if (depth != 8) {
                throw IoError("PNG: unsupported bit depth " + std::to_string(depth) +
                              ", expected 8");
            }
            if (color != 0 && color != 2) {
                throw IoError("PNG: unsupported color type " + std::to_string(color) +
                              ", expected grayscale (0) or truecolor (2)");
            }
            if (interlace != 0) throw IoError("PNG: interlaced images are unsupported");
            width = static_cast<int>(w);
            height = static_cast<int>(h);
            channels = color == 0 ? 1 : 3;
            saw_ihdr = true;
        } else if (type_str == "IDAT") {
            if (!saw_ihdr) throw IoError("PNG: IDAT before IHDR");
            idat.insert(idat.end(), data, data + len);
        } else if (type_str == "IEND") {
            saw_iend = true;
        }
        // Ancillary chunks are skipped.
        pos += 12 + len;
    }
    if (!saw_ihdr) throw IoError("PNG: missing IHDR");
    if (!saw_iend) throw IoError("PNG: missing IEND");
    if (idat.empty()) throw IoError("PNG: missing IDAT");

    const int bpp = channels;
    const std::size_t stride = static_cast<std::size_t>(width) * bpp;
    const std::size_t raw_len = static_cast<std::size_t>(height) * (stride + 1);
    std::vector<std::uint8_t> raw(raw_len);
    uLongf dest_len = static_cast<uLongf>(raw_len);
    int zret = uncompress(raw.data(), &dest_len, idat.data(), static_cast<uLong>(idat.size()));
    if (zret != Z_OK || dest_len != raw_len) {
        throw IoError("PNG: truncated or corrupt pixel stream");
    }

    Image img(height, width, channels);
    std::vector<std::uint8_t> zero_row(stride, 0);
    const std::uint8_t* prev = zero_row.data();
    for (int r = 0; r < height; ++r) {
        std::uint8_t* row = raw.data() + static_cast<std::size_t>(r) * (stride + 1);
        int filter = row[0];
        detail::unfilter_row(filter, row + 1, prev, stride, bpp);
        std::memcpy(img.data.data() + static_cast<std::size_t>(r) * stride, row + 1, stride);
        prev = row + 1;
    }
    return img;
}

} // namespace knnup
