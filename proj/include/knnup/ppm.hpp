#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

#include <knnup/errors.hpp>
#include <knnup/image.hpp>

namespace knnup {

namespace detail {

// Tokenized PPM header scanner. Accepts arbitrary whitespace and '#' comments
// between header fields, as the format allows.
class PpmScanner {
public:
    explicit PpmScanner(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    std::string next_token() {
        skip_space_and_comments();
        std::string tok;
        while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) {
            tok.push_back(static_cast<char>(bytes_[pos_++]));
        }
        if (tok.empty()) throw IoError("PPM: truncated header");
        return tok;
    }

    int next_int(const char* field) {
        std::string tok = next_token();
        for (char ch : tok) {
            if (!std::isdigit(static_cast<unsigned char>(ch))) {
                throw IoError(std::string("PPM: non-numeric ") + field + " '" + tok + "'");
            }
        }
        if (tok.size() > 9) throw IoError(std::string("PPM: ") + field + " out of range");
        return std::stoi(tok);
    }

    // Exactly one whitespace byte separates the maxval from the payload.
    std::size_t payload_offset() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
            throw IoError("PPM: missing whitespace before pixel payload");
        }
        return pos_ + 1;
    }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Serialize to binary PPM (P6, maxval 255). Grayscale images are expanded to
/// R=G=B triples, since P6 has no single-channel variant.
inline std::vector<std::uint8_t> encode_ppm(const Image& img) {
    std::string header = "P6\n" + std::to_string(img.width) + " " +
                         std::to_string(img.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + static_cast<std::size_t>(img.height) * img.width * 3);
    if (img.channels == 3) {
        out.insert(out.end(), img.data.begin(), img.data.end());
    } else {
        for (std::uint8_t v : img.data) {
            out.push_back(v);
            out.push_back(v);
            out.push_back(v);
        }
    }
    return out;
}

/// Decode a binary PPM (P6). Only maxval 255 is supported; the result is
/// always a 3-channel image.
inline Image decode_ppm(const std::vector<std::uint8_t>& bytes) {
    detail::PpmScanner scan(bytes);
    std::string magic = scan.next_token();
    if (magic != "P6") throw IoError("PPM: unsupported magic '" + magic + "', expected P6");
    int width = scan.next_int("width");
    int height = scan.next_int("height");
    int maxval = scan.next_int("maxval");
    if (maxval != 255) {
        throw IoError("PPM: unsupported maxval " + std::to_string(maxval) + ", expected 255");
    }
    std::size_t offset = scan.payload_offset();
    std::size_t need = static_cast<std::size_t>(height) * width * 3;
    if (bytes.size() - offset < need) {
        throw IoError("PPM: truncated payload, expected " + std::to_string(need) +
                      " bytes, got " + std::to_string(bytes.size() - offset));
    }
    return Image(height, width, 3,
                 std::vector<std::uint8_t>(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                                           bytes.begin() + static_cast<std::ptrdiff_t>(offset + need)));
}

} // namespace knnup
