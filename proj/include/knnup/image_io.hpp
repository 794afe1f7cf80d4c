#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <knnup/errors.hpp>
#include <knnup/image.hpp>
#include <knnup/png.hpp>
#include <knnup/ppm.hpp>

namespace knnup {

namespace detail {

inline std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file for reading: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path);
    return bytes;
}

inline void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path);
}

inline std::string lower_extension(const std::string& path) {
    std::string ext = std::filesystem::path(path).extension().string();
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext;
}

} // namespace detail

/// Load a PPM (P6) or PNG image. The format is detected from the file's magic
/// bytes, not its extension.
inline Image load_image(const std::string& path) {
    std::vector<std::uint8_t> bytes = detail::read_file(path);
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') {
        return decode_ppm(bytes);
    }
    if (bytes.size() >= 8 && bytes[0] == 0x89 && bytes[1] == 'P') {
        return decode_png(bytes);
    }
    throw IoError("unrecognized image format (expected PPM P6 or PNG): " + path);
}

/// Save as PPM or PNG depending on the path's extension (.ppm / .png).
inline void save_image(const Image& img, const std::string& path) {
    std::string ext = detail::lower_extension(path);
    if (ext == ".ppm") {
        detail::write_file(path, encode_ppm(img));
    } else if (ext == ".png") {
        detail::write_file(path, encode_png(img));
    } else {
        throw ConfigError("unsupported output extension '" + ext + "' (use .ppm or .png)");
    }
}

} // namespace knnup
