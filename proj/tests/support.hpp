#pragma once

// Shared helpers for the test suites: deterministic generators, independent
// reference implementations, and fixture paths.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <knnup/image.hpp>
#include <knnup/metrics.hpp>
#include <knnup/upsample.hpp>

namespace testutil {

inline std::string fixture_path(const std::string& name) {
    return std::string(KNNUP_FIXTURE_DIR) + "/" + name;
}

// Per-process scratch directory for file round-trip tests.
inline const std::string& temp_dir() {
    static std::string dir = [] {
        std::string templ = (std::filesystem::temp_directory_path() / "knnup_XXXXXX").string();
        std::vector<char> buf(templ.begin(), templ.end());
        buf.push_back('\0');
        char* got = mkdtemp(buf.data());
        return std::string(got ? got : ".");
    }();
    return dir;
}

inline std::string temp_path(const std::string& name) { return temp_dir() + "/" + name; }

inline knnup::Image random_image(std::mt19937& rng, int h, int w, int c) {
    knnup::Image img(h, w, c);
    std::uniform_int_distribution<int> dist(0, 255);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(dist(rng));
    return img;
}

// Random image built from constant blocks, so flat regions actually occur.
inline knnup::Image random_blocky_image(std::mt19937& rng, int h, int w, int c, int block = 4) {
    knnup::Image img(h, w, c);
    std::uniform_int_distribution<int> dist(0, 255);
    for (int r0 = 0; r0 < h; r0 += block) {
        for (int c0 = 0; c0 < w; c0 += block) {
            std::uint8_t vals[3] = {static_cast<std::uint8_t>(dist(rng)),
                                    static_cast<std::uint8_t>(dist(rng)),
                                    static_cast<std::uint8_t>(dist(rng))};
            for (int r = r0; r < std::min(r0 + block, h); ++r) {
                for (int cc = c0; cc < std::min(c0 + block, w); ++cc) {
                    for (int ch = 0; ch < c; ++ch) img.at(r, cc, ch) = vals[ch];
                }
            }
        }
    }
    return img;
}

// Reference KNN upsampler: scans every original pixel per output pixel and
// tests window membership directly from the definition. Deliberately shares
// no code with the shipped paths.
inline knnup::Image oracle_upsample_knn(const knnup::Image& img,
                                        const knnup::UpsampleConfig& cfg) {
    const int out_h = img.height * cfg.f_y;
    const int out_w = img.width * cfg.f_x;
    const bool lock_r = cfg.axis_aware && cfg.f_y == 1 && cfg.f_x != 1;
    const bool lock_c = cfg.axis_aware && cfg.f_x == 1 && cfg.f_y != 1;
    knnup::Image out(out_h, out_w, img.channels);
    for (int i = 0; i < out_h; ++i) {
        for (int j = 0; j < out_w; ++j) {
            if (i % cfg.f_y == 0 && j % cfg.f_x == 0) {
                for (int ch = 0; ch < img.channels; ++ch) {
                    out.at(i, j, ch) = img.at(i / cfg.f_y, j / cfg.f_x, ch);
                }
                continue;
            }
            unsigned long long sum[3] = {0, 0, 0};
            unsigned long long count = 0;
            for (int r = 0; r < img.height; ++r) {
                if (std::abs(r * cfg.f_y - i) > cfg.k) continue;
                if (lock_r && r != i) continue;
                for (int c = 0; c < img.width; ++c) {
                    if (std::abs(c * cfg.f_x - j) > cfg.k) continue;
                    if (lock_c && c != j) continue;
                    for (int ch = 0; ch < img.channels; ++ch) sum[ch] += img.at(r, c, ch);
                    ++count;
                }
            }
            for (int ch = 0; ch < img.channels; ++ch) {
                out.at(i, j, ch) = static_cast<std::uint8_t>((sum[ch] + count / 2) / count);
            }
        }
    }
    return out;
}

// Reference SSIM: per-window single-pass moments via the E[x^2] - mu^2 route,
// a different algebraic path from the shipped two-pass implementation.
inline double oracle_ssim(const knnup::NormalizedImage& a, const knnup::NormalizedImage& b,
                          int win = 7) {
    const double c1 = 0.01 * 0.01;
    const double c2 = 0.03 * 0.03;
    const int n = win * win;
    double total = 0.0;
    long long count = 0;
    for (int ch = 0; ch < a.channels; ++ch) {
        for (int wy = 0; wy + win <= a.height; ++wy) {
            for (int wx = 0; wx + win <= a.width; ++wx) {
                double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
                for (int r = wy; r < wy + win; ++r) {
                    for (int c = wx; c < wx + win; ++c) {
                        double av = a.at(r, c, ch);
                        double bv = b.at(r, c, ch);
                        sa += av;
                        sb += bv;
                        saa += av * av;
                        sbb += bv * bv;
                        sab += av * bv;
                    }
                }
                double mu_a = sa / n;
                double mu_b = sb / n;
                double var_a = (saa - n * mu_a * mu_a) / (n - 1);
                double var_b = (sbb - n * mu_b * mu_b) / (n - 1);
                double cov = (sab - n * mu_a * mu_b) / (n - 1);
                total += ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) /
                         ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
                ++count;
            }
        }
    }
    return total / static_cast<double>(count);
}

// FNV-1a digest used by the determinism checks.
class Digest {
public:
    void add_bytes(const std::uint8_t* p, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            hash_ ^= p[i];
            hash_ *= 0x100000001b3ull;
        }
    }

    void add(const knnup::Image& img) {
        add_bytes(img.data.data(), img.data.size());
    }

    void add(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        for (int s = 0; s < 64; s += 8) {
            std::uint8_t byte = static_cast<std::uint8_t>(bits >> s);
            add_bytes(&byte, 1);
        }
    }

    std::uint64_t value() const { return hash_; }

private:
    std::uint64_t hash_ = 0xcbf29ce484222325ull;
};

} // namespace testutil
