#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <knnup/errors.hpp>
#include <knnup/image.hpp>
#include <knnup/parallel.hpp>

namespace knnup {

namespace detail {

// Neumaier compensated summation; keeps accumulated error below 1e-12 for the
// image sizes handled here, independent of traversal order.
class NeumaierSum {
public:
    void add(double v) {
        double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline void require_same_shape(const NormalizedImage& a, const NormalizedImage& b) {
    if (!a.same_shape(b)) {
        throw ConfigError("metric inputs differ in shape: " + std::to_string(a.height) + "x" +
                          std::to_string(a.width) + "x" + std::to_string(a.channels) + " vs " +
                          std::to_string(b.height) + "x" + std::to_string(b.width) + "x" +
                          std::to_string(b.channels));
    }
}

} // namespace detail

/// Mean squared difference over all samples, on the [0,1] scale.
inline double mse(const NormalizedImage& a, const NormalizedImage& b) {
    detail::require_same_shape(a, b);
    detail::NeumaierSum sum;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        double d = a.data[i] - b.data[i];
        sum.add(d * d);
    }
    return sum.value() / static_cast<double>(a.data.size());
}

inline double rmse(const NormalizedImage& a, const NormalizedImage& b) {
    return std::sqrt(mse(a, b));
}

/// Mean absolute difference over all samples, on the [0,1] scale.
inline double mae(const NormalizedImage& a, const NormalizedImage& b) {
    detail::require_same_shape(a, b);
    detail::NeumaierSum sum;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        sum.add(std::abs(a.data[i] - b.data[i]));
    }
    return sum.value() / static_cast<double>(a.data.size());
}

/// Two PSNR conventions are reported side by side.
///
/// standard:  20*log10(1/rmse), peak and rmse both on the [0,1] scale.
/// paper:     20*log10(255/rmse) with rmse still on the [0,1] scale — a mixed
///            convention sitting exactly 20*log10(255) ~ 48.13 dB above the
///            standard value. Do not compare paper-convention numbers against
///            external literature.
enum class PsnrConvention { standard, paper };

inline double psnr_from_rmse(double rmse_value, PsnrConvention convention) {
    double peak = convention == PsnrConvention::paper ? 255.0 : 1.0;
    return 20.0 * std::log10(peak / rmse_value);
}

/// Absent (infinite) when the images are identical.
inline std::optional<double> psnr(const NormalizedImage& a, const NormalizedImage& b,
                                  PsnrConvention convention) {
    double r = rmse(a, b);
    if (r == 0.0) return std::nullopt;
    return psnr_from_rmse(r, convention);
}

/// SSIM parameters: uniform sliding window with N-1 normalization for the
/// (co)variances, constants on the normalized scale.
struct SsimConfig {
    int window = 7;
    double k1 = 0.01;
    double k2 = 0.03;
    double luminance_range = 1.0;
};

/// Mean SSIM over every fully-interior window position and channel.
inline double ssim(const NormalizedImage& a, const NormalizedImage& b,
                   const SsimConfig& cfg = {}, int threads = 1) {
    detail::require_same_shape(a, b);
    const int win = cfg.window;
    if (win < 2) throw ConfigError("SSIM window must be >= 2");
    if (a.height < win || a.width < win) {
        throw ConfigError("image " + std::to_string(a.height) + "x" + std::to_string(a.width) +
                          " is smaller than the " + std::to_string(win) + "x" +
                          std::to_string(win) + " SSIM window");
    }
    const double c1 = (cfg.k1 * cfg.luminance_range) * (cfg.k1 * cfg.luminance_range);
    const double c2 = (cfg.k2 * cfg.luminance_range) * (cfg.k2 * cfg.luminance_range);
    const int rows = a.height - win + 1;
    const int cols = a.width - win + 1;
    const int n = win * win;

    // One partial sum per window row, reduced in fixed order afterwards, so
    // the result is bit-identical at any thread count.
    std::vector<double> row_totals(static_cast<std::size_t>(rows), 0.0);
    detail::parallel_rows(rows, threads, [&](int wy) {
        detail::NeumaierSum row_sum;
        for (int ch = 0; ch < a.channels; ++ch) {
            for (int wx = 0; wx < cols; ++wx) {
                double sum_a = 0.0, sum_b = 0.0;
                for (int r = wy; r < wy + win; ++r) {
                    for (int c = wx; c < wx + win; ++c) {
                        sum_a += a.at(r, c, ch);
                        sum_b += b.at(r, c, ch);
                    }
                }
                const double mu_a = sum_a / n;
                const double mu_b = sum_b / n;
                double var_a = 0.0, var_b = 0.0, cov = 0.0;
                for (int r = wy; r < wy + win; ++r) {
                    for (int c = wx; c < wx + win; ++c) {
                        double da = a.at(r, c, ch) - mu_a;
                        double db = b.at(r, c, ch) - mu_b;
                        var_a += da * da;
                        var_b += db * db;
                        cov += da * db;
                    }
                }
                var_a /= n - 1;
                var_b /= n - 1;
                cov /= n - 1;
                row_sum.add(((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
                            ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)));
            }
        }
        row_totals[static_cast<std::size_t>(wy)] = row_sum.value();
    });

    detail::NeumaierSum total;
    for (double v : row_totals) total.add(v);
    return total.value() /
           (static_cast<double>(rows) * static_cast<double>(cols) * a.channels);
}

/// All similarity metrics between two same-shape images. PSNR is absent for
/// identical images (infinite); SSIM is absent when the image is smaller than
/// the SSIM window.
struct MetricsReport {
    double mse = 0.0;
    double rmse = 0.0;
    double mae = 0.0;
    std::optional<double> psnr_paper;
    std::optional<double> psnr_std;
    std::optional<double> ssim;

    bool operator==(const MetricsReport&) const = default;
};

inline MetricsReport evaluate(const Image& a, const Image& b, int threads = 1) {
    if (!a.same_shape(b)) {
        throw ConfigError("evaluate inputs differ in shape: " + std::to_string(a.height) + "x" +
                          std::to_string(a.width) + "x" + std::to_string(a.channels) + " vs " +
                          std::to_string(b.height) + "x" + std::to_string(b.width) + "x" +
                          std::to_string(b.channels));
    }
    const NormalizedImage na = normalize(a);
    const NormalizedImage nb = normalize(b);
    MetricsReport report;
    report.mse = mse(na, nb);
    report.rmse = std::sqrt(report.mse);
    report.mae = mae(na, nb);
    if (report.rmse > 0.0) {
        report.psnr_paper = psnr_from_rmse(report.rmse, PsnrConvention::paper);
        report.psnr_std = psnr_from_rmse(report.rmse, PsnrConvention::standard);
    }
    SsimConfig scfg;
    if (a.height >= scfg.window && a.width >= scfg.window) {
        report.ssim = ssim(na, nb, scfg, threads);
    }
    return report;
}

} // namespace knnup
