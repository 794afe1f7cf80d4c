#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include <knnup/bilinear.hpp>
#include <knnup/cifar.hpp>
#include <knnup/downsample.hpp>
#include <knnup/errors.hpp>
#include <knnup/image_io.hpp>
#include <knnup/metrics.hpp>
#include <knnup/selective.hpp>
#include <knnup/upsample.hpp>

namespace knnup {

enum class Method { knn, knn_fast, selective, bilinear };

inline const char* method_name(Method m) {
    switch (m) {
    case Method::knn: return "knn";
    case Method::knn_fast: return "knn-fast";
    case Method::selective: return "selective";
    case Method::bilinear: return "bilinear";
    }
    return "?";
}

inline std::optional<Method> method_from_name(std::string_view name) {
    if (name == "knn") return Method::knn;
    if (name == "knn-fast") return Method::knn_fast;
    if (name == "selective") return Method::selective;
    if (name == "bilinear") return Method::bilinear;
    return std::nullopt;
}

enum class Downsampler { decimate, box };

/// One full benchmark request: corpus, factor pairs, methods, and knobs.
struct PipelineSpec {
    std::vector<std::string> corpus;     // image file paths
    std::string cifar_batch;             // alternative corpus: CIFAR-10 binary batch
    std::size_t limit = 0;               // cap on corpus images, 0 = no cap
    std::vector<std::pair<int, int>> factors{{2, 2}, {4, 4}, {5, 5}, {10, 10}};
    std::vector<Method> methods{Method::knn, Method::bilinear};
    int k = 0;                           // neighborhood radius, 0 = auto (max factor)
    SelectiveConfig selective;
    bool axis_aware = false;
    Downsampler downsampler = Downsampler::decimate;
    int repeats = 5;                     // timing repetitions per cell
    int threads = 1;
};

/// One (image, factor pair, method) pipeline result. Metrics compare the
/// reconstruction against the original; wall_ms is the median over `repeats`
/// runs of the upsample call alone.
struct BenchRow {
    std::string image_id;
    int f_y = 1;
    int f_x = 1;
    Method method = Method::knn;
    MetricsReport metrics;
    double wall_ms = 0.0;
    std::optional<double> selectivity; // selective method only
    bool cropped = false;              // comparison used the top-left overlap; not serialized

    bool operator==(const BenchRow& o) const {
        return image_id == o.image_id && f_y == o.f_y && f_x == o.f_x && method == o.method &&
               metrics == o.metrics && wall_ms == o.wall_ms && selectivity == o.selectivity;
    }
};

enum class ReportFormat { csv, json };

inline constexpr const char* kReportHeader =
    "image_id,f_y,f_x,method,mse,rmse,mae,psnr_paper,psnr_std,ssim,wall_ms,selectivity";

namespace detail {

inline std::string format_double(double v) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

inline double parse_double(std::string_view s, const char* field) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw IoError(std::string("report: bad ") + field + " value '" + std::string(s) + "'");
    }
    return v;
}

inline int parse_int(std::string_view s, const char* field) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw IoError(std::string("report: bad ") + field + " value '" + std::string(s) + "'");
    }
    return v;
}

inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline Image crop_top_left(const Image& img, int h, int w) {
    Image out(h, w, img.channels);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            for (int ch = 0; ch < img.channels; ++ch) {
                out.at(r, c, ch) = img.at(r, c, ch);
            }
        }
    }
    return out;
}

inline void sort_rows(std::vector<BenchRow>& rows) {
    std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
        return std::make_tuple(a.image_id, a.f_y, a.f_x, std::string_view(method_name(a.method))) <
               std::make_tuple(b.image_id, b.f_y, b.f_x, std::string_view(method_name(b.method)));
    });
}

inline std::string sanitize_id(std::string id) {
    for (char& c : id) {
        if (c == ',' || c == '\n' || c == '\r') c = '_';
    }
    return id;
}

} // namespace detail

using PipelineLogger = std::function<void(const std::string&)>;

inline void default_pipeline_logger(const std::string& msg) { std::cerr << msg << "\n"; }

/// Downsample -> upsample -> compare, for every (image, factor pair, method)
/// combination. Images whose dimensions are not divisible by a factor are
/// downsampled with ceil semantics and the reconstruction is compared on the
/// top-left overlap (flagged on the row). Unreadable corpus entries are
/// skipped with a logged reason. Metric fields are deterministic across runs
/// and thread counts; timings of course are not.
inline std::vector<BenchRow> run_pipeline(const PipelineSpec& spec,
                                          const PipelineLogger& log = default_pipeline_logger) {
    if (spec.corpus.empty() && spec.cifar_batch.empty()) {
        throw ConfigError("pipeline corpus is empty");
    }
    if (spec.methods.empty()) throw ConfigError("pipeline has no methods");
    if (spec.factors.empty()) throw ConfigError("pipeline has no factors");
    if (spec.repeats < 1) {
        throw ConfigError("repeats must be >= 1, got " + std::to_string(spec.repeats));
    }
    validate_config(spec.selective);
    for (auto [f_y, f_x] : spec.factors) {
        UpsampleConfig ucfg{f_y, f_x, spec.k > 0 ? spec.k : auto_radius(f_y, f_x),
                            spec.axis_aware};
        bool needs_k = std::any_of(spec.methods.begin(), spec.methods.end(),
                                   [](Method m) { return m != Method::bilinear; });
        if (needs_k) {
            validate_config(ucfg);
        } else if (f_y < 1 || f_x < 1) {
            throw ConfigError("factors must be >= 1");
        }
    }

    std::vector<std::pair<std::string, Image>> corpus;
    if (!spec.cifar_batch.empty()) {
        std::vector<Image> batch = load_cifar10_batch(
            spec.cifar_batch, spec.limit ? spec.limit : std::numeric_limits<std::size_t>::max());
        for (std::size_t i = 0; i < batch.size(); ++i) {
            char id[32];
            std::snprintf(id, sizeof id, "cifar-%05zu", i);
            corpus.emplace_back(id, std::move(batch[i]));
        }
    }
    for (const std::string& path : spec.corpus) {
        if (spec.limit && corpus.size() >= spec.limit) break;
        try {
            Image img = load_image(path);
            std::string id =
                detail::sanitize_id(std::filesystem::path(path).stem().string());
            corpus.emplace_back(std::move(id), std::move(img));
        } catch (const IoError& e) {
            log("skipping corpus entry " + path + ": " + e.what());
        }
    }

    std::vector<BenchRow> rows;
    rows.reserve(corpus.size() * spec.factors.size() * spec.methods.size());
    for (const auto& [id, original] : corpus) {
        for (auto [f_y, f_x] : spec.factors) {
            const Image down = spec.downsampler == Downsampler::decimate
                                   ? downsample_decimate(original, f_y, f_x)
                                   : downsample_box(original, f_y, f_x);
            const UpsampleConfig ucfg{f_y, f_x, spec.k > 0 ? spec.k : auto_radius(f_y, f_x),
                                      spec.axis_aware};
            for (Method method : spec.methods) {
                BenchRow row;
                row.image_id = id;
                row.f_y = f_y;
                row.f_x = f_x;
                row.method = method;

                Image up;
                std::vector<double> times;
                times.reserve(static_cast<std::size_t>(spec.repeats));
                for (int rep = 0; rep < spec.repeats; ++rep) {
                    auto t0 = std::chrono::steady_clock::now();
                    switch (method) {
                    case Method::knn:
                        up = upsample_knn(down, ucfg, spec.threads);
                        break;
                    case Method::knn_fast:
                        up = upsample_knn_fast(down, ucfg, spec.threads);
                        break;
                    case Method::selective: {
                        auto [img_out, stats] =
                            upsample_selective(down, ucfg, spec.selective, spec.threads);
                        up = std::move(img_out);
                        row.selectivity = stats.selectivity;
                        break;
                    }
                    case Method::bilinear:
                        up = upsample_bilinear(down, down.height * f_y, down.width * f_x,
                                               spec.threads);
                        break;
                    }
                    auto t1 = std::chrono::steady_clock::now();
                    times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
                }
                row.wall_ms = detail::median(std::move(times));

                row.cropped = up.height != original.height || up.width != original.width;
                if (row.cropped) {
                    up = detail::crop_top_left(up, original.height, original.width);
                    log("image " + id + " factor " + std::to_string(f_y) + "x" +
                        std::to_string(f_x) + ": ragged dimensions, compared on top-left overlap");
                }
                row.metrics = evaluate(original, up, spec.threads);
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

namespace detail {

inline std::string csv_cell(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

} // namespace detail

/// Serialize rows, sorted by (image_id, f_y, f_x, method). Absent values
/// (infinite PSNR, SSIM on sub-window images, selectivity of non-selective
/// methods) become empty CSV cells / JSON nulls.
inline void emit_report(std::vector<BenchRow> rows, ReportFormat format, std::ostream& out) {
    detail::sort_rows(rows);
    if (format == ReportFormat::csv) {
        out << kReportHeader << "\n";
        for (const BenchRow& r : rows) {
            out << r.image_id << ',' << r.f_y << ',' << r.f_x << ',' << method_name(r.method)
                << ',' << detail::format_double(r.metrics.mse) << ','
                << detail::format_double(r.metrics.rmse) << ','
                << detail::format_double(r.metrics.mae) << ','
                << detail::csv_cell(r.metrics.psnr_paper) << ','
                << detail::csv_cell(r.metrics.psnr_std) << ','
                << detail::csv_cell(r.metrics.ssim) << ',' << detail::format_double(r.wall_ms)
                << ',' << detail::csv_cell(r.selectivity) << "\n";
        }
    } else {
        nlohmann::ordered_json doc = nlohmann::ordered_json::array();
        for (const BenchRow& r : rows) {
            nlohmann::ordered_json obj;
            obj["image_id"] = r.image_id;
            obj["f_y"] = r.f_y;
            obj["f_x"] = r.f_x;
            obj["method"] = method_name(r.method);
            obj["mse"] = r.metrics.mse;
            obj["rmse"] = r.metrics.rmse;
            obj["mae"] = r.metrics.mae;
            obj["psnr_paper"] = r.metrics.psnr_paper ? nlohmann::ordered_json(*r.metrics.psnr_paper)
                                                     : nlohmann::ordered_json(nullptr);
            obj["psnr_std"] = r.metrics.psnr_std ? nlohmann::ordered_json(*r.metrics.psnr_std)
                                                 : nlohmann::ordered_json(nullptr);
            obj["ssim"] = r.metrics.ssim ? nlohmann::ordered_json(*r.metrics.ssim)
                                         : nlohmann::ordered_json(nullptr);
            obj["wall_ms"] = r.wall_ms;
            obj["selectivity"] = r.selectivity ? nlohmann::ordered_json(*r.selectivity)
                                               : nlohmann::ordered_json(nullptr);
            doc.push_back(std::move(obj));
        }
        out << doc.dump(2) << "\n";
    }
    if (!out) throw IoError("report write failed");
}

inline void emit_report(const std::vector<BenchRow>& rows, ReportFormat format,
                        const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open report for writing: " + path);
    emit_report(rows, format, out);
}

inline std::vector<BenchRow> parse_report_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("report: JSON parse error: ") + e.what());
    }
    if (!doc.is_array()) throw IoError("report: expected a JSON array");
    std::vector<BenchRow> rows;
    rows.reserve(doc.size());
    for (const auto& obj : doc) {
        BenchRow r;
        r.image_id = obj.at("image_id").get<std::string>();
        r.f_y = obj.at("f_y").get<int>();
        r.f_x = obj.at("f_x").get<int>();
        auto m = method_from_name(obj.at("method").get<std::string>());
        if (!m) throw IoError("report: unknown method " + obj.at("method").dump());
        r.method = *m;
        r.metrics.mse = obj.at("mse").get<double>();
        r.metrics.rmse = obj.at("rmse").get<double>();
        r.metrics.mae = obj.at("mae").get<double>();
        auto opt = [&](const char* key) -> std::optional<double> {
            const auto& v = obj.at(key);
            if (v.is_null()) return std::nullopt;
            return v.get<double>();
        };
        r.metrics.psnr_paper = opt("psnr_paper");
        r.metrics.psnr_std = opt("psnr_std");
        r.metrics.ssim = opt("ssim");
        r.wall_ms = obj.at("wall_ms").get<double>();
        r.selectivity = opt("selectivity");
        rows.push_back(std::move(r));
    }
    return rows;
}

inline std::vector<BenchRow> parse_report_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw IoError("report: empty CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kReportHeader) throw IoError("report: unexpected CSV header '" + line + "'");

    std::vector<BenchRow> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            std::size_t comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (cells.size() != 12) {
            throw IoError("report: expected 12 CSV cells, got " + std::to_string(cells.size()));
        }
        BenchRow r;
        r.image_id = cells[0];
        r.f_y = detail::parse_int(cells[1], "f_y");
        r.f_x = detail::parse_int(cells[2], "f_x");
        auto m = method_from_name(cells[3]);
        if (!m) throw IoError("report: unknown method '" + cells[3] + "'");
        r.method = *m;
        r.metrics.mse = detail::parse_double(cells[4], "mse");
        r.metrics.rmse = detail::parse_double(cells[5], "rmse");
        r.metrics.mae = detail::parse_double(cells[6], "mae");
        auto opt = [&](const std::string& s, const char* field) -> std::optional<double> {
            if (s.empty()) return std::nullopt;
            return detail::parse_double(s, field);
        };
        r.metrics.psnr_paper = opt(cells[7], "psnr_paper");
        r.metrics.psnr_std = opt(cells[8], "psnr_std");
        r.metrics.ssim = opt(cells[9], "ssim");
        r.wall_ms = detail::parse_double(cells[10], "wall_ms");
        r.selectivity = opt(cells[11], "selectivity");
        rows.push_back(std::move(r));
    }
    return rows;
}

inline constexpr std::array<const char*, 6> kComparedMetrics = {
    "mse", "rmse", "mae", "psnr_paper", "psnr_std", "ssim"};

/// Relative metric differences |other - base| / |base| for one
/// (image, factor pair, method pair) key. Absent when a metric is absent on
/// either side, or when base is zero while other is not.
struct ComparisonEntry {
    std::string image_id;
    int f_y = 1;
    int f_x = 1;
    Method base = Method::knn;
    Method other = Method::knn;
    std::array<std::optional<double>, 6> rel;
};

struct AggregateStat {
    double min = 0.0;
    double median = 0.0;
    double max = 0.0;
    std::size_t count = 0;
};

struct PairAggregate {
    Method base = Method::knn;
    Method other = Method::knn;
    std::array<std::optional<AggregateStat>, 6> metrics;
};

struct ComparisonSummary {
    std::vector<ComparisonEntry> entries;
    std::vector<PairAggregate> pairs;
};

/// Per-(image, factor) relative differences between every method pair, plus
/// min/median/max aggregates across the corpus. Every (image, factor) key
/// must carry a row for every method present anywhere in the input.
inline ComparisonSummary compare_methods(const std::vector<BenchRow>& rows) {
    using Key = std::tuple<std::string, int, int>;
    std::map<Key, std::map<std::string, const BenchRow*>> groups;
    std::map<std::string, Method> methods; // keyed by name for canonical order
    for (const BenchRow& r : rows) {
        groups[{r.image_id, r.f_y, r.f_x}][method_name(r.method)] = &r;
        methods.emplace(method_name(r.method), r.method);
    }
    if (methods.size() < 2) {
        throw ConfigError("compare_methods needs rows from at least two methods");
    }
    for (const auto& [key, group] : groups) {
        for (const auto& [name, method] : methods) {
            if (!group.count(name)) {
                throw ConfigError("missing counterpart row: image " + std::get<0>(key) +
                                  " factor " + std::to_string(std::get<1>(key)) + "x" +
                                  std::to_string(std::get<2>(key)) + " method " + name);
            }
        }
    }

    auto metric_value = [](const BenchRow& r, std::size_t idx) -> std::optional<double> {
        switch (idx) {
        case 0: return r.metrics.mse;
        case 1: return r.metrics.rmse;
        case 2: return r.metrics.mae;
        case 3: return r.metrics.psnr_paper;
        case 4: return r.metrics.psnr_std;
        default: return r.metrics.ssim;
        }
    };

    ComparisonSummary summary;
    std::map<std::pair<std::string, std::string>, std::array<std::vector<double>, 6>> collected;
    for (const auto& [key, group] : groups) {
        for (auto a = methods.begin(); a != methods.end(); ++a) {
            for (auto b = std::next(a); b != methods.end(); ++b) {
                ComparisonEntry entry;
                entry.image_id = std::get<0>(key);
                entry.f_y = std::get<1>(key);
                entry.f_x = std::get<2>(key);
                entry.base = a->second;
                entry.other = b->second;
                const BenchRow& rb = *group.at(a->first);
                const BenchRow& ro = *group.at(b->first);
                for (std::size_t i = 0; i < kComparedMetrics.size(); ++i) {
                    std::optional<double> vb = metric_value(rb, i);
                    std::optional<double> vo = metric_value(ro, i);
                    if (!vb || !vo) continue;
                    std::optional<double> rel;
                    if (*vb == 0.0) {
                        if (*vo == 0.0) rel = 0.0;
                    } else {
                        rel = std::abs(*vo - *vb) / std::abs(*vb);
                    }
                    entry.rel[i] = rel;
                    if (rel) collected[{a->first, b->first}][i].push_back(*rel);
                }
                summary.entries.push_back(std::move(entry));
            }
        }
    }

    for (auto a = methods.begin(); a != methods.end(); ++a) {
        for (auto b = std::next(a); b != methods.end(); ++b) {
            PairAggregate agg;
            agg.base = a->second;
            agg.other = b->second;
            auto it = collected.find({a->first, b->first});
            if (it != collected.end()) {
                for (std::size_t i = 0; i < kComparedMetrics.size(); ++i) {
                    std::vector<double>& vals = it->second[i];
                    if (vals.empty()) continue;
                    AggregateStat stat;
                    stat.count = vals.size();
                    stat.min = *std::min_element(vals.begin(), vals.end());
                    stat.max = *std::max_element(vals.begin(), vals.end());
                    stat.median = detail::median(vals);
                    agg.metrics[i] = stat;
                }
            }
            summary.pairs.push_back(std::move(agg));
        }
    }
    return summary;
}

/// Plain-text rendering of the aggregate table, one line per method pair and
/// metric.
inline std::string format_comparison(const ComparisonSummary& summary) {
    std::ostringstream out;
    for (const PairAggregate& pair : summary.pairs) {
        out << method_name(pair.base) << " vs " << method_name(pair.other) << "\n";
        for (std::size_t i = 0; i < kComparedMetrics.size(); ++i) {
            out << "  " << kComparedMetrics[i] << ": ";
            if (pair.metrics[i]) {
                const AggregateStat& s = *pair.metrics[i];
                out << "rel diff min " << detail::format_double(s.min) << "  median "
                    << detail::format_double(s.median) << "  max " << detail::format_double(s.max)
                    << "  (n=" << s.count << ")";
            } else {
                out << "n/a";
            }
            out << "\n";
        }
    }
    return out.str();
}

} // namespace knnup
