// Command-line surface for the upsampling toolkit: single-image conversions,
// metric evaluation, and the corpus benchmark pipeline.

#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <knnup/knnup.hpp>

namespace {

using knnup::ConfigError;

int parse_radius(const std::string& k_arg, int f_y, int f_x) {
    if (k_arg == "auto") return knnup::auto_radius(f_y, f_x);
    try {
        std::size_t idx = 0;
        int k = std::stoi(k_arg, &idx);
        if (idx != k_arg.size()) throw std::invalid_argument(k_arg);
        return k;
    } catch (const std::exception&) {
        throw ConfigError("--k expects an integer or 'auto', got '" + k_arg + "'");
    }
}

std::vector<std::pair<int, int>> parse_factors(const std::string& arg) {
    std::vector<std::pair<int, int>> out;
    std::size_t start = 0;
    while (start <= arg.size()) {
        std::size_t comma = arg.find(',', start);
        std::string item = arg.substr(start, comma - start);
        if (item.empty()) throw ConfigError("empty entry in --factors list '" + arg + "'");
        try {
            std::size_t sep = item.find('x');
            if (sep == std::string::npos) {
                int f = std::stoi(item);
                out.emplace_back(f, f);
            } else {
                // FYxFX pairs opt in to dynamic aspect ratios.
                int f_y = std::stoi(item.substr(0, sep));
                int f_x = std::stoi(item.substr(sep + 1));
                out.emplace_back(f_y, f_x);
            }
        } catch (const std::exception&) {
            throw ConfigError("bad factor entry '" + item + "' (use N or FYxFX)");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw ConfigError("--factors list is empty");
    return out;
}

std::vector<knnup::Method> parse_methods(const std::string& arg) {
    std::vector<knnup::Method> out;
    std::size_t start = 0;
    while (start <= arg.size()) {
        std::size_t comma = arg.find(',', start);
        std::string item = arg.substr(start, comma - start);
        auto m = knnup::method_from_name(item);
        if (!m) {
            throw ConfigError("unknown method '" + item +
                              "' (expected knn, knn-fast, selective, or bilinear)");
        }
        out.push_back(*m);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw ConfigError("--methods list is empty");
    return out;
}

std::vector<std::string> scan_corpus_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw knnup::IoError("corpus directory not found: " + dir);
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (ext == ".ppm" || ext == ".png") paths.push_back(entry.path().string());
    }
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) throw knnup::IoError("no .ppm or .png images in " + dir);
    return paths;
}

void write_metrics(const knnup::MetricsReport& report, const std::string& format,
                   std::ostream& out) {
    if (format == "csv") {
        auto cell = [](const std::optional<double>& v) {
            return v ? knnup::detail::format_double(*v) : std::string();
        };
        out << "mse,rmse,mae,psnr_paper,psnr_std,ssim\n"
            << knnup::detail::format_double(report.mse) << ','
            << knnup::detail::format_double(report.rmse) << ','
            << knnup::detail::format_double(report.mae) << ',' << cell(report.psnr_paper) << ','
            << cell(report.psnr_std) << ',' << cell(report.ssim) << "\n";
    } else {
        nlohmann::ordered_json obj;
        obj["mse"] = report.mse;
        obj["rmse"] = report.rmse;
        obj["mae"] = report.mae;
        obj["psnr_paper"] = report.psnr_paper ? nlohmann::ordered_json(*report.psnr_paper)
                                              : nlohmann::ordered_json(nullptr);
        obj["psnr_std"] = report.psnr_std ? nlohmann::ordered_json(*report.psnr_std)
                                          : nlohmann::ordered_json(nullptr);
        obj["ssim"] = report.ssim ? nlohmann::ordered_json(*report.ssim)
                                  : nlohmann::ordered_json(nullptr);
        out << obj.dump(2) << "\n";
    }
}

struct UpsampleArgs {
    std::string input, output;
    int factor = 0, factor_y = 0, factor_x = 0;
    std::string k = "auto";
    std::string method = "knn";
    int grad_thresh = 1;
    int min_region = 0;
    bool axis_aware = false;
};

int run_upsample(const UpsampleArgs& args) {
    int f_y, f_x;
    if (args.factor > 0) {
        if (args.factor_y > 0 || args.factor_x > 0) {
            throw ConfigError("--factor and --factor-y/--factor-x are mutually exclusive");
        }
        f_y = f_x = args.factor;
    } else if (args.factor_y > 0 && args.factor_x > 0) {
        f_y = args.factor_y;
        f_x = args.factor_x;
    } else {
        throw ConfigError("specify --factor N or both --factor-y N and --factor-x N");
    }

    auto method = knnup::method_from_name(args.method);
    if (!method) throw ConfigError("unknown method '" + args.method + "'");

    knnup::Image in = knnup::load_image(args.input);
    knnup::UpsampleConfig ucfg{f_y, f_x, parse_radius(args.k, f_y, f_x), args.axis_aware};
    knnup::Image out;
    switch (*method) {
    case knnup::Method::knn:
        out = knnup::upsample_knn(in, ucfg);
        break;
    case knnup::Method::knn_fast:
        out = knnup::upsample_knn_fast(in, ucfg);
        break;
    case knnup::Method::selective: {
        knnup::SelectiveConfig scfg{args.grad_thresh, args.min_region, 4};
        auto [img, stats] = knnup::upsample_selective(in, ucfg, scfg);
        out = std::move(img);
        std::cout << "selectivity=" << knnup::detail::format_double(stats.selectivity)
                  << " copied=" << stats.copied_pixels
                  << " interpolated=" << stats.interpolated_pixels
                  << " wall_ms=" << knnup::detail::format_double(stats.wall_ms) << "\n";
        break;
    }
    case knnup::Method::bilinear: {
        long long out_h = static_cast<long long>(in.height) * f_y;
        long long out_w = static_cast<long long>(in.width) * f_x;
        if (out_h > std::numeric_limits<int>::max() || out_w > std::numeric_limits<int>::max()) {
            throw ConfigError("output dimensions overflow");
        }
        out = knnup::upsample_bilinear(in, static_cast<int>(out_h), static_cast<int>(out_w));
        break;
    }
    }
    knnup::save_image(out, args.output);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Classical KNN-interpolation image upsampling toolkit"};
    app.require_subcommand(1);

    UpsampleArgs up;
    CLI::App* cmd_up = app.add_subcommand("upsample", "Upsample one image");
    cmd_up->add_option("--input", up.input, "Input image (.ppm or .png)")->required();
    cmd_up->add_option("--output", up.output, "Output image (.ppm or .png)")->required();
    cmd_up->add_option("--factor", up.factor, "Factor for both dimensions");
    cmd_up->add_option("--factor-y", up.factor_y, "Vertical factor");
    cmd_up->add_option("--factor-x", up.factor_x, "Horizontal factor");
    cmd_up->add_option("--k", up.k, "Neighborhood radius, integer or 'auto' (= max factor)");
    cmd_up->add_option("--method", up.method, "knn, knn-fast, selective, or bilinear");
    cmd_up->add_option("--grad-thresh", up.grad_thresh,
                       "Selective: gradient threshold on the 0-255 scale");
    cmd_up->add_option("--min-region", up.min_region,
                       "Selective: drop flat regions smaller than this many pixels");
    cmd_up->add_flag("--axis-aware", up.axis_aware,
                     "Restrict interpolation to the changing dimension when one factor is 1");

    std::string down_input, down_output, down_method = "decimate";
    int down_factor = 0;
    CLI::App* cmd_down = app.add_subcommand("downsample", "Downsample one image");
    cmd_down->add_option("--input", down_input, "Input image")->required();
    cmd_down->add_option("--output", down_output, "Output image")->required();
    cmd_down->add_option("--factor", down_factor, "Factor for both dimensions")->required();
    cmd_down->add_option("--method", down_method, "decimate or box");

    std::string eval_reference, eval_test, eval_format = "json", eval_out;
    CLI::App* cmd_eval = app.add_subcommand("evaluate", "Compare two images");
    cmd_eval->add_option("--reference", eval_reference, "Reference image")->required();
    cmd_eval->add_option("--test", eval_test, "Image to compare against the reference")
        ->required();
    cmd_eval->add_option("--format", eval_format, "json or csv");
    cmd_eval->add_option("--out", eval_out, "Output path (default: stdout)");

    std::string bench_corpus, bench_cifar, bench_factors = "2,4,5,10",
                bench_methods = "knn,bilinear", bench_report, bench_format = "csv",
                bench_k = "auto", bench_downsampler = "decimate";
    std::size_t bench_limit = 0;
    int bench_repeats = 5, bench_grad_thresh = 1, bench_min_region = 0;
    bool bench_axis_aware = false;
    CLI::App* cmd_bench = app.add_subcommand(
        "bench", "Downsample/upsample/evaluate a corpus and emit a report");
    cmd_bench->add_option("--corpus", bench_corpus, "Directory of .ppm/.png images");
    cmd_bench->add_option("--cifar", bench_cifar, "CIFAR-10 binary batch file");
    cmd_bench->add_option("--limit", bench_limit, "Cap on corpus images (0 = all)");
    cmd_bench->add_option("--factors", bench_factors,
                          "Comma list of factors; N or FYxFX per entry");
    cmd_bench->add_option("--methods", bench_methods, "Comma list of methods");
    cmd_bench->add_option("--repeats", bench_repeats, "Timing repetitions per cell");
    cmd_bench->add_option("--report", bench_report, "Report output path")->required();
    cmd_bench->add_option("--format", bench_format, "csv or json");
    cmd_bench->add_option("--k", bench_k, "Neighborhood radius, integer or 'auto'");
    cmd_bench->add_option("--grad-thresh", bench_grad_thresh, "Selective gradient threshold");
    cmd_bench->add_option("--min-region", bench_min_region, "Selective minimum region size");
    cmd_bench->add_option("--downsample-method", bench_downsampler, "decimate or box");
    cmd_bench->add_flag("--axis-aware", bench_axis_aware, "Axis-aware interpolation");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (cmd_up->parsed()) return run_upsample(up);

        if (cmd_down->parsed()) {
            knnup::Image in = knnup::load_image(down_input);
            knnup::Image out;
            if (down_method == "decimate") {
                out = knnup::downsample_decimate(in, down_factor, down_factor);
            } else if (down_method == "box") {
                out = knnup::downsample_box(in, down_factor, down_factor);
            } else {
                throw ConfigError("unknown downsample method '" + down_method + "'");
            }
            knnup::save_image(out, down_output);
            return 0;
        }

        if (cmd_eval->parsed()) {
            if (eval_format != "json" && eval_format != "csv") {
                throw ConfigError("--format must be json or csv, got '" + eval_format + "'");
            }
            knnup::Image ref = knnup::load_image(eval_reference);
            knnup::Image test = knnup::load_image(eval_test);
            knnup::MetricsReport report = knnup::evaluate(ref, test);
            if (eval_out.empty()) {
                write_metrics(report, eval_format, std::cout);
            } else {
                std::ofstream out(eval_out, std::ios::trunc);
                if (!out) throw knnup::IoError("cannot open output: " + eval_out);
                write_metrics(report, eval_format, out);
            }
            return 0;
        }

        // bench
        if (bench_corpus.empty() == bench_cifar.empty()) {
            throw ConfigError("bench needs exactly one of --corpus or --cifar");
        }
        if (bench_format != "json" && bench_format != "csv") {
            throw ConfigError("--format must be csv or json, got '" + bench_format + "'");
        }
        knnup::PipelineSpec spec;
        if (!bench_corpus.empty()) spec.corpus = scan_corpus_dir(bench_corpus);
        spec.cifar_batch = bench_cifar;
        spec.limit = bench_limit;
        spec.factors = parse_factors(bench_factors);
        spec.methods = parse_methods(bench_methods);
        spec.repeats = bench_repeats;
        spec.selective = knnup::SelectiveConfig{bench_grad_thresh, bench_min_region, 4};
        spec.axis_aware = bench_axis_aware;
        if (bench_downsampler == "decimate") {
            spec.downsampler = knnup::Downsampler::decimate;
        } else if (bench_downsampler == "box") {
            spec.downsampler = knnup::Downsampler::box;
        } else {
            throw ConfigError("unknown downsample method '" + bench_downsampler + "'");
        }
        if (bench_k != "auto") {
            spec.k = parse_radius(bench_k, 1, 1);
        }

        std::vector<knnup::BenchRow> rows = knnup::run_pipeline(spec);
        knnup::emit_report(rows, bench_format == "csv" ? knnup::ReportFormat::csv
                                                       : knnup::ReportFormat::json,
                           bench_report);
        std::cout << "wrote " << rows.size() << " rows to " << bench_report << "\n";
        if (spec.methods.size() >= 2) {
            try {
                std::cout << knnup::format_comparison(knnup::compare_methods(rows));
            } catch (const ConfigError& e) {
                std::cerr << "method comparison unavailable: " << e.what() << "\n";
            }
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const knnup::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
