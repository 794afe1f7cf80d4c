#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <knnup/bench.hpp>

#include "support.hpp"

using knnup::BenchRow;
using knnup::Image;
using knnup::Method;
using knnup::PipelineSpec;

namespace {

void quiet_logger(const std::string&) {}

BenchRow make_row(const std::string& id, int f, Method m, double rmse_value) {
    BenchRow row;
    row.image_id = id;
    row.f_y = row.f_x = f;
    row.method = m;
    row.metrics.mse = rmse_value * rmse_value;
    row.metrics.rmse = rmse_value;
    row.metrics.mae = rmse_value / 2;
    if (rmse_value > 0) {
        row.metrics.psnr_paper = knnup::psnr_from_rmse(rmse_value, knnup::PsnrConvention::paper);
        row.metrics.psnr_std =
            knnup::psnr_from_rmse(rmse_value, knnup::PsnrConvention::standard);
    }
    row.metrics.ssim = 0.9;
    row.wall_ms = 1.25;
    return row;
}

std::string corpus_image(std::mt19937& rng, const std::string& name, int h = 16, int w = 16) {
    std::string path = testutil::temp_path(name);
    knnup::save_image(testutil::random_blocky_image(rng, h, w, 3), path);
    return path;
}

} // namespace

TEST_CASE("pipeline produces one row per image, factor, and method") {
    std::mt19937 rng(501);
    PipelineSpec spec;
    spec.corpus = {corpus_image(rng, "rowcount.ppm")};
    spec.factors = {{2, 2}};
    spec.methods = {Method::knn, Method::bilinear};
    spec.repeats = 1;
    auto rows = knnup::run_pipeline(spec, quiet_logger);
    REQUIRE(rows.size() == 2);
    REQUIRE(rows[0].image_id == "rowcount");
    REQUIRE(rows[0].method == Method::knn);
    REQUIRE(rows[1].method == Method::bilinear);
    REQUIRE_FALSE(rows[0].cropped);
}

TEST_CASE("factor one is a perfect reconstruction") {
    std::mt19937 rng(503);
    PipelineSpec spec;
    spec.corpus = {corpus_image(rng, "identity.ppm")};
    spec.factors = {{1, 1}};
    spec.methods = {Method::knn};
    spec.repeats = 1;
    auto rows = knnup::run_pipeline(spec, quiet_logger);
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0].metrics.rmse == 0.0);
    REQUIRE(rows[0].metrics.mse == 0.0);
    REQUIRE_FALSE(rows[0].metrics.psnr_paper.has_value());
    REQUIRE(rows[0].metrics.ssim.has_value());
    REQUIRE(*rows[0].metrics.ssim == 1.0);
}

TEST_CASE("ragged dimensions are cropped to the overlap and flagged") {
    std::mt19937 rng(509);
    PipelineSpec spec;
    spec.corpus = {corpus_image(rng, "ragged.ppm", 13, 11)};
    spec.factors = {{2, 2}, {10, 10}};
    spec.methods = {Method::knn_fast};
    spec.repeats = 1;
    auto rows = knnup::run_pipeline(spec, quiet_logger);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        REQUIRE(row.cropped); // 13 and 11 are divisible by neither factor
        REQUIRE(row.metrics.mse >= 0.0);
    }
}

TEST_CASE("unreadable corpus entries are skipped with a logged reason") {
    std::mt19937 rng(521);
    PipelineSpec spec;
    spec.corpus = {corpus_image(rng, "ok.ppm"), testutil::temp_path("does-not-exist.ppm")};
    spec.factors = {{2, 2}};
    spec.methods = {Method::knn};
    spec.repeats = 1;
    std::vector<std::string> logged;
    auto rows = knnup::run_pipeline(spec, [&](const std::string& msg) { logged.push_back(msg); });
    REQUIRE(rows.size() == 1);
    REQUIRE(logged.size() == 1);
    REQUIRE_THAT(logged[0], Catch::Matchers::ContainsSubstring("does-not-exist.ppm"));
}

TEST_CASE("pipeline validates its configuration up front") {
    PipelineSpec empty;
    empty.corpus = {};
    empty.cifar_batch = "";
    REQUIRE_THROWS_AS(knnup::run_pipeline(empty, quiet_logger), knnup::ConfigError);

    std::mt19937 rng(523);
    PipelineSpec bad_k;
    bad_k.corpus = {corpus_image(rng, "badk.ppm")};
    bad_k.factors = {{4, 4}};
    bad_k.methods = {Method::knn};
    bad_k.k = 2; // violates k >= max(f)-1
    REQUIRE_THROWS_AS(knnup::run_pipeline(bad_k, quiet_logger), knnup::ConfigError);

    PipelineSpec bad_repeats;
    bad_repeats.corpus = {corpus_image(rng, "badrep.ppm")};
    bad_repeats.repeats = 0;
    REQUIRE_THROWS_AS(knnup::run_pipeline(bad_repeats, quiet_logger), knnup::ConfigError);
}

TEST_CASE("cifar batches feed the pipeline") {
    std::mt19937 rng(541);
    std::vector<std::uint8_t> batch;
    for (int rec = 0; rec < 3; ++rec) {
        batch.push_back(0);
        for (int i = 0; i < 3072; ++i) batch.push_back(static_cast<std::uint8_t>(rng() % 256));
    }
    std::string path = testutil::temp_path("bench_batch.bin");
    std::ofstream(path, std::ios::binary)
        .write(reinterpret_cast<const char*>(batch.data()),
               static_cast<std::streamsize>(batch.size()));

    PipelineSpec spec;
    spec.cifar_batch = path;
    spec.limit = 2;
    spec.factors = {{2, 2}};
    spec.methods = {Method::knn, Method::knn_fast};
    spec.repeats = 1;
    auto rows = knnup::run_pipeline(spec, quiet_logger);
    REQUIRE(rows.size() == 4);
    REQUIRE(rows[0].image_id == "cifar-00000");
    REQUIRE(rows[2].image_id == "cifar-00001");
    // the two paths agree, so their metric fields match exactly
    REQUIRE(rows[0].metrics == rows[1].metrics);
}

TEST_CASE("metric fields are deterministic across runs and thread counts") {
    std::mt19937 rng(547);
    PipelineSpec spec;
    spec.corpus = {corpus_image(rng, "determinism.ppm", 20, 14)};
    spec.factors = {{2, 2}, {3, 2}};
    spec.methods = {Method::knn, Method::knn_fast, Method::selective, Method::bilinear};
    spec.repeats = 2;
    auto rows1 = knnup::run_pipeline(spec, quiet_logger);
    spec.threads = 4;
    auto rows4 = knnup::run_pipeline(spec, quiet_logger);
    REQUIRE(rows1.size() == rows4.size());
    for (std::size_t i = 0; i < rows1.size(); ++i) {
        REQUIRE(rows1[i].metrics == rows4[i].metrics);
        REQUIRE(rows1[i].selectivity == rows4[i].selectivity);
    }
}

TEST_CASE("selective rows carry a selectivity, others do not") {
    std::mt19937 rng(557);
    PipelineSpec spec;
    spec.corpus = {corpus_image(rng, "sel.ppm")};
    spec.factors = {{2, 2}};
    spec.methods = {Method::selective, Method::knn};
    spec.selective = knnup::SelectiveConfig{20, 0, 4};
    spec.repeats = 1;
    auto rows = knnup::run_pipeline(spec, quiet_logger);
    REQUIRE(rows.size() == 2);
    REQUIRE(rows[0].selectivity.has_value());
    REQUIRE_FALSE(rows[1].selectivity.has_value());
}

TEST_CASE("empty report emission") {
    std::ostringstream csv;
    knnup::emit_report({}, knnup::ReportFormat::csv, csv);
    REQUIRE(csv.str() == std::string(knnup::kReportHeader) + "\n");

    std::ostringstream json;
    knnup::emit_report({}, knnup::ReportFormat::json, json);
    REQUIRE(knnup::parse_report_json(json.str()).empty());
}

TEST_CASE("identity rows serialize absent psnr as empty cells and nulls") {
    BenchRow row;
    row.image_id = "id";
    row.f_y = row.f_x = 1;
    row.method = Method::knn;
    row.metrics.ssim = 1.0;
    // psnr and selectivity stay absent

    std::ostringstream csv;
    knnup::emit_report({row}, knnup::ReportFormat::csv, csv);
    REQUIRE_THAT(csv.str(), Catch::Matchers::ContainsSubstring("id,1,1,knn,0,0,0,,,1,0,\n"));

    std::ostringstream json;
    knnup::emit_report({row}, knnup::ReportFormat::json, json);
    REQUIRE_THAT(json.str(), Catch::Matchers::ContainsSubstring("\"psnr_paper\": null"));
    REQUIRE_THAT(json.str(), Catch::Matchers::ContainsSubstring("\"selectivity\": null"));
}

TEST_CASE("reports round trip through both formats") {
    std::vector<BenchRow> rows;
    rows.push_back(make_row("b-image", 4, Method::knn, 0.07243912381));
    rows.push_back(make_row("a-image", 2, Method::bilinear, 0.0009864406434732403));
    rows.push_back(make_row("a-image", 2, Method::knn, 0.1));
    rows.push_back(make_row("b-image", 4, Method::selective, 0.25));
    rows.back().selectivity = 0.625;
    rows.push_back(make_row("identity", 1, Method::knn_fast, 0.0));
    rows.back().metrics.ssim = 1.0;

    std::vector<BenchRow> expected = rows;
    knnup::detail::sort_rows(expected);

    std::ostringstream json;
    knnup::emit_report(rows, knnup::ReportFormat::json, json);
    REQUIRE(knnup::parse_report_json(json.str()) == expected);

    std::ostringstream csv;
    knnup::emit_report(rows, knnup::ReportFormat::csv, csv);
    std::istringstream head(csv.str());
    std::string first_line;
    std::getline(head, first_line);
    REQUIRE(first_line == knnup::kReportHeader);
    REQUIRE(knnup::parse_report_csv(csv.str()) == expected);

    // both formats decode to the identical row set
    REQUIRE(knnup::parse_report_csv(csv.str()) == knnup::parse_report_json(json.str()));
}

TEST_CASE("rows are sorted by image, factor, then method name") {
    std::vector<BenchRow> rows;
    rows.push_back(make_row("z", 2, Method::knn, 0.1));
    rows.push_back(make_row("a", 4, Method::selective, 0.1));
    rows.push_back(make_row("a", 4, Method::bilinear, 0.1));
    rows.push_back(make_row("a", 2, Method::knn_fast, 0.1));
    std::ostringstream csv;
    knnup::emit_report(rows, knnup::ReportFormat::csv, csv);
    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line); // header
    std::getline(in, line);
    REQUIRE_THAT(line, Catch::Matchers::StartsWith("a,2,2,knn-fast"));
    std::getline(in, line);
    REQUIRE_THAT(line, Catch::Matchers::StartsWith("a,4,4,bilinear"));
    std::getline(in, line);
    REQUIRE_THAT(line, Catch::Matchers::StartsWith("a,4,4,selective"));
    std::getline(in, line);
    REQUIRE_THAT(line, Catch::Matchers::StartsWith("z,2,2,knn"));
}

TEST_CASE("emit_report rejects unwritable paths") {
    REQUIRE_THROWS_AS(
        knnup::emit_report(std::vector<BenchRow>{}, knnup::ReportFormat::csv,
                           std::string("/nonexistent-dir/report.csv")),
        knnup::IoError);
}

TEST_CASE("compare_methods on identical metrics reports zero everywhere") {
    std::vector<BenchRow> rows;
    rows.push_back(make_row("img", 2, Method::knn, 0.125));
    rows.push_back(make_row("img", 2, Method::bilinear, 0.125));
    auto summary = knnup::compare_methods(rows);
    REQUIRE(summary.entries.size() == 1);
    for (const auto& rel : summary.entries[0].rel) {
        if (rel) REQUIRE(*rel == 0.0);
    }
    REQUIRE(summary.pairs.size() == 1);
    REQUIRE(summary.pairs[0].metrics[1].has_value());
    REQUIRE(summary.pairs[0].metrics[1]->max == 0.0);
}

TEST_CASE("compare_methods hand-built relative difference") {
    std::vector<BenchRow> rows;
    rows.push_back(make_row("img", 2, Method::bilinear, 0.10)); // base: first by name
    rows.push_back(make_row("img", 2, Method::knn, 0.11));
    auto summary = knnup::compare_methods(rows);
    REQUIRE(summary.entries.size() == 1);
    REQUIRE(summary.entries[0].base == Method::bilinear);
    REQUIRE(summary.entries[0].other == Method::knn);
    // rmse is metric index 1: |0.11 - 0.10| / 0.10 = 10%
    REQUIRE(summary.entries[0].rel[1].has_value());
    REQUIRE_THAT(*summary.entries[0].rel[1], Catch::Matchers::WithinAbs(0.10, 1e-12));
}

TEST_CASE("compare_methods requires counterpart rows") {
    std::vector<BenchRow> rows;
    rows.push_back(make_row("img", 2, Method::knn, 0.1));
    REQUIRE_THROWS_AS(knnup::compare_methods(rows), knnup::ConfigError);

    rows.push_back(make_row("img", 2, Method::bilinear, 0.1));
    rows.push_back(make_row("other", 2, Method::knn, 0.1)); // missing bilinear counterpart
    REQUIRE_THROWS_WITH(knnup::compare_methods(rows),
                        Catch::Matchers::ContainsSubstring("missing counterpart"));
}

TEST_CASE("knn and bilinear rmse differences land in the expected band") {
    // Synthetic 32x32 corpus standing in for the unknown reference subset:
    // the spread of relative rmse differences should reach into single-digit
    // percentages.
    std::mt19937 rng(563);
    std::vector<std::uint8_t> batch;
    for (int rec = 0; rec < 50; ++rec) {
        batch.push_back(0);
        Image img = testutil::random_blocky_image(rng, 32, 32, 3, 4 + rec % 5);
        for (int ch = 0; ch < 3; ++ch) {
            for (int p = 0; p < 1024; ++p) batch.push_back(img.data[p * 3 + ch]);
        }
    }
    std::string path = testutil::temp_path("spread_batch.bin");
    std::ofstream(path, std::ios::binary)
        .write(reinterpret_cast<const char*>(batch.data()),
               static_cast<std::streamsize>(batch.size()));

    PipelineSpec spec;
    spec.cifar_batch = path;
    spec.factors = {{2, 2}};
    spec.methods = {Method::knn, Method::bilinear};
    spec.repeats = 1;
    auto rows = knnup::run_pipeline(spec, quiet_logger);
    REQUIRE(rows.size() == 100);

    auto summary = knnup::compare_methods(rows);
    REQUIRE(summary.pairs.size() == 1);
    const auto& rmse_agg = summary.pairs[0].metrics[1];
    REQUIRE(rmse_agg.has_value());
    REQUIRE(rmse_agg->count == 50);
    // spread overlaps single-digit percent
    REQUIRE(rmse_agg->min <= 0.10);
    REQUIRE(rmse_agg->max > 0.0);

    REQUIRE_FALSE(knnup::format_comparison(summary).empty());
}

TEST_CASE("structured fixture degrades monotonically with the factor") {
    PipelineSpec spec;
    spec.corpus = {testutil::fixture_path("structured_64.ppm")};
    spec.factors = {{2, 2}, {4, 4}, {5, 5}, {10, 10}};
    spec.methods = {Method::knn};
    spec.repeats = 1;
    auto rows = knnup::run_pipeline(spec, quiet_logger);
    REQUIRE(rows.size() == 4);
    double last = 2.0;
    for (const auto& row : rows) {
        REQUIRE(row.metrics.ssim.has_value());
        REQUIRE(*row.metrics.ssim < last);
        last = *row.metrics.ssim;
    }
}
