#include "rlr/error.hpp"
#include "rlr/harness.hpp"
#include "rlr/spec_file.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

namespace fs = std::filesystem;
using namespace rlr;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitSpec = 2;
constexpr int kExitIo = 3;

int default_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(Errc::IoError, "cannot create directory " + dir + ": " + ec.message());
}

void write_outputs(const std::vector<RunRecord>& records, const std::string& out) {
    ensure_dir(out);
    const auto summary = summarize(records);
    const auto slopes = series_slopes(summary);
    emit_csv(records, (fs::path(out) / "records.csv").string());
    emit_csv(summary, (fs::path(out) / "summary.csv").string());
    emit_csv(slopes, (fs::path(out) / "slopes.csv").string());
    emit_timing_csv(records, (fs::path(out) / "timing.csv").string());
    const std::string plot_dir = (fs::path(out) / "plotdata").string();
    ensure_dir(plot_dir);
    emit_plotdata(summary, plot_dir);
}

void print_slopes(const std::vector<SlopeRow>& slopes) {
    for (const auto& s : slopes) {
        std::printf("%-8s d=%ldx%ld eta=(%g,%g) points=%d slope=%.4f\n", to_string(s.method).c_str(),
                    static_cast<long>(s.d1), static_cast<long>(s.d2), s.eta1, s.eta2, s.points, s.slope);
    }
}

// "method=robust,eta=0.4,d=30" keeps the series matching every given field.
bool series_matches(const SlopeRow& s, const std::string& filter) {
    if (filter.empty()) return true;
    std::stringstream ss(filter);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw Error(Errc::SpecError, "bad --series item '" + item + "'");
        const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
        if (key == "method") {
            if (to_string(s.method) != value) return false;
        } else if (key == "eta") {
            const double e = std::stod(value);
            if (s.eta1 != e || s.eta2 != e) return false;
        } else if (key == "eta1") {
            if (s.eta1 != std::stod(value)) return false;
        } else if (key == "eta2") {
            if (s.eta2 != std::stod(value)) return false;
        } else if (key == "d" || key == "d1") {
            if (s.d1 != std::stol(value)) return false;
        } else if (key == "d2") {
            if (s.d2 != std::stol(value)) return false;
        } else {
            throw Error(Errc::SpecError, "unknown --series key '" + key + "'");
        }
    }
    return true;
}

void print_image_table(const std::vector<SummaryRow>& a, const std::vector<SummaryRow>& b) {
    std::printf("%-10s %-6s %-16s %-16s %-16s %-16s %-16s\n", "case", "method", "block1", "block2", "block3",
                "block4", "total");
    auto emit = [](const char* name, const std::vector<SummaryRow>& rows) {
        for (const auto& r : rows) {
            std::printf("%-10s %-6s", name, r.method == Method::Robust ? "R" : "S");
            for (const auto& s : r.blocks) std::printf(" %-16s", format_mean_sd(s).c_str());
            std::printf(" %-16s\n", format_mean_sd(r.total).c_str());
        }
    };
    emit("t3-prod", a);
    emit("t2.1-col", b);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust low-rank regression under quantization and heavy tails"};
    app.require_subcommand(1);

    std::string spec_path, out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> reps;
    int threads = default_threads();
    auto* run = app.add_subcommand("run", "Run a simulation grid from a spec file");
    run->add_option("--spec", spec_path, "Experiment spec (TOML subset)")->required();
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--seed", seed, "Override the spec seed");
    run->add_option("--reps", reps, "Override the number of replications")->check(CLI::PositiveNumber);
    run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

    std::string sum_in, sum_out;
    auto* summ = app.add_subcommand("summarize", "Aggregate records.csv into summary.csv");
    summ->add_option("--in", sum_in, "records.csv")->required();
    summ->add_option("--out", sum_out, "summary.csv (stdout when omitted)");

    std::string slope_in, series;
    auto* slope = app.add_subcommand("slope", "Fit log-log slopes from records.csv");
    slope->add_option("--in", slope_in, "records.csv")->required();
    slope->add_option("--series", series, "Filter such as method=robust,eta=0.4");

    std::string fixtures, img_out;
    Eigen::Index img_n = 500;
    int img_reps = 20;
    std::uint64_t img_seed = 1;
    bool emit_fixtures = false;
    auto* images = app.add_subcommand("images", "Binary-image matrix-response study");
    images->add_option("--fixtures", fixtures, "Image fixture file")->required();
    images->add_option("--n", img_n, "Sample size")->check(CLI::PositiveNumber);
    images->add_option("--reps", img_reps, "Replications")->check(CLI::PositiveNumber);
    images->add_option("--seed", img_seed, "Seed");
    images->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    images->add_option("--out", img_out, "Directory for records and summaries");
    images->add_flag("--write-fixtures", emit_fixtures, "Write the bundled glyph images to --fixtures and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitSpec;
    }

    try {
        if (*run) {
            ExperimentSpec spec = load_experiment_spec(spec_path);
            if (seed) spec.seed = *seed;
            if (reps) spec.replications = *reps;
            validate(spec);
            const auto t0 = std::chrono::steady_clock::now();
            const auto records = run_experiment(spec, threads);
            write_outputs(records, out_dir);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            std::size_t failed = 0;
            for (const auto& r : records) failed += r.ok() ? 0 : 1;
            std::printf("%zu records (%zu failed) in %.1fs -> %s\n", records.size(), failed, secs, out_dir.c_str());
            print_slopes(series_slopes(summarize(records)));
        } else if (*summ) {
            const auto summary = summarize(read_records_csv(sum_in));
            if (sum_out.empty()) {
                for (const auto& r : summary) {
                    std::printf("%s n=%ld d=%ldx%ld eta=(%g,%g) count=%d failures=%d total=%s\n",
                                to_string(r.method).c_str(), static_cast<long>(r.n), static_cast<long>(r.d1),
                                static_cast<long>(r.d2), r.eta1, r.eta2, r.count, r.failures,
                                format_mean_sd(r.total).c_str());
                }
            } else {
                emit_csv(summary, sum_out);
            }
        } else if (*slope) {
            const auto all = series_slopes(summarize(read_records_csv(slope_in)));
            std::vector<SlopeRow> kept;
            for (const auto& s : all)
                if (series_matches(s, series)) kept.push_back(s);
            if (kept.empty()) throw Error(Errc::SpecError, "no series with at least three grid points matched");
            print_slopes(kept);
        } else if (*images) {
            if (emit_fixtures) {
                write_binary_matrices(fixtures, glyph_fixtures());
                std::printf("wrote %s\n", fixtures.c_str());
                return kExitOk;
            }
            const auto rec_a = run_experiment(image_study_spec(fixtures, ImageNoise::TProduct, img_n, img_reps, img_seed),
                                              threads);
            const auto rec_b = run_experiment(image_study_spec(fixtures, ImageNoise::TColumns, img_n, img_reps, img_seed),
                                              threads);
            if (!img_out.empty()) {
                write_outputs(rec_a, (fs::path(img_out) / "t3_product").string());
                write_outputs(rec_b, (fs::path(img_out) / "t2.1_columns").string());
            }
            print_image_table(summarize(rec_a), summarize(rec_b));
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        if (e.code() == Errc::SpecError) return kExitSpec;
        if (e.code() == Errc::IoError) return kExitIo;
        return kExitFailure;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailure;
    }
    return kExitOk;
}
