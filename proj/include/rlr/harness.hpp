#pragma once

#include "rlr/preprocess.hpp"
#include "rlr/simgen.hpp"
#include "rlr/solver.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rlr {

enum class Model { Multitask, MatrixResponse };
enum class Method { Robust, Standard };

/// Default multiplier on the rate-order lambda, picked by a pilot sweep over
/// powers of two on held-out seeds (see README).
inline constexpr double kDefaultLambdaConstMultitask = 0.5;
inline constexpr double kDefaultLambdaConstMatrixResponse = 1.0;

struct ExperimentSpec {
    Model model = Model::Multitask;
    PreprocessMode mode = PreprocessMode::HeavyBoth;
    TargetSpec target;
    DistSpec covspec;
    DistSpec noisespec;
    std::vector<Eigen::Index> n_grid;
    std::vector<double> eta_grid{0.0};
    int replications = 20;
    double lambda_const = kDefaultLambdaConstMultitask;
    std::uint64_t seed = 1;
    int max_iters = 5000;
    double tol = 1e-9;
};

/// Throws Errc::SpecError when a field is out of range.
void validate(const ExperimentSpec& spec);

struct RunRecord {
    Model model = Model::Multitask;
    PreprocessMode mode = PreprocessMode::HeavyBoth;
    Eigen::Index n = 0;
    Eigen::Index d1 = 0;
    Eigen::Index d2 = 0;
    double eta1 = 0.0;
    double eta2 = 0.0;
    int replication = 0;
    Method method = Method::Robust;
    double err_fro = 0.0;
    double err_op = 0.0;  ///< max over blocks for the matrix-response model
    std::vector<double> block_err_fro;
    int iterations = 0;
    bool converged = false;
    bool psd_floor_applied = false;
    double lambda = 0.0;
    double wall_time = 0.0;  ///< seconds; kept out of records.csv
    std::string failure;     ///< empty on success

    bool ok() const { return failure.empty(); }
};

/// lambda = c sqrt(d_max log d_max / n)
double lambda_multitask(double c, Eigen::Index d1, Eigen::Index d2, Eigen::Index n);
/// lambda = c sqrt((d1 + d2) log(d1 + d2) / n)
double lambda_matrix_response(double c, Eigen::Index d1, Eigen::Index d2, Eigen::Index n);

/// Seed of replication r: seed XOR r. Within a replication the target uses
/// stream 0, the data of n_grid[a] stream a + 1, and the dithers of
/// (n_grid[a], eta_grid[b]) a sub-stream b + 1 of the data stream, so every
/// eta level of a cell sees the same raw samples.
std::uint64_t replication_seed(std::uint64_t seed, int replication);

/// Runs every (n, eta) cell for every replication, robust and standard
/// pipelines. Records are ordered by (n, eta, replication, method) and do not
/// depend on `threads`.
std::vector<RunRecord> run_experiment(const ExperimentSpec& spec, int threads = 1);

/// Ordinary least-squares slope of log(err) on log(n).
double fit_loglog_slope(std::span<const double> ns, std::span<const double> errs);

struct Stat {
    double mean = 0.0;
    double sd = 0.0;  ///< sample standard deviation (n - 1)
    double se = 0.0;
};

Stat mean_sd(std::span<const double> values);

/// "7.5275_(0.26)"
std::string format_mean_sd(const Stat& s);

struct SummaryRow {
    Eigen::Index n = 0;
    Eigen::Index d1 = 0;
    Eigen::Index d2 = 0;
    double eta1 = 0.0;
    double eta2 = 0.0;
    Method method = Method::Robust;
    int count = 0;     ///< successful replications
    int failures = 0;  ///< excluded from the statistics
    Stat total;
    Stat op;
    std::vector<Stat> blocks;
};

/// Per (cell, method) statistics over successful replications, in first
/// appearance order.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);

struct SlopeRow {
    Method method = Method::Robust;
    Eigen::Index d1 = 0;
    Eigen::Index d2 = 0;
    double eta1 = 0.0;
    double eta2 = 0.0;
    int points = 0;
    double slope = 0.0;
};

/// Slope of mean total error against n for every (method, d, eta) series with
/// at least three grid points.
std::vector<SlopeRow> series_slopes(const std::vector<SummaryRow>& summary);

std::string to_string(Model m);
std::string to_string(PreprocessMode m);
std::string to_string(Method m);

extern const std::vector<std::string> kRecordsHeader;
extern const std::vector<std::string> kSummaryHeader;
extern const std::vector<std::string> kSlopesHeader;
extern const std::vector<std::string> kPlotHeader;

void emit_csv(const std::vector<RunRecord>& records, const std::string& path);
void emit_csv(const std::vector<SummaryRow>& summary, const std::string& path);
void emit_csv(const std::vector<SlopeRow>& slopes, const std::string& path);
/// Wall times, one row per record, in record order.
void emit_timing_csv(const std::vector<RunRecord>& records, const std::string& path);
/// One file per series in `dir`: n, log n, log err and two reference lines
/// anchored at the first point (slope -1/2, and -1/2 x + 1/2 ln x).
std::vector<std::string> emit_plotdata(const std::vector<SummaryRow>& summary, const std::string& dir);

enum class ImageNoise {
    TProduct,  ///< E = Z1 Z2^T, Z1 ~ T(0, I_43, 3), Z2 ~ T(0, I_53, 3)
    TColumns,  ///< 53 i.i.d. T(0, I_43, 2.1) columns
};

/// Matrix-response study on the four binary images with X ~ N(0, I_4).
ExperimentSpec image_study_spec(const std::string& fixtures, ImageNoise noise, Eigen::Index n, int replications,
                                std::uint64_t seed);

std::vector<RunRecord> read_records_csv(const std::string& path);

} // namespace rlr
