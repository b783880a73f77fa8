#include "rlr/harness.hpp"

#include "rlr/calibrate.hpp"
#include "rlr/csv.hpp"
#include "rlr/error.hpp"
#include "rlr/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>
#include <tuple>

namespace rlr {

const std::vector<std::string> kRecordsHeader{
    "model", "mode", "n", "d1", "d2", "eta1", "eta2", "replication", "method", "err_fro", "err_op",
    "err_fro_blocks", "iterations", "converged", "psd_floor_applied", "lambda", "status"};
const std::vector<std::string> kSummaryHeader{
    "n", "d1", "d2", "eta1", "eta2", "method", "count", "failures", "quantity", "mean", "sd", "se", "formatted"};
const std::vector<std::string> kSlopesHeader{"method", "d1", "d2", "eta1", "eta2", "points", "slope"};
const std::vector<std::string> kPlotHeader{"n", "log_n", "log_err", "ref_half", "ref_sqrtlog"};

std::string to_string(Model m) { return m == Model::Multitask ? "multitask" : "matrix_response"; }

std::string to_string(PreprocessMode m) {
    return m == PreprocessMode::HeavyBoth ? "heavy_both" : "heavy_response_only";
}

std::string to_string(Method m) { return m == Method::Robust ? "robust" : "standard"; }

void validate(const ExperimentSpec& spec) {
    auto fail = [](const std::string& msg) { throw Error(Errc::SpecError, msg); };
    if (spec.n_grid.empty()) fail("n_grid is empty");
    if (spec.eta_grid.empty()) fail("eta_grid is empty");
    if (spec.replications < 1) fail("replications must be >= 1");
    if (!(spec.lambda_const > 0.0)) fail("lambda_const must be positive");
    if (spec.max_iters < 1) fail("max_iters must be >= 1");
    if (!(spec.tol > 0.0)) fail("tol must be positive");
    for (auto n : spec.n_grid)
        if (n < 2) fail("n_grid entries must be >= 2");
    for (double e : spec.eta_grid)
        if (!(e >= 0.0) || !std::isfinite(e)) fail("eta_grid entries must be finite and >= 0");
    const TargetSpec& t = spec.target;
    if (spec.model == Model::Multitask) {
        if (t.kind != TargetKind::V7Projector) fail("multitask model needs target kind v7_projector");
        if (t.d1 < 7) fail("v7_projector needs d1 >= 7");
        if (t.d2 != 0 && t.d2 != t.d1) fail("v7_projector needs d1 == d2");
    } else {
        if (t.kind == TargetKind::V7Projector) fail("matrix_response model needs block or image targets");
        for (double e : spec.eta_grid)
            if (e != 0.0) fail("matrix_response model does not quantize; eta_grid must be [0]");
        if (t.kind == TargetKind::NormalizedProductBlocks) {
            if (t.d1 < 1 || t.d2 < 1 || t.blocks < 1) fail("block target needs d1, d2, blocks >= 1");
            if (t.rank < 1 || t.rank > std::min(t.d1, t.d2)) fail("block target rank out of range");
        }
        if (t.kind == TargetKind::BinaryImages && t.path.empty()) fail("binary_images target needs a path");
    }
}

double lambda_multitask(double c, Eigen::Index d1, Eigen::Index d2, Eigen::Index n) {
    const double dmax = static_cast<double>(std::max(d1, d2));
    return c * std::sqrt(dmax * std::log(dmax) / static_cast<double>(n));
}

double lambda_matrix_response(double c, Eigen::Index d1, Eigen::Index d2, Eigen::Index n) {
    const double d = static_cast<double>(d1 + d2);
    return c * std::sqrt(d * std::log(d) / static_cast<double>(n));
}

std::uint64_t replication_seed(std::uint64_t seed, int replication) {
    return seed ^ static_cast<std::uint64_t>(replication);
}

ExperimentSpec image_study_spec(const std::string& fixtures, ImageNoise noise, Eigen::Index n, int replications,
                                std::uint64_t seed) {
    ExperimentSpec spec;
    spec.model = Model::MatrixResponse;
    spec.target = TargetSpec{TargetKind::BinaryImages, kImageRows, kImageCols, 0, 4, fixtures};
    spec.covspec = DistSpec{DistKind::GaussianIid, 0.0, 1.0};
    spec.noisespec = noise == ImageNoise::TProduct ? DistSpec{DistKind::TProductNoise, 3.0, 1.0}
                                                   : DistSpec{DistKind::TColumnNoise, 2.1, 1.0};
    spec.n_grid = {n};
    spec.eta_grid = {0.0};
    spec.replications = replications;
    spec.lambda_const = kDefaultLambdaConstMatrixResponse;
    spec.seed = seed;
    return spec;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

SolveOpts solve_opts(const ExperimentSpec& spec, double lambda) {
    SolveOpts o;
    o.lambda = lambda;
    o.max_iters = spec.max_iters;
    o.tol = spec.tol;
    return o;
}

void fill_errors(RunRecord& r, const std::vector<Mat>& est, const std::vector<Mat>& truth) {
    double total = 0.0, op = 0.0;
    r.block_err_fro.clear();
    for (std::size_t k = 0; k < truth.size(); ++k) {
        const Mat diff = est[k] - truth[k];
        const double f = diff.norm();
        r.block_err_fro.push_back(f);
        total += f * f;
        op = std::max(op, matrix_norm(diff, NormKind::Op));
    }
    r.err_fro = std::sqrt(total);
    r.err_op = op;
}

template <class Fn>
void run_method(RunRecord& r, Fn&& fn) {
    const auto t0 = Clock::now();
    try {
        fn(r);
        if (!std::isfinite(r.err_fro) || !std::isfinite(r.err_op)) r.failure = "non-finite error";
    } catch (const Error& e) {
        r.failure = e.what();
    }
    r.wall_time = seconds_since(t0);
}

RunRecord base_record(const ExperimentSpec& spec, Eigen::Index n, Eigen::Index d1, Eigen::Index d2,
                      double eta, int rep, Method m) {
    RunRecord r;
    r.model = spec.model;
    r.mode = spec.mode;
    r.n = n;
    r.d1 = d1;
    r.d2 = d2;
    r.eta1 = eta;
    r.eta2 = eta;
    r.replication = rep;
    r.method = m;
    return r;
}

void multitask_replication(const ExperimentSpec& spec, int rep, std::vector<RunRecord>& out) {
    const std::uint64_t rseed = replication_seed(spec.seed, rep);
    Rng target_rng(derive_seed(rseed, 0));
    const Mat theta = make_target_v7(spec.target.d1, target_rng);
    const std::vector<Mat> truth{theta};
    const Eigen::Index d1 = theta.rows(), d2 = theta.cols();

    for (std::size_t a = 0; a < spec.n_grid.size(); ++a) {
        const Eigen::Index n = spec.n_grid[a];
        const std::uint64_t data_seed = derive_seed(rseed, a + 1);
        Rng data_rng(data_seed);
        const MultitaskData data = gen_multitask_data(theta, spec.covspec, spec.noisespec, n, data_rng);
        const double lambda = lambda_multitask(spec.lambda_const, d1, d2, n);

        // Adaptive radii depend only on the raw samples; shared by all eta.
        ShrinkConfig radii;
        std::string radius_failure;
        try {
            if (spec.mode == PreprocessMode::HeavyBoth) radii.tau = calibrate_tau_cov(data.x).tau;
            radii.varpi = calibrate_tau_cov(data.y).tau;
        } catch (const Error& e) {
            radius_failure = e.what();
        }
        const double inf = std::numeric_limits<double>::infinity();
        const ShrinkConfig no_shrink{inf, inf};

        for (std::size_t b = 0; b < spec.eta_grid.size(); ++b) {
            const double eta = spec.eta_grid[b];
            const QuantConfig qc{eta, eta, DitherKind::Triangular, DitherKind::Uniform};
            const std::uint64_t dither_seed = derive_seed(data_seed, b + 1);

            RunRecord robust = base_record(spec, n, d1, d2, eta, rep, Method::Robust);
            robust.lambda = lambda;
            run_method(robust, [&](RunRecord& r) {
                if (!radius_failure.empty()) throw Error(Errc::DegenerateData, radius_failure);
                Rng rng(dither_seed);
                const Preprocessed pp = preprocess_multitask(data.x, data.y, radii, qc, spec.mode, rng);
                Mat sxx = sigma_xx_tilde(pp.x, eta);
                const bool floored = min_eigenvalue(sxx) < 0.0;
                if (floored) sxx = psd_floor(sxx, 0.0);
                const Mat sxy = sigma_xy_tilde(pp.x, pp.y);
                SolveResult res = solve_multitask(sxx, sxy, solve_opts(spec, lambda));
                res.psd_floor_applied = floored;
                fill_errors(r, res.theta, truth);
                r.iterations = res.iterations;
                r.converged = res.converged;
                r.psd_floor_applied = res.psd_floor_applied;
            });
            out.push_back(std::move(robust));

            RunRecord standard = base_record(spec, n, d1, d2, eta, rep, Method::Standard);
            standard.lambda = lambda;
            run_method(standard, [&](RunRecord& r) {
                Rng rng(dither_seed);
                const Preprocessed pp =
                    preprocess_multitask(data.x, data.y, no_shrink, qc, PreprocessMode::HeavyBoth, rng);
                const Mat sxx = sample_cov(pp.x);
                const Mat sxy = sigma_xy_tilde(pp.x, pp.y);
                const SolveResult res = solve_multitask(sxx, sxy, solve_opts(spec, lambda));
                fill_errors(r, res.theta, truth);
                r.iterations = res.iterations;
                r.converged = res.converged;
            });
            out.push_back(std::move(standard));
        }
    }
}

void matrix_response_replication(const ExperimentSpec& spec, const std::vector<Mat>* images, int rep,
                                 std::vector<RunRecord>& out) {
    const std::uint64_t rseed = replication_seed(spec.seed, rep);
    Rng target_rng(derive_seed(rseed, 0));
    const TargetSpec& t = spec.target;
    const std::vector<Mat> truth =
        images ? *images : make_target_blocks(t.blocks, t.d1, t.d2, t.rank, target_rng);
    const auto s = static_cast<Eigen::Index>(truth.size());
    const Eigen::Index d1 = truth.front().rows(), d2 = truth.front().cols();

    for (std::size_t a = 0; a < spec.n_grid.size(); ++a) {
        const Eigen::Index n = spec.n_grid[a];
        Rng data_rng(derive_seed(rseed, a + 1));
        const MatrixResponseData data = gen_matrix_response_data(truth, spec.covspec, spec.noisespec, n, data_rng);
        const double lambda = lambda_matrix_response(spec.lambda_const, d1, d2, n);
        Mat sxx;
        std::string sxx_failure;
        try {
            sxx = sample_cov(data.x);
        } catch (const Error& e) {
            sxx_failure = e.what();
        }

        RunRecord robust = base_record(spec, n, d1, d2, 0.0, rep, Method::Robust);
        robust.lambda = lambda;
        run_method(robust, [&](RunRecord& r) {
            if (!sxx_failure.empty()) throw Error(Errc::DegenerateData, sxx_failure);
            const ResponseSpectra spectra = response_spectra(data.ys);
            std::vector<Mat> sxy;
            for (Eigen::Index k = 0; k < s; ++k) {
                const Vec xk = data.x.col(k);
                const CalibResult tau = calibrate_tau_k(xk, spectra);
                sxy.push_back(minsker_cross_moment(xk, spectra, tau.tau));
            }
            const SolveResult res = solve_matrix_response(sxx, sxy, solve_opts(spec, lambda));
            fill_errors(r, res.theta, truth);
            r.iterations = res.iterations;
            r.converged = res.converged;
        });
        out.push_back(std::move(robust));

        RunRecord standard = base_record(spec, n, d1, d2, 0.0, rep, Method::Standard);
        standard.lambda = lambda;
        run_method(standard, [&](RunRecord& r) {
            if (!sxx_failure.empty()) throw Error(Errc::DegenerateData, sxx_failure);
            std::vector<Mat> sxy;
            for (Eigen::Index k = 0; k < s; ++k) sxy.push_back(cross_moment(data.x.col(k), data.ys));
            const SolveResult res = solve_matrix_response(sxx, sxy, solve_opts(spec, lambda));
            fill_errors(r, res.theta, truth);
            r.iterations = res.iterations;
            r.converged = res.converged;
        });
        out.push_back(std::move(standard));
    }
}

} // namespace

std::vector<RunRecord> run_experiment(const ExperimentSpec& spec, int threads) {
    validate(spec);
    std::vector<Mat> images;
    if (spec.model == Model::MatrixResponse && spec.target.kind == TargetKind::BinaryImages) {
        images = load_binary_images(spec.target.path);
    }

    const int reps = spec.replications;
    std::vector<std::vector<RunRecord>> per_rep(static_cast<std::size_t>(reps));
    std::atomic<int> next{0};
    std::mutex err_mu;
    std::string fatal;
    auto worker = [&] {
        for (int rep = next++; rep < reps; rep = next++) {
            try {
                auto& out = per_rep[static_cast<std::size_t>(rep)];
                if (spec.model == Model::Multitask) {
                    multitask_replication(spec, rep, out);
                } else {
                    matrix_response_replication(spec, images.empty() ? nullptr : &images, rep, out);
                }
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (fatal.empty()) fatal = e.what();
            }
        }
    };
    const int nthreads = std::max(1, std::min(threads, reps));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (!fatal.empty()) throw Error(Errc::SpecError, fatal);

    // Each replication emits cells in (n, eta, method) order; interleave to
    // (n, eta, replication, method).
    std::vector<RunRecord> records;
    const std::size_t per = per_rep.front().size();
    records.reserve(per * per_rep.size());
    for (std::size_t c = 0; c < per; c += 2)
        for (auto& rr : per_rep)
            for (std::size_t m = 0; m < 2; ++m) records.push_back(std::move(rr[c + m]));
    return records;
}

double fit_loglog_slope(std::span<const double> ns, std::span<const double> errs) {
    if (ns.size() != errs.size()) throw Error(Errc::TooFewPoints, "n and error counts differ");
    if (ns.size() < 3) throw Error(Errc::TooFewPoints, std::to_string(ns.size()) + " points");
    std::vector<double> x(ns.size()), y(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (!(ns[i] > 0.0)) throw Error(Errc::NonPositiveError, "sample sizes must be positive");
        if (!(errs[i] > 0.0)) throw Error(Errc::NonPositiveError, "errors must be positive");
        x[i] = std::log(ns[i]);
        y[i] = std::log(errs[i]);
    }
    const double m = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / m;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / m;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (!(sxx > 0.0)) throw Error(Errc::TooFewPoints, "sample sizes are all equal");
    return sxy / sxx;
}

Stat mean_sd(std::span<const double> values) {
    Stat s;
    if (values.empty()) return s;
    const double m = static_cast<double>(values.size());
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / m;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(ss / (m - 1.0));
        s.se = s.sd / std::sqrt(m);
    }
    return s;
}

std::string format_mean_sd(const Stat& s) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.4f_(%.2f)", s.mean, s.sd);
    return buf;
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
    if (records.empty()) throw Error(Errc::EmptyRecords, "nothing to summarize");
    using Key = std::tuple<Eigen::Index, Eigen::Index, Eigen::Index, double, double, int>;
    std::map<Key, std::size_t> index;
    std::vector<SummaryRow> rows;
    std::vector<std::vector<const RunRecord*>> members;
    for (const RunRecord& r : records) {
        const Key key{r.n, r.d1, r.d2, r.eta1, r.eta2, static_cast<int>(r.method)};
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, rows.size()).first;
            SummaryRow row;
            row.n = r.n;
            row.d1 = r.d1;
            row.d2 = r.d2;
            row.eta1 = r.eta1;
            row.eta2 = r.eta2;
            row.method = r.method;
            rows.push_back(row);
            members.emplace_back();
        }
        if (r.ok()) members[it->second].push_back(&r);
        else ++rows[it->second].failures;
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& mem = members[i];
        rows[i].count = static_cast<int>(mem.size());
        std::vector<double> tot, op;
        std::size_t nblocks = 0;
        for (const RunRecord* r : mem) {
            tot.push_back(r->err_fro);
            op.push_back(r->err_op);
            nblocks = std::max(nblocks, r->block_err_fro.size());
        }
        rows[i].total = mean_sd(tot);
        rows[i].op = mean_sd(op);
        if (nblocks > 1) {
            for (std::size_t k = 0; k < nblocks; ++k) {
                std::vector<double> v;
                for (const RunRecord* r : mem)
                    if (k < r->block_err_fro.size()) v.push_back(r->block_err_fro[k]);
                rows[i].blocks.push_back(mean_sd(v));
            }
        }
    }
    return rows;
}

std::vector<SlopeRow> series_slopes(const std::vector<SummaryRow>& summary) {
    using Key = std::tuple<int, Eigen::Index, Eigen::Index, double, double>;
    std::map<Key, std::size_t> index;
    std::vector<SlopeRow> out;
    std::vector<std::vector<double>> ns, errs;
    for (const SummaryRow& r : summary) {
        if (r.count == 0 || !(r.total.mean > 0.0)) continue;
        const Key key{static_cast<int>(r.method), r.d1, r.d2, r.eta1, r.eta2};
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, out.size()).first;
            out.push_back(SlopeRow{r.method, r.d1, r.d2, r.eta1, r.eta2, 0, 0.0});
            ns.emplace_back();
            errs.emplace_back();
        }
        ns[it->second].push_back(static_cast<double>(r.n));
        errs[it->second].push_back(r.total.mean);
    }
    std::vector<SlopeRow> kept;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (ns[i].size() < 3) continue;
        out[i].points = static_cast<int>(ns[i].size());
        out[i].slope = fit_loglog_slope(ns[i], errs[i]);
        kept.push_back(out[i]);
    }
    return kept;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::IoError, "cannot write " + path);
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw Error(Errc::IoError, "write failed for " + path);
}

std::string fmt_blocks(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ';';
        s += csv::format_double(v[i]);
    }
    return s;
}

std::string eta_tag(double e) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", e);
    return buf;
}

} // namespace

void emit_csv(const std::vector<RunRecord>& records, const std::string& path) {
    auto out = open_out(path);
    out << csv::join_row(kRecordsHeader) << '\n';
    for (const RunRecord& r : records) {
        const bool ok = r.ok();
        out << csv::join_row({to_string(r.model), to_string(r.mode), std::to_string(r.n), std::to_string(r.d1),
                              std::to_string(r.d2), csv::format_double(r.eta1), csv::format_double(r.eta2),
                              std::to_string(r.replication), to_string(r.method),
                              ok ? csv::format_double(r.err_fro) : "", ok ? csv::format_double(r.err_op) : "",
                              ok ? fmt_blocks(r.block_err_fro) : "", std::to_string(r.iterations),
                              r.converged ? "1" : "0", r.psd_floor_applied ? "1" : "0", csv::format_double(r.lambda),
                              ok ? "ok" : "failed: " + r.failure})
            << '\n';
    }
    finish(out, path);
}

void emit_csv(const std::vector<SummaryRow>& summary, const std::string& path) {
    auto out = open_out(path);
    out << csv::join_row(kSummaryHeader) << '\n';
    for (const SummaryRow& r : summary) {
        auto row = [&](const std::string& quantity, const Stat& s) {
            out << csv::join_row({std::to_string(r.n), std::to_string(r.d1), std::to_string(r.d2),
                                  csv::format_double(r.eta1), csv::format_double(r.eta2), to_string(r.method),
                                  std::to_string(r.count), std::to_string(r.failures), quantity,
                                  csv::format_double(s.mean), csv::format_double(s.sd), csv::format_double(s.se),
                                  format_mean_sd(s)})
                << '\n';
        };
        for (std::size_t k = 0; k < r.blocks.size(); ++k) row("block" + std::to_string(k + 1), r.blocks[k]);
        row("total", r.total);
        row("op", r.op);
    }
    finish(out, path);
}

void emit_csv(const std::vector<SlopeRow>& slopes, const std::string& path) {
    auto out = open_out(path);
    out << csv::join_row(kSlopesHeader) << '\n';
    for (const SlopeRow& s : slopes) {
        out << csv::join_row({to_string(s.method), std::to_string(s.d1), std::to_string(s.d2),
                              csv::format_double(s.eta1), csv::format_double(s.eta2), std::to_string(s.points),
                              csv::format_double(s.slope)})
            << '\n';
    }
    finish(out, path);
}

void emit_timing_csv(const std::vector<RunRecord>& records, const std::string& path) {
    auto out = open_out(path);
    out << csv::join_row({"n", "eta1", "eta2", "replication", "method", "wall_time"}) << '\n';
    for (const RunRecord& r : records) {
        out << csv::join_row({std::to_string(r.n), csv::format_double(r.eta1), csv::format_double(r.eta2),
                              std::to_string(r.replication), to_string(r.method), csv::format_double(r.wall_time)})
            << '\n';
    }
    finish(out, path);
}

std::vector<std::string> emit_plotdata(const std::vector<SummaryRow>& summary, const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(Errc::IoError, "cannot create " + dir);
    using Key = std::tuple<int, Eigen::Index, Eigen::Index, double, double>;
    std::map<Key, std::vector<const SummaryRow*>> series;
    std::vector<Key> order;
    for (const SummaryRow& r : summary) {
        if (r.count == 0 || !(r.total.mean > 0.0)) continue;
        const Key key{static_cast<int>(r.method), r.d1, r.d2, r.eta1, r.eta2};
        if (!series.count(key)) order.push_back(key);
        series[key].push_back(&r);
    }
    std::vector<std::string> written;
    for (const Key& key : order) {
        const auto& rows = series[key];
        const SummaryRow& first = *rows.front();
        const std::string path = (std::filesystem::path(dir) /
                                  (to_string(first.method) + "_d" + std::to_string(first.d1) + "x" +
                                   std::to_string(first.d2) + "_eta" + eta_tag(first.eta1) + "_" +
                                   eta_tag(first.eta2) + ".csv"))
                                     .string();
        auto out = open_out(path);
        out << csv::join_row(kPlotHeader) << '\n';
        const double x0 = std::log(static_cast<double>(first.n));
        const double y0 = std::log(first.total.mean);
        for (const SummaryRow* r : rows) {
            const double x = std::log(static_cast<double>(r->n));
            const double y = std::log(r->total.mean);
            const double half = y0 - 0.5 * (x - x0);
            const double sqrtlog = half + 0.5 * (std::log(x) - std::log(x0));
            out << csv::join_row({std::to_string(r->n), csv::format_double(x), csv::format_double(y),
                                  csv::format_double(half), csv::format_double(sqrtlog)})
                << '\n';
        }
        finish(out, path);
        written.push_back(path);
    }
    return written;
}

std::vector<RunRecord> read_records_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw Error(Errc::IoError, path + ": missing header");
    if (csv::split_row(line) != kRecordsHeader) throw Error(Errc::IoError, path + ": unexpected header");
    std::vector<RunRecord> out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = csv::split_row(line);
        if (f.size() != kRecordsHeader.size()) {
            throw Error(Errc::IoError, path + ":" + std::to_string(lineno) + ": wrong field count");
        }
        RunRecord r;
        r.model = f[0] == "multitask" ? Model::Multitask : Model::MatrixResponse;
        r.mode = f[1] == "heavy_both" ? PreprocessMode::HeavyBoth : PreprocessMode::HeavyResponseOnly;
        r.n = csv::parse_int(f[2]);
        r.d1 = csv::parse_int(f[3]);
        r.d2 = csv::parse_int(f[4]);
        r.eta1 = csv::parse_double(f[5]);
        r.eta2 = csv::parse_double(f[6]);
        r.replication = static_cast<int>(csv::parse_int(f[7]));
        r.method = f[8] == "robust" ? Method::Robust : Method::Standard;
        r.iterations = static_cast<int>(csv::parse_int(f[12]));
        r.converged = f[13] == "1";
        r.psd_floor_applied = f[14] == "1";
        r.lambda = csv::parse_double(f[15]);
        if (f[16] == "ok") {
            r.err_fro = csv::parse_double(f[9]);
            r.err_op = csv::parse_double(f[10]);
            std::stringstream ss(f[11]);
            std::string tok;
            while (std::getline(ss, tok, ';'))
                if (!tok.empty()) r.block_err_fro.push_back(csv::parse_double(tok));
        } else {
            const std::string prefix = "failed: ";
            r.failure = f[16].rfind(prefix, 0) == 0 ? f[16].substr(prefix.size()) : f[16];
            if (r.failure.empty()) r.failure = "failed";
        }
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace rlr
