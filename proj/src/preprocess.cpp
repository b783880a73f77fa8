#include "rlr/preprocess.hpp"

#include "rlr/calibrate.hpp"
#include "rlr/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace rlr {

Vec shrink_l2(const Vec& v, double radius) {
    if (!(radius > 0.0)) throw Error(Errc::NonPositiveRadius, "radius = " + std::to_string(radius));
    const double norm = v.norm();
    if (norm <= radius) return v;
    return (radius / norm) * v;
}

Vec gen_dither(Eigen::Index d, double eta, DitherKind kind, Rng& rng) {
    if (!(eta > 0.0)) throw Error(Errc::NonPositiveEta, "eta = " + std::to_string(eta));
    const double h = 0.5 * eta;
    Vec out(d);
    for (Eigen::Index j = 0; j < d; ++j) out(j) = rng.uniform(-h, h);
    if (kind == DitherKind::Triangular) {
        for (Eigen::Index j = 0; j < d; ++j) out(j) += rng.uniform(-h, h);
    }
    return out;
}

Vec quantize_uniform(const Vec& v, double eta, const Vec& dither) {
    if (eta < 0.0) throw Error(Errc::NonPositiveEta, "eta must be nonnegative");
    if (eta == 0.0) return v;
    if (dither.size() != v.size()) {
        throw Error(Errc::DitherLengthMismatch,
                    std::to_string(dither.size()) + " vs " + std::to_string(v.size()));
    }
    Vec out(v.size());
    for (Eigen::Index j = 0; j < v.size(); ++j) out(j) = quantize_scalar(v(j) + dither(j), eta);
    return out;
}

namespace {

double resolve_radius(const std::optional<double>& r, const Mat& samples) {
    if (r) return *r;
    return calibrate_tau_cov(samples).tau;
}

} // namespace

Preprocessed preprocess_multitask(const Mat& x, const Mat& y, const ShrinkConfig& sc,
                                  const QuantConfig& qc, PreprocessMode mode, Rng& rng) {
    if (x.rows() != y.rows()) {
        throw Error(Errc::SampleCountMismatch,
                    std::to_string(x.rows()) + " vs " + std::to_string(y.rows()));
    }
    if (qc.eta1 < 0.0 || qc.eta2 < 0.0) throw Error(Errc::NonPositiveEta, "eta must be nonnegative");

    const double inf = std::numeric_limits<double>::infinity();
    const double tau = mode == PreprocessMode::HeavyBoth ? resolve_radius(sc.tau, x) : inf;
    const double varpi = resolve_radius(sc.varpi, y);

    Preprocessed out{Mat(x.rows(), x.cols()), Mat(y.rows(), y.cols()), tau, varpi};
    const Vec no_dither_x = Vec::Zero(x.cols());
    const Vec no_dither_y = Vec::Zero(y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const Vec xi = std::isinf(tau) ? Vec(x.row(i).transpose()) : shrink_l2(x.row(i).transpose(), tau);
        const Vec yi = std::isinf(varpi) ? Vec(y.row(i).transpose()) : shrink_l2(y.row(i).transpose(), varpi);
        const Vec dx = qc.eta1 > 0.0 ? gen_dither(x.cols(), qc.eta1, qc.dither_x, rng) : no_dither_x;
        const Vec dy = qc.eta2 > 0.0 ? gen_dither(y.cols(), qc.eta2, qc.dither_y, rng) : no_dither_y;
        out.x.row(i) = quantize_uniform(xi, qc.eta1, dx).transpose();
        out.y.row(i) = quantize_uniform(yi, qc.eta2, dy).transpose();
    }
    return out;
}

} // namespace rlr
