#pragma once

#include "rlr/mat.hpp"
#include "rlr/rng.hpp"

#include <cmath>
#include <optional>

namespace rlr {

enum class DitherKind { Uniform, Triangular };

/// Quantization resolution per stream. eta == 0 disables quantization of
/// that stream (identity map, no dither drawn).
struct QuantConfig {
    double eta1 = 0.0;
    double eta2 = 0.0;
    DitherKind dither_x = DitherKind::Triangular;
    DitherKind dither_y = DitherKind::Uniform;
};

/// Shrinkage radii; std::nullopt selects the adaptive radius. An infinite
/// radius disables shrinkage.
struct ShrinkConfig {
    std::optional<double> tau;
    std::optional<double> varpi;
};

enum class PreprocessMode { HeavyBoth, HeavyResponseOnly };

Vec shrink_l2(const Vec& v, double radius);

Vec gen_dither(Eigen::Index d, double eta, DitherKind kind, Rng& rng);

/// Q_eta(x) = eta * (floor(x / eta) + 1/2).
inline double quantize_scalar(double x, double eta) {
    return eta * (std::floor(x / eta) + 0.5);
}

/// Q_eta(v + dither) elementwise; eta == 0 returns v and ignores the dither.
Vec quantize_uniform(const Vec& v, double eta, const Vec& dither);

struct Preprocessed {
    Mat x;
    Mat y;
    double tau;    ///< covariate radius used (inf when not shrunk)
    double varpi;  ///< response radius used
};

/// Shrink-then-quantize both sample matrices (rows are samples). Dithers are
/// drawn per sample in row order: covariate dither first, then response.
Preprocessed preprocess_multitask(const Mat& x, const Mat& y, const ShrinkConfig& sc,
                                  const QuantConfig& qc, PreprocessMode mode, Rng& rng);

} // namespace rlr
