#pragma once

#include "rlr/mat.hpp"
#include "rlr/rng.hpp"

#include <string>
#include <vector>

namespace rlr {

enum class DistKind {
    GaussianIid,       ///< scale * N(0, 1) entries
    Mvt,               ///< scale * T(0, I, nu) over the whole vector (vec of a matrix)
    ScaledTIid,        ///< scale * t_nu entries
    TProductNoise,     ///< scale * Z1 Z2^T, Z1 ~ T(0, I_d1, nu), Z2 ~ T(0, I_d2, nu)
    TColumnNoise,      ///< scale * [Z_1 .. Z_d2], Z_j ~ T(0, I_d1, nu) i.i.d.
    WishartCenteredT,  ///< scale * (Z Z^T - nu/(nu-2) I), Z ~ T(0, I_d, nu)
};

struct DistSpec {
    DistKind kind = DistKind::GaussianIid;
    double nu = 0.0;
    double scale = 1.0;
};

enum class TargetKind { V7Projector, NormalizedProductBlocks, BinaryImages };

struct TargetSpec {
    TargetKind kind = TargetKind::V7Projector;
    Eigen::Index d1 = 0;
    Eigen::Index d2 = 0;
    int rank = 7;
    int blocks = 1;
    std::string path;  ///< image file for BinaryImages
};

inline constexpr Eigen::Index kImageRows = 43;
inline constexpr Eigen::Index kImageCols = 53;

/// Rows i.i.d. T_d(mu, Sigma, nu): mu + G / sqrt(W / nu), G ~ N(0, Sigma), W ~ chi2_nu.
Mat sample_mvt(Eigen::Index n, const Vec& mu, const Mat& sigma, double nu, Rng& rng);

/// V7 V7^T where V7 holds the top 7 eigenvectors of the scatter of 100
/// standard Gaussian d-vectors.
Mat make_target_v7(Eigen::Index d, Rng& rng);

/// s blocks T1 T2^T / |T1 T2^T|_F with T1 (d1 x r), T2 (d2 x r) standard normal.
std::vector<Mat> make_target_blocks(int s, Eigen::Index d1, Eigen::Index d2, int r, Rng& rng);

/// Reads matrices in the text format: a "rows cols" line, `rows` lines of
/// space separated 0/1 integers, blank line between matrices.
std::vector<Mat> read_binary_matrices(const std::string& path);

/// Four 43 x 53 binary parameter images.
std::vector<Mat> load_binary_images(const std::string& path);

void write_binary_matrices(const std::string& path, const std::vector<Mat>& mats);

/// Bundled 43 x 53 glyphs: cross, hollow square, triangle, T.
std::vector<Mat> glyph_fixtures();

/// One d-vector from a vector distribution (GaussianIid, Mvt, ScaledTIid).
Vec draw_vector(const DistSpec& spec, Eigen::Index d, Rng& rng);

/// One d1 x d2 noise matrix (any kind).
Mat draw_matrix(const DistSpec& spec, Eigen::Index d1, Eigen::Index d2, Rng& rng);

struct MultitaskData {
    Mat x;  ///< n x d1
    Mat y;  ///< n x d2
};

/// Y_i = Theta^T X_i + eps_i. Per sample: X_i drawn first, then eps_i.
MultitaskData gen_multitask_data(const Mat& theta, const DistSpec& cov, const DistSpec& noise,
                                 Eigen::Index n, Rng& rng);

struct MatrixResponseData {
    Mat x;                ///< n x s
    std::vector<Mat> ys;  ///< n responses, d1 x d2
};

/// Y_i = sum_k x_i(k) Theta_k + E_i. Per sample: x_i drawn first, then E_i.
MatrixResponseData gen_matrix_response_data(const std::vector<Mat>& thetas, const DistSpec& cov,
                                            const DistSpec& noise, Eigen::Index n, Rng& rng);

} // namespace rlr
