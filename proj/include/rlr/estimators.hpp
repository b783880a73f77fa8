#pragma once

#include "rlr/mat.hpp"

#include <vector>

namespace rlr {

/// (1/n) sum X~_i X~_i^T - (eta1^2 / 4) I. Symmetric, not necessarily PSD.
Mat sigma_xx_tilde(const Mat& xq, double eta1);

/// (1/n) sum X~_i Y~_i^T.
Mat sigma_xy_tilde(const Mat& xq, const Mat& yq);

/// (1/n) sum X_i X_i^T.
Mat sample_cov(const Mat& x);

/// [[0, B], [B^T, 0]].
Mat dilation(const Mat& b);

/// Spectrally truncated cross moment: the top-right block of
/// (1/n) sum psi_tau(F(x_i Y_i)), one symmetric eigendecomposition of the
/// (d1 + d2)-dimensional dilation per sample.
Mat minsker_cross_moment(const Vec& xk, const std::vector<Mat>& ys, double tau_k);

/// Thin SVDs of the responses Y_i. Since x Y = U (|x| S) (sign(x) W)^T, the
/// spectrum of every F(x_i(k) Y_i) follows from these for all covariate
/// columns k at once.
struct ResponseSpectra {
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    std::vector<Svd> svds;
};

ResponseSpectra response_spectra(const std::vector<Mat>& ys);

/// Same estimator as above computed from precomputed SVDs: the top-right
/// block of psi_tau(F(B)) equals U min(S, tau) W^T.
Mat minsker_cross_moment(const Vec& xk, const ResponseSpectra& spectra, double tau_k);

/// Plain average (1/n) sum x_i Y_i.
Mat cross_moment(const Vec& xk, const std::vector<Mat>& ys);

/// Clips eigenvalues below at `floor`.
Mat psd_floor(const Mat& s, double floor = 0.0);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Mat& s);

} // namespace rlr
