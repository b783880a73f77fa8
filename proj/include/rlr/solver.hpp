#pragma once

#include "rlr/mat.hpp"

#include <vector>

namespace rlr {

struct SolveOpts {
    double lambda = 0.0;
    int max_iters = 5000;
    /// Relative objective decrease over `window` iterations, and relative
    /// iterate change in the last step, must both fall below tol.
    double tol = 1e-9;
    int window = 5;
    bool acceleration = true;
};

struct SolveResult {
    std::vector<Mat> theta;  ///< one block for the multi-task program
    std::vector<double> objective_trace;
    int iterations = 0;
    bool converged = false;
    bool psd_floor_applied = false;
};

/// tr(T^T Sxx T) - 2 tr(T^T Sxy) + lambda |T|_*
double objective_multitask(const Mat& theta, const Mat& sxx, const Mat& sxy, double lambda);

/// Gradient of the smooth part: 2 Sxx T - 2 Sxy.
Mat gradient_multitask(const Mat& theta, const Mat& sxx, const Mat& sxy);

/// Accelerated proximal gradient for the nuclear-norm penalized multi-task
/// least squares program. Sxx must be PSD (apply psd_floor first).
SolveResult solve_multitask(const Mat& sxx, const Mat& sxy, const SolveOpts& opts);
SolveResult solve_multitask(const Mat& sxx, const Mat& sxy, const SolveOpts& opts, const Mat& init);

/// sum_ij Sxx_ij <T_i, T_j> - 2 sum_k <Sxy_k, T_k> + lambda sum_k |T_k|_*
double objective_matrix_response(const std::vector<Mat>& thetas, const Mat& sxx,
                                 const std::vector<Mat>& sxy, double lambda);

/// Block gradients 2 sum_j Sxx_kj T_j - 2 Sxy_k.
std::vector<Mat> gradient_matrix_response(const std::vector<Mat>& thetas, const Mat& sxx,
                                          const std::vector<Mat>& sxy);

SolveResult solve_matrix_response(const Mat& sxx, const std::vector<Mat>& sxy, const SolveOpts& opts);
SolveResult solve_matrix_response(const Mat& sxx, const std::vector<Mat>& sxy, const SolveOpts& opts,
                                  const std::vector<Mat>& init);

} // namespace rlr
