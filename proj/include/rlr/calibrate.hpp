#pragma once

#include "rlr/estimators.hpp"
#include "rlr/mat.hpp"

#include <optional>
#include <vector>

namespace rlr {

enum class CalibStatus {
    Converged,
    NoRoot,    ///< rhs is at or above the supremum of the LHS; tau is the lower bracket
    MaxIters,  ///< bisection budget exhausted before reaching rtol
};

struct CalibResult {
    double tau = 0.0;
    double residual = 0.0;  ///< LHS(tau) - rhs
    int iterations = 0;
    double rhs = 0.0;
    CalibStatus status = CalibStatus::Converged;
};

inline constexpr double kCalibRtol = 1e-6;
inline constexpr int kCalibMaxIters = 200;

/// log(2d) + log(n)
double rhs_cov(Eigen::Index n, Eigen::Index d);

/// 4 log(d1 + d2) + 4 log(n)
double rhs_tau_k(Eigen::Index n, Eigen::Index d1, Eigen::Index d2);

/// || tau^-4 sum (|X_i|^2 ^ tau^2)^2 X_i X_i^T / |X_i|^2 ||_op; zero rows contribute nothing.
double tau_cov_lhs(const Mat& x, double tau);

/// Adaptive covariate radius: solves tau_cov_lhs(x, tau) = rhs by bisection.
CalibResult calibrate_tau_cov(const Mat& x);
CalibResult calibrate_tau_cov(const Mat& x, double rhs);

/// || tau^-2 sum psi_tau(F(x_i Y_i))^2 ||_op.
double tau_k_lhs(const Vec& xk, const ResponseSpectra& spectra, double tau);

/// Truncation level for one covariate column of the matrix-response model.
CalibResult calibrate_tau_k(const Vec& xk, const std::vector<Mat>& ys);
CalibResult calibrate_tau_k(const Vec& xk, const ResponseSpectra& spectra,
                            std::optional<double> rhs = std::nullopt);

} // namespace rlr
