#pragma once

#include <Eigen/Dense>

#include <functional>

namespace rlr {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

enum class NormKind { Fro, Op, Nuclear, Max };

/// Throws Errc::NonFinite if any entry is NaN or infinite.
void require_finite(const Mat& a, const char* what = "matrix");

double matrix_norm(const Mat& a, NormKind kind);

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order.
/// Each eigenvector column has its first nonzero component >= 0.
struct SymEigen {
    Vec values;
    Mat vectors;
};

/// Thin SVD, singular values descending. Columns of U are sign-normalized
/// (first nonzero component >= 0) and V follows so that A = U diag(s) V^T.
struct Svd {
    Mat u;
    Vec values;
    Mat v;
};

inline constexpr double kSymmetryTol = 1e-9;

/// Eigendecomposition of a symmetric matrix. Inputs within kSymmetryTol
/// (max-norm) of symmetric are symmetrized as (A + A^T) / 2.
SymEigen sym_eigen(const Mat& a);

Svd svd(const Mat& a);

Vec singular_values(const Mat& a);

/// V f(Lambda) V^T.
Mat apply_spectral_fn(const Mat& a, const std::function<double(double)>& f);

/// Proximal map of t * nuclear norm: U max(S - t, 0) V^T.
Mat svt(const Mat& a, double t);

/// Same as svt(), also reporting the nuclear norm of the result.
Mat svt(const Mat& a, double t, double& nuclear_out);

/// Scalar clip sign(x) * min(|x|, tau).
inline double clip(double x, double tau) {
    if (x > tau) return tau;
    if (x < -tau) return -tau;
    return x;
}

} // namespace rlr
