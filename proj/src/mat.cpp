#include "rlr/mat.hpp"

#include "rlr/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rlr {

namespace {

// Flip each column so its first component above roundoff is nonnegative.
// Returns the applied signs.
Vec normalize_column_signs(Mat& m) {
    Vec signs = Vec::Ones(m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double scale = m.col(j).cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (std::abs(m(i, j)) > 1e-12 * scale) {
                if (m(i, j) < 0) {
                    m.col(j) *= -1.0;
                    signs(j) = -1.0;
                }
                break;
            }
        }
    }
    return signs;
}

Mat symmetrized(const Mat& a) {
    if (a.rows() != a.cols()) {
        throw Error(Errc::NotSquare, std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
    require_finite(a);
    const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    if (a.size() > 0 && asym > kSymmetryTol) {
        throw Error(Errc::NotSymmetric, "max |A - A^T| = " + std::to_string(asym));
    }
    return 0.5 * (a + a.transpose());
}

} // namespace

void require_finite(const Mat& a, const char* what) {
    if (!a.allFinite()) throw Error(Errc::NonFinite, std::string(what) + " has non-finite entries");
}

double matrix_norm(const Mat& a, NormKind kind) {
    if (a.size() == 0) return 0.0;
    require_finite(a);
    switch (kind) {
    case NormKind::Fro: return a.norm();
    case NormKind::Max: return a.cwiseAbs().maxCoeff();
    case NormKind::Op: return singular_values(a)(0);
    case NormKind::Nuclear: return singular_values(a).sum();
    }
    return 0.0;
}

SymEigen sym_eigen(const Mat& a) {
    const Mat s = symmetrized(a);
    Eigen::SelfAdjointEigenSolver<Mat> es(s);
    SymEigen out;
    out.values = es.eigenvalues().reverse();
    out.vectors = es.eigenvectors().rowwise().reverse();
    normalize_column_signs(out.vectors);
    return out;
}

Svd svd(const Mat& a) {
    require_finite(a);
    Eigen::BDCSVD<Mat> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Svd out{dec.matrixU(), dec.singularValues(), dec.matrixV()};
    const Vec signs = normalize_column_signs(out.u);
    out.v = out.v * signs.asDiagonal();
    return out;
}

Vec singular_values(const Mat& a) {
    require_finite(a);
    if (a.size() == 0) return Vec();
    Eigen::BDCSVD<Mat> dec(a);
    return dec.singularValues();
}

Mat apply_spectral_fn(const Mat& a, const std::function<double(double)>& f) {
    const SymEigen eig = sym_eigen(a);
    Vec fv(eig.values.size());
    for (Eigen::Index i = 0; i < fv.size(); ++i) fv(i) = f(eig.values(i));
    Mat out = eig.vectors * fv.asDiagonal() * eig.vectors.transpose();
    return 0.5 * (out + out.transpose());
}

Mat svt(const Mat& a, double t, double& nuclear_out) {
    const Svd dec = svd(a);
    Vec shrunk = (dec.values.array() - t).max(0.0).matrix();
    nuclear_out = shrunk.sum();
    Eigen::Index k = 0;
    while (k < shrunk.size() && shrunk(k) > 0.0) ++k;
    if (k == 0) return Mat::Zero(a.rows(), a.cols());
    return dec.u.leftCols(k) * shrunk.head(k).asDiagonal() * dec.v.leftCols(k).transpose();
}

Mat svt(const Mat& a, double t) {
    double unused = 0.0;
    return svt(a, t, unused);
}

} // namespace rlr
