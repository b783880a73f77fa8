#include "rlr/estimators.hpp"

#include "rlr/error.hpp"
#include "rlr/exact_sum.hpp"

#include <algorithm>
#include <string>

namespace rlr {

namespace {

// Entrywise exact accumulator for a matrix of sums.
class MatSum {
public:
    MatSum(Eigen::Index rows, Eigen::Index cols)
        : rows_(rows), cols_(cols), sums_(static_cast<std::size_t>(rows * cols)) {}

    ExactSum& at(Eigen::Index i, Eigen::Index j) {
        return sums_[static_cast<std::size_t>(j * rows_ + i)];
    }

    void add(const Mat& m) {
        for (Eigen::Index j = 0; j < cols_; ++j)
            for (Eigen::Index i = 0; i < rows_; ++i) at(i, j).add(m(i, j));
    }

    Mat mean(double n) const {
        Mat out(rows_, cols_);
        for (Eigen::Index j = 0; j < cols_; ++j)
            for (Eigen::Index i = 0; i < rows_; ++i)
                out(i, j) = sums_[static_cast<std::size_t>(j * rows_ + i)].value() / n;
        return out;
    }

private:
    Eigen::Index rows_, cols_;
    std::vector<ExactSum> sums_;
};

Mat second_moment(const Mat& x) {
    const Eigen::Index d = x.cols();
    MatSum acc(d, d);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index k = 0; k < d; ++k)
            for (Eigen::Index j = 0; j <= k; ++j) acc.at(j, k).add(x(i, j) * x(i, k));
    Mat out = acc.mean(static_cast<double>(x.rows()));
    out.triangularView<Eigen::StrictlyLower>() = out.transpose().triangularView<Eigen::StrictlyLower>();
    return out;
}

void require_tau(double tau) {
    if (!(tau > 0.0)) throw Error(Errc::NonPositiveTau, "tau = " + std::to_string(tau));
}

} // namespace

Mat sigma_xx_tilde(const Mat& xq, double eta1) {
    if (xq.rows() == 0) throw Error(Errc::EmptySample, "no samples");
    require_finite(xq, "quantized covariates");
    Mat out = second_moment(xq);
    out.diagonal().array() -= 0.25 * eta1 * eta1;
    return out;
}

Mat sigma_xy_tilde(const Mat& xq, const Mat& yq) {
    if (xq.rows() != yq.rows()) {
        throw Error(Errc::SampleCountMismatch,
                    std::to_string(xq.rows()) + " vs " + std::to_string(yq.rows()));
    }
    if (xq.rows() == 0) throw Error(Errc::EmptySample, "no samples");
    require_finite(xq, "quantized covariates");
    require_finite(yq, "quantized responses");
    MatSum acc(xq.cols(), yq.cols());
    for (Eigen::Index i = 0; i < xq.rows(); ++i)
        for (Eigen::Index k = 0; k < yq.cols(); ++k)
            for (Eigen::Index j = 0; j < xq.cols(); ++j) acc.at(j, k).add(xq(i, j) * yq(i, k));
    return acc.mean(static_cast<double>(xq.rows()));
}

Mat sample_cov(const Mat& x) {
    if (x.rows() == 0) throw Error(Errc::EmptySample, "no samples");
    require_finite(x, "samples");
    return second_moment(x);
}

Mat dilation(const Mat& b) {
    const Eigen::Index d1 = b.rows(), d2 = b.cols();
    Mat out = Mat::Zero(d1 + d2, d1 + d2);
    out.topRightCorner(d1, d2) = b;
    out.bottomLeftCorner(d2, d1) = b.transpose();
    return out;
}

Mat minsker_cross_moment(const Vec& xk, const std::vector<Mat>& ys, double tau_k) {
    require_tau(tau_k);
    if (static_cast<std::size_t>(xk.size()) != ys.size()) {
        throw Error(Errc::ShapeMismatch, "covariate count differs from response count");
    }
    if (ys.empty()) throw Error(Errc::EmptySample, "no samples");
    const Eigen::Index d1 = ys.front().rows(), d2 = ys.front().cols();
    MatSum acc(d1, d2);
    for (std::size_t i = 0; i < ys.size(); ++i) {
        if (ys[i].rows() != d1 || ys[i].cols() != d2) throw Error(Errc::ShapeMismatch, "response shapes differ");
        const Mat clipped = apply_spectral_fn(dilation(xk(static_cast<Eigen::Index>(i)) * ys[i]),
                                              [tau_k](double v) { return clip(v, tau_k); });
        acc.add(clipped.topRightCorner(d1, d2));
    }
    return acc.mean(static_cast<double>(ys.size()));
}

ResponseSpectra response_spectra(const std::vector<Mat>& ys) {
    if (ys.empty()) throw Error(Errc::EmptySample, "no samples");
    ResponseSpectra out;
    out.rows = ys.front().rows();
    out.cols = ys.front().cols();
    out.svds.reserve(ys.size());
    for (const Mat& y : ys) {
        if (y.rows() != out.rows || y.cols() != out.cols) throw Error(Errc::ShapeMismatch, "response shapes differ");
        out.svds.push_back(svd(y));
    }
    return out;
}

Mat minsker_cross_moment(const Vec& xk, const ResponseSpectra& spectra, double tau_k) {
    require_tau(tau_k);
    if (static_cast<std::size_t>(xk.size()) != spectra.svds.size()) {
        throw Error(Errc::ShapeMismatch, "covariate count differs from response count");
    }
    if (spectra.svds.empty()) throw Error(Errc::EmptySample, "no samples");
    MatSum acc(spectra.rows, spectra.cols);
    for (std::size_t i = 0; i < spectra.svds.size(); ++i) {
        const Svd& f = spectra.svds[i];
        const double x = xk(static_cast<Eigen::Index>(i));
        const double ax = std::abs(x);
        Vec s(f.values.size());
        for (Eigen::Index j = 0; j < s.size(); ++j) s(j) = std::min(ax * f.values(j), tau_k);
        Mat term = f.u * s.asDiagonal() * f.v.transpose();
        if (x < 0.0) term = -term;
        acc.add(term);
    }
    return acc.mean(static_cast<double>(spectra.svds.size()));
}

Mat cross_moment(const Vec& xk, const std::vector<Mat>& ys) {
    if (static_cast<std::size_t>(xk.size()) != ys.size()) {
        throw Error(Errc::ShapeMismatch, "covariate count differs from response count");
    }
    if (ys.empty()) throw Error(Errc::EmptySample, "no samples");
    MatSum acc(ys.front().rows(), ys.front().cols());
    for (std::size_t i = 0; i < ys.size(); ++i) {
        if (ys[i].rows() != ys.front().rows() || ys[i].cols() != ys.front().cols()) {
            throw Error(Errc::ShapeMismatch, "response shapes differ");
        }
        acc.add(xk(static_cast<Eigen::Index>(i)) * ys[i]);
    }
    return acc.mean(static_cast<double>(ys.size()));
}

Mat psd_floor(const Mat& s, double floor) {
    const SymEigen eig = sym_eigen(s);
    if (eig.values.size() == 0 || eig.values(eig.values.size() - 1) >= floor) return s;
    const Vec clipped = eig.values.cwiseMax(floor);
    Mat out = eig.vectors * clipped.asDiagonal() * eig.vectors.transpose();
    return 0.5 * (out + out.transpose());
}

double min_eigenvalue(const Mat& s) {
    const SymEigen eig = sym_eigen(s);
    return eig.values.size() ? eig.values(eig.values.size() - 1) : 0.0;
}

} // namespace rlr
