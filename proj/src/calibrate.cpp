#include "rlr/calibrate.hpp"

#include "rlr/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <tuple>
#include <vector>

namespace rlr {

namespace {

double top_eigenvalue(const Mat& gram) {
    if (gram.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(gram, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(gram.rows() - 1);
}

// Geometric bisection for a nonincreasing lhs. `scale` is the largest
// per-sample magnitude; the bracket starts at [1e-8 scale, scale].
CalibResult bisect(const std::function<double(double)>& lhs, double rhs, double scale) {
    CalibResult out;
    out.rhs = rhs;
    double lo = 1e-8 * scale;
    double hi = scale;
    const double f_lo = lhs(lo) - rhs;
    if (f_lo <= 0.0) {
        out.tau = lo;
        out.residual = f_lo;
        out.status = CalibStatus::NoRoot;
        return out;
    }
    double f_hi = lhs(hi) - rhs;
    for (int k = 0; k < 60 && f_hi > 0.0; ++k) {
        lo = hi;
        hi *= 2.0;
        f_hi = lhs(hi) - rhs;
    }
    if (f_hi > 0.0) {
        out.tau = hi;
        out.residual = f_hi;
        out.status = CalibStatus::MaxIters;
        return out;
    }
    if (std::abs(f_hi) <= kCalibRtol * rhs) {
        out.tau = hi;
        out.residual = f_hi;
        return out;
    }
    for (int it = 1; it <= kCalibMaxIters; ++it) {
        const double mid = std::sqrt(lo * hi);
        const double f_mid = lhs(mid) - rhs;
        out.iterations = it;
        out.tau = mid;
        out.residual = f_mid;
        if (std::abs(f_mid) <= kCalibRtol * rhs) return out;
        if (!(mid > lo && mid < hi)) break;
        if (f_mid > 0.0) lo = mid;
        else hi = mid;
    }
    out.status = CalibStatus::MaxIters;
    return out;
}

struct CovData {
    const Mat* x;
    Vec sq_norms;
    double max_norm;
};

CovData cov_data(const Mat& x) {
    if (x.rows() == 0) throw Error(Errc::EmptySample, "no samples");
    require_finite(x, "samples");
    CovData d{&x, x.rowwise().squaredNorm(), 0.0};
    d.max_norm = std::sqrt(d.sq_norms.maxCoeff());
    if (!(d.max_norm > 0.0)) throw Error(Errc::DegenerateData, "all sample rows are zero");
    return d;
}

double cov_lhs(const CovData& d, double tau) {
    const double t2 = tau * tau;
    Vec w(d.sq_norms.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        const double s = d.sq_norms(i);
        if (s == 0.0) {
            w(i) = 0.0;
            continue;
        }
        const double r = std::min(s / t2, 1.0);
        w(i) = r / std::sqrt(s);  // sqrt of r^2 / |X_i|^2
    }
    const Mat scaled = d.x->array().colwise() * w.array();
    return top_eigenvalue(scaled.transpose() * scaled);
}

// Singular triplets of all x_i Y_i stacked column-wise, with |x_i| folded into
// the singular values. psi_tau(F(B))^2 = blockdiag(U m U^T, W m W^T) with
// m = min(S, tau)^2, so the LHS is the larger top eigenvalue of the two sums.
// Columns are sorted by singular value; chunked prefix sums of sigma^2 u u^T
// and suffix sums of u u^T leave one partial chunk per evaluation.
class StackedSpectra {
public:
    StackedSpectra(const Vec& xk, const ResponseSpectra& spectra) {
        if (static_cast<std::size_t>(xk.size()) != spectra.svds.size()) {
            throw Error(Errc::ShapeMismatch, "covariate count differs from response count");
        }
        if (spectra.svds.empty()) throw Error(Errc::EmptySample, "no samples");
        struct Col {
            double sigma;
            std::size_t i;
            Eigen::Index j;
        };
        std::vector<Col> cols;
        for (std::size_t i = 0; i < spectra.svds.size(); ++i) {
            const double ax = std::abs(xk(static_cast<Eigen::Index>(i)));
            const Vec& sv = spectra.svds[i].values;
            for (Eigen::Index j = 0; j < sv.size(); ++j)
                if (ax * sv(j) > 0.0) cols.push_back({ax * sv(j), i, j});
        }
        std::sort(cols.begin(), cols.end(), [](const Col& a, const Col& b) {
            return std::tie(a.sigma, a.i, a.j) < std::tie(b.sigma, b.i, b.j);
        });
        const auto total = static_cast<Eigen::Index>(cols.size());
        u_.resize(spectra.rows, total);
        w_.resize(spectra.cols, total);
        sigma_.resize(total);
        for (Eigen::Index c = 0; c < total; ++c) {
            const Svd& f = spectra.svds[cols[c].i];
            u_.col(c) = f.u.col(cols[c].j);
            w_.col(c) = f.v.col(cols[c].j);
            sigma_(c) = cols[c].sigma;
        }
        const Eigen::Index chunks = (total + kChunk - 1) / kChunk;
        for (Eigen::Index b = 0; b <= chunks; ++b) {
            lower_u_.push_back(Mat::Zero(u_.rows(), u_.rows()));
            lower_w_.push_back(Mat::Zero(w_.rows(), w_.rows()));
            upper_u_.push_back(Mat::Zero(u_.rows(), u_.rows()));
            upper_w_.push_back(Mat::Zero(w_.rows(), w_.rows()));
        }
        for (Eigen::Index b = 0; b < chunks; ++b) {
            const Eigen::Index c0 = b * kChunk, len = std::min(kChunk, total - c0);
            const Mat su = u_.middleCols(c0, len) * sigma_.segment(c0, len).asDiagonal();
            const Mat sw = w_.middleCols(c0, len) * sigma_.segment(c0, len).asDiagonal();
            lower_u_[b + 1] = lower_u_[b] + su * su.transpose();
            lower_w_[b + 1] = lower_w_[b] + sw * sw.transpose();
        }
        for (Eigen::Index b = chunks - 1; b >= 0; --b) {
            const Eigen::Index c0 = b * kChunk, len = std::min(kChunk, total - c0);
            const auto u = u_.middleCols(c0, len);
            const auto w = w_.middleCols(c0, len);
            upper_u_[b] = upper_u_[b + 1] + u * u.transpose();
            upper_w_[b] = upper_w_[b + 1] + w * w.transpose();
        }
    }

    Eigen::Index size() const { return sigma_.size(); }
    double max_sigma() const { return sigma_(sigma_.size() - 1); }

    double lhs(double tau) const {
        const Eigen::Index total = sigma_.size();
        // First column with sigma >= tau; those are clipped to tau.
        const auto p = static_cast<Eigen::Index>(
            std::lower_bound(sigma_.data(), sigma_.data() + total, tau) - sigma_.data());
        const Eigen::Index b = p / kChunk, c0 = b * kChunk, len = p - c0;
        const double inv = 1.0 / (tau * tau);
        Mat mu = lower_u_[b];
        Mat mw = lower_w_[b];
        Mat cu = upper_u_[b];
        Mat cw = upper_w_[b];
        if (len > 0) {
            const auto u = u_.middleCols(c0, len);
            const auto w = w_.middleCols(c0, len);
            const Mat su = u * sigma_.segment(c0, len).asDiagonal();
            const Mat sw = w * sigma_.segment(c0, len).asDiagonal();
            mu.noalias() += su * su.transpose();
            mw.noalias() += sw * sw.transpose();
            cu.noalias() -= u * u.transpose();
            cw.noalias() -= w * w.transpose();
        }
        return std::max(top_eigenvalue(inv * mu + cu), top_eigenvalue(inv * mw + cw));
    }

private:
    static constexpr Eigen::Index kChunk = 256;
    Mat u_;
    Mat w_;
    Vec sigma_;
    std::vector<Mat> lower_u_;
    std::vector<Mat> lower_w_;
    std::vector<Mat> upper_u_;
    std::vector<Mat> upper_w_;
};

} // namespace

double rhs_cov(Eigen::Index n, Eigen::Index d) {
    return std::log(2.0 * static_cast<double>(d)) + std::log(static_cast<double>(n));
}

double rhs_tau_k(Eigen::Index n, Eigen::Index d1, Eigen::Index d2) {
    return 4.0 * std::log(static_cast<double>(d1 + d2)) + 4.0 * std::log(static_cast<double>(n));
}

double tau_cov_lhs(const Mat& x, double tau) {
    if (!(tau > 0.0)) throw Error(Errc::NonPositiveTau, "tau = " + std::to_string(tau));
    return cov_lhs(cov_data(x), tau);
}

CalibResult calibrate_tau_cov(const Mat& x) { return calibrate_tau_cov(x, rhs_cov(x.rows(), x.cols())); }

CalibResult calibrate_tau_cov(const Mat& x, double rhs) {
    const CovData d = cov_data(x);
    return bisect([&d](double tau) { return cov_lhs(d, tau); }, rhs, d.max_norm);
}

double tau_k_lhs(const Vec& xk, const ResponseSpectra& spectra, double tau) {
    if (!(tau > 0.0)) throw Error(Errc::NonPositiveTau, "tau = " + std::to_string(tau));
    const StackedSpectra st(xk, spectra);
    if (st.size() == 0) return 0.0;
    return st.lhs(tau);
}

CalibResult calibrate_tau_k(const Vec& xk, const std::vector<Mat>& ys) {
    return calibrate_tau_k(xk, response_spectra(ys));
}

CalibResult calibrate_tau_k(const Vec& xk, const ResponseSpectra& spectra, std::optional<double> rhs) {
    const StackedSpectra st(xk, spectra);
    if (st.size() == 0) throw Error(Errc::DegenerateData, "all x_i Y_i are zero");
    const double target =
        rhs ? *rhs : rhs_tau_k(static_cast<Eigen::Index>(spectra.svds.size()), spectra.rows, spectra.cols);
    return bisect([&st](double tau) { return st.lhs(tau); }, target, st.max_sigma());
}

} // namespace rlr
