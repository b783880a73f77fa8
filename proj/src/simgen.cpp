#include "rlr/simgen.hpp"

#include "rlr/error.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace rlr {

namespace {

void require_nu(double nu, double min_exclusive = 0.0) {
    if (!(nu > min_exclusive)) {
        throw Error(Errc::BadNu, "nu = " + std::to_string(nu) + " must exceed " + std::to_string(min_exclusive));
    }
}

Vec standard_normal(Eigen::Index d, Rng& rng) {
    Vec z(d);
    for (Eigen::Index j = 0; j < d; ++j) z(j) = rng.normal();
    return z;
}

// T(0, I_d, nu)
Vec standard_mvt(Eigen::Index d, double nu, Rng& rng) {
    Vec z = standard_normal(d, rng);
    return z / std::sqrt(rng.chi2(nu) / nu);
}

} // namespace

Mat sample_mvt(Eigen::Index n, const Vec& mu, const Mat& sigma, double nu, Rng& rng) {
    require_nu(nu);
    const Eigen::Index d = mu.size();
    if (sigma.rows() != d || sigma.cols() != d) throw Error(Errc::ShapeMismatch, "Sigma must be d x d");
    const SymEigen eig = sym_eigen(sigma);
    if (d > 0 && eig.values(d - 1) < -1e-9) throw Error(Errc::NotPsd, "Sigma is not PSD");
    const Mat root = eig.vectors * eig.values.cwiseMax(0.0).cwiseSqrt().asDiagonal();
    Mat out(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vec g = root * standard_normal(d, rng);
        out.row(i) = (mu + g / std::sqrt(rng.chi2(nu) / nu)).transpose();
    }
    return out;
}

Mat make_target_v7(Eigen::Index d, Rng& rng) {
    if (d < 7) throw Error(Errc::DimTooSmall, "d = " + std::to_string(d) + " < 7");
    Mat z(100, d);
    for (Eigen::Index i = 0; i < 100; ++i)
        for (Eigen::Index j = 0; j < d; ++j) z(i, j) = rng.normal();
    const SymEigen eig = sym_eigen(z.transpose() * z / 100.0);
    const Mat v7 = eig.vectors.leftCols(7);
    Mat theta = v7 * v7.transpose();
    return 0.5 * (theta + theta.transpose());
}

std::vector<Mat> make_target_blocks(int s, Eigen::Index d1, Eigen::Index d2, int r, Rng& rng) {
    if (r < 1 || r > std::min(d1, d2)) throw Error(Errc::BadRank, "rank " + std::to_string(r));
    std::vector<Mat> out;
    out.reserve(static_cast<std::size_t>(s));
    for (int k = 0; k < s; ++k) {
        Mat a(d1, r), b(d2, r);
        for (Eigen::Index j = 0; j < r; ++j)
            for (Eigen::Index i = 0; i < d1; ++i) a(i, j) = rng.normal();
        for (Eigen::Index j = 0; j < r; ++j)
            for (Eigen::Index i = 0; i < d2; ++i) b(i, j) = rng.normal();
        Mat p = a * b.transpose();
        p /= p.norm();
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<Mat> read_binary_matrices(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open " + path);
    std::vector<Mat> out;
    std::string line;
    int lineno = 0;
    auto next_nonblank = [&](std::string& l) {
        while (std::getline(in, l)) {
            ++lineno;
            if (l.find_first_not_of(" \t\r") != std::string::npos) return true;
        }
        return false;
    };
    while (next_nonblank(line)) {
        std::istringstream hs(line);
        long rows = 0, cols = 0;
        std::string extra;
        if (!(hs >> rows >> cols) || (hs >> extra) || rows <= 0 || cols <= 0) {
            throw Error(Errc::BadShape, path + ":" + std::to_string(lineno) + ": bad header");
        }
        Mat m(rows, cols);
        for (long i = 0; i < rows; ++i) {
            if (!std::getline(in, line)) throw Error(Errc::BadShape, path + ": truncated matrix");
            ++lineno;
            std::istringstream rs(line);
            std::string tok;
            long j = 0;
            while (rs >> tok) {
                if (j >= cols) throw Error(Errc::BadShape, path + ":" + std::to_string(lineno) + ": too many entries");
                if (tok == "0" || tok == "1") {
                    m(i, j) = tok == "1" ? 1.0 : 0.0;
                } else {
                    throw Error(Errc::NonBinaryEntry, path + ":" + std::to_string(lineno) + ": '" + tok + "'");
                }
                ++j;
            }
            if (j != cols) throw Error(Errc::BadShape, path + ":" + std::to_string(lineno) + ": too few entries");
        }
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<Mat> load_binary_images(const std::string& path) {
    std::vector<Mat> mats = read_binary_matrices(path);
    if (mats.size() != 4) throw Error(Errc::BadShape, "expected 4 images, found " + std::to_string(mats.size()));
    for (const Mat& m : mats) {
        if (m.rows() != kImageRows || m.cols() != kImageCols) {
            throw Error(Errc::BadShape, "image is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
        }
    }
    return mats;
}

void write_binary_matrices(const std::string& path, const std::vector<Mat>& mats) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::IoError, "cannot write " + path);
    for (std::size_t k = 0; k < mats.size(); ++k) {
        const Mat& m = mats[k];
        if (k > 0) out << '\n';
        out << m.rows() << ' ' << m.cols() << '\n';
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                if (m(i, j) != 0.0 && m(i, j) != 1.0) throw Error(Errc::NonBinaryEntry, "entry is not 0/1");
                out << (j ? " " : "") << (m(i, j) == 1.0 ? '1' : '0');
            }
            out << '\n';
        }
    }
    if (!out) throw Error(Errc::IoError, "write failed for " + path);
}

std::vector<Mat> glyph_fixtures() {
    const Eigen::Index rows = kImageRows, cols = kImageCols;
    std::vector<Mat> g(4, Mat::Zero(rows, cols));
    // cross
    g[0].block(18, 6, 7, 41).setOnes();
    g[0].block(5, 23, 33, 7).setOnes();
    // hollow square
    g[1].block(7, 12, 29, 29).setOnes();
    g[1].block(13, 18, 17, 17).setZero();
    // filled triangle, apex at the top
    for (Eigen::Index i = 6; i < 37; ++i) {
        const Eigen::Index half = (i - 6) * 20 / 30;
        g[2].block(i, 26 - half, 1, 2 * half + 1).setOnes();
    }
    // T
    g[3].block(6, 8, 7, 37).setOnes();
    g[3].block(13, 23, 24, 7).setOnes();
    return g;
}

Vec draw_vector(const DistSpec& spec, Eigen::Index d, Rng& rng) {
    Vec v(d);
    switch (spec.kind) {
    case DistKind::GaussianIid:
        v = standard_normal(d, rng);
        break;
    case DistKind::Mvt:
        require_nu(spec.nu);
        v = standard_mvt(d, spec.nu, rng);
        break;
    case DistKind::ScaledTIid:
        require_nu(spec.nu);
        for (Eigen::Index j = 0; j < d; ++j) v(j) = rng.student_t(spec.nu);
        break;
    default:
        throw Error(Errc::ShapeMismatch, "distribution kind produces matrices, not vectors");
    }
    return spec.scale * v;
}

Mat draw_matrix(const DistSpec& spec, Eigen::Index d1, Eigen::Index d2, Rng& rng) {
    Mat m(d1, d2);
    switch (spec.kind) {
    case DistKind::GaussianIid:
    case DistKind::Mvt:
    case DistKind::ScaledTIid: {
        const Vec v = draw_vector(DistSpec{spec.kind, spec.nu, 1.0}, d1 * d2, rng);
        m = Eigen::Map<const Mat>(v.data(), d1, d2);
        break;
    }
    case DistKind::TProductNoise: {
        require_nu(spec.nu);
        const Vec z1 = standard_mvt(d1, spec.nu, rng);
        const Vec z2 = standard_mvt(d2, spec.nu, rng);
        m = z1 * z2.transpose();
        break;
    }
    case DistKind::TColumnNoise:
        require_nu(spec.nu);
        for (Eigen::Index j = 0; j < d2; ++j) m.col(j) = standard_mvt(d1, spec.nu, rng);
        break;
    case DistKind::WishartCenteredT: {
        require_nu(spec.nu, 2.0);
        if (d1 != d2) throw Error(Errc::ShapeMismatch, "centered Wishart noise needs d1 == d2");
        const Vec z = standard_mvt(d1, spec.nu, rng);
        m = z * z.transpose();
        m.diagonal().array() -= spec.nu / (spec.nu - 2.0);
        break;
    }
    }
    return spec.scale * m;
}

MultitaskData gen_multitask_data(const Mat& theta, const DistSpec& cov, const DistSpec& noise,
                                 Eigen::Index n, Rng& rng) {
    const Eigen::Index d1 = theta.rows(), d2 = theta.cols();
    MultitaskData out{Mat(n, d1), Mat(n, d2)};
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vec x = draw_vector(cov, d1, rng);
        const Vec e = draw_vector(noise, d2, rng);
        out.x.row(i) = x.transpose();
        out.y.row(i) = (theta.transpose() * x + e).transpose();
    }
    return out;
}

MatrixResponseData gen_matrix_response_data(const std::vector<Mat>& thetas, const DistSpec& cov,
                                            const DistSpec& noise, Eigen::Index n, Rng& rng) {
    if (thetas.empty()) throw Error(Errc::ShapeMismatch, "no parameter blocks");
    const auto s = static_cast<Eigen::Index>(thetas.size());
    const Eigen::Index d1 = thetas.front().rows(), d2 = thetas.front().cols();
    for (const Mat& t : thetas) {
        if (t.rows() != d1 || t.cols() != d2) throw Error(Errc::ShapeMismatch, "blocks must share one shape");
    }
    MatrixResponseData out{Mat(n, s), {}};
    out.ys.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vec x = draw_vector(cov, s, rng);
        out.x.row(i) = x.transpose();
        Mat y = draw_matrix(noise, d1, d2, rng);
        for (Eigen::Index k = 0; k < s; ++k) y += x(k) * thetas[static_cast<std::size_t>(k)];
        out.ys.push_back(std::move(y));
    }
    return out;
}

} // namespace rlr
