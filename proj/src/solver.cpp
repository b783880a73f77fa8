#include "rlr/solver.hpp"

#include "rlr/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rlr {

namespace {

using Blocks = std::vector<Mat>;

double inner(const Mat& a, const Mat& b) { return (a.array() * b.array()).sum(); }

void check_multitask_shapes(const Mat& sxx, const Mat& sxy) {
    if (sxx.rows() != sxx.cols()) throw Error(Errc::NotSquare, "Sxx must be square");
    if (sxy.rows() != sxx.rows()) throw Error(Errc::ShapeMismatch, "Sxy rows must match Sxx");
}

void check_block_shapes(const Mat& sxx, const Blocks& sxy) {
    if (sxx.rows() != sxx.cols()) throw Error(Errc::NotSquare, "Sxx must be square");
    if (static_cast<std::size_t>(sxx.rows()) != sxy.size()) {
        throw Error(Errc::ShapeMismatch, "block count differs from Sxx dimension");
    }
    for (const Mat& b : sxy) {
        if (b.rows() != sxy.front().rows() || b.cols() != sxy.front().cols()) {
            throw Error(Errc::ShapeMismatch, "blocks must share one shape");
        }
    }
}

// Lipschitz constant 2 |Sxx|_op after checking PSD. The tolerance is 1e-9 on
// unit-scale input and grows with |Sxx|_op beyond that.
double lipschitz(const Mat& sxx) {
    const SymEigen eig = sym_eigen(sxx);
    const double lo = eig.values(eig.values.size() - 1);
    const double hi = eig.values(0);
    if (lo < -1e-9 * std::max(1.0, std::abs(hi))) throw Error(Errc::NotPsd, "min eigenvalue " + std::to_string(lo));
    if (!(hi > 0.0)) throw Error(Errc::DegenerateData, "Sxx is zero");
    return 2.0 * hi;
}

// Quadratic block problem: f(T) = sum_ij S_ij <T_i, T_j> - 2 sum_k <B_k, T_k>.
struct BlockQuadratic {
    const Mat& s;
    const Blocks& b;

    Blocks gradient(const Blocks& t) const {
        Blocks g(t.size());
        for (std::size_t k = 0; k < t.size(); ++k) {
            g[k] = -2.0 * b[k];
            for (std::size_t j = 0; j < t.size(); ++j) {
                const double c = s(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
                if (c != 0.0) g[k] += 2.0 * c * t[j];
            }
        }
        return g;
    }

    double value(const Blocks& t) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            for (std::size_t j = 0; j < t.size(); ++j) {
                acc += s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * inner(t[i], t[j]);
            }
            acc -= 2.0 * inner(b[i], t[i]);
        }
        return acc;
    }
};

// Multi-task program written with a single block: S = Sxx acts from the left.
struct LeftQuadratic {
    const Mat& s;
    const Mat& b;

    Blocks gradient(const Blocks& t) const { return {2.0 * (s * t[0]) - 2.0 * b}; }
    double value(const Blocks& t) const { return inner(t[0], s * t[0]) - 2.0 * inner(b, t[0]); }
};

double blocks_norm(const Blocks& t) {
    double acc = 0.0;
    for (const Mat& m : t) acc += m.squaredNorm();
    return std::sqrt(acc);
}

double blocks_dist(const Blocks& a, const Blocks& b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += (a[k] - b[k]).squaredNorm();
    return std::sqrt(acc);
}

template <class Smooth>
double prox_step(const Smooth& f, const Blocks& from, double step, double lambda, Blocks& to) {
    const Blocks g = f.gradient(from);
    to.resize(from.size());
    double nuclear = 0.0;
    for (std::size_t k = 0; k < from.size(); ++k) {
        double nk = 0.0;
        to[k] = svt(from[k] - step * g[k], step * lambda, nk);
        nuclear += nk;
    }
    return f.value(to) + lambda * nuclear;
}

template <class Smooth>
SolveResult run_apg(const Smooth& f, double lip, Blocks x, const SolveOpts& opts) {
    if (opts.lambda < 0.0) throw Error(Errc::SpecError, "lambda must be nonnegative");
    if (!(opts.tol > 0.0)) throw Error(Errc::SpecError, "tol must be positive");
    const double step = 1.0 / lip;
    const int window = std::max(1, opts.window);

    double nuclear = 0.0;
    for (const Mat& m : x) nuclear += matrix_norm(m, NormKind::Nuclear);
    double fx = f.value(x) + opts.lambda * nuclear;

    SolveResult res;
    res.objective_trace.push_back(fx);
    Blocks y = x;
    Blocks z;
    double t = 1.0;
    for (int it = 1; it <= opts.max_iters; ++it) {
        double fz = prox_step(f, y, step, opts.lambda, z);
        if (fz > fx) {
            // Restart from the last accepted iterate with a plain step.
            t = 1.0;
            fz = prox_step(f, x, step, opts.lambda, z);
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double dx = blocks_dist(z, x);
        if (opts.acceleration) {
            const double mom = (t - 1.0) / t_next;
            y.resize(z.size());
            for (std::size_t k = 0; k < z.size(); ++k) y[k] = z[k] + mom * (z[k] - x[k]);
        } else {
            y = z;
        }
        x.swap(z);
        fx = fz;
        t = t_next;
        res.objective_trace.push_back(fx);
        res.iterations = it;

        if (it >= window) {
            const double prev = res.objective_trace[res.objective_trace.size() - 1 - static_cast<std::size_t>(window)];
            const bool flat = (prev - fx) <= opts.tol * std::max(1.0, std::abs(fx));
            const bool still = dx <= opts.tol * std::max(1.0, blocks_norm(x));
            if (flat && still) {
                res.converged = true;
                break;
            }
        }
    }
    res.theta = std::move(x);
    return res;
}

} // namespace

double objective_multitask(const Mat& theta, const Mat& sxx, const Mat& sxy, double lambda) {
    check_multitask_shapes(sxx, sxy);
    if (theta.rows() != sxy.rows() || theta.cols() != sxy.cols()) {
        throw Error(Errc::ShapeMismatch, "theta shape differs from Sxy");
    }
    const LeftQuadratic f{sxx, sxy};
    return f.value({theta}) + lambda * matrix_norm(theta, NormKind::Nuclear);
}

Mat gradient_multitask(const Mat& theta, const Mat& sxx, const Mat& sxy) {
    check_multitask_shapes(sxx, sxy);
    return 2.0 * (sxx * theta) - 2.0 * sxy;
}

SolveResult solve_multitask(const Mat& sxx, const Mat& sxy, const SolveOpts& opts) {
    return solve_multitask(sxx, sxy, opts, Mat::Zero(sxy.rows(), sxy.cols()));
}

SolveResult solve_multitask(const Mat& sxx, const Mat& sxy, const SolveOpts& opts, const Mat& init) {
    check_multitask_shapes(sxx, sxy);
    require_finite(sxy, "Sxy");
    if (init.rows() != sxy.rows() || init.cols() != sxy.cols()) {
        throw Error(Errc::ShapeMismatch, "initial point shape differs from Sxy");
    }
    const LeftQuadratic f{sxx, sxy};
    return run_apg(f, lipschitz(sxx), Blocks{init}, opts);
}

double objective_matrix_response(const std::vector<Mat>& thetas, const Mat& sxx,
                                 const std::vector<Mat>& sxy, double lambda) {
    check_block_shapes(sxx, sxy);
    if (thetas.size() != sxy.size()) throw Error(Errc::ShapeMismatch, "block count mismatch");
    const BlockQuadratic f{sxx, sxy};
    double nuclear = 0.0;
    for (const Mat& t : thetas) {
        if (t.rows() != sxy.front().rows() || t.cols() != sxy.front().cols()) {
            throw Error(Errc::ShapeMismatch, "theta block shape differs from Sxy blocks");
        }
        nuclear += matrix_norm(t, NormKind::Nuclear);
    }
    return f.value(thetas) + lambda * nuclear;
}

std::vector<Mat> gradient_matrix_response(const std::vector<Mat>& thetas, const Mat& sxx,
                                          const std::vector<Mat>& sxy) {
    check_block_shapes(sxx, sxy);
    if (thetas.size() != sxy.size()) throw Error(Errc::ShapeMismatch, "block count mismatch");
    return BlockQuadratic{sxx, sxy}.gradient(thetas);
}

SolveResult solve_matrix_response(const Mat& sxx, const std::vector<Mat>& sxy, const SolveOpts& opts) {
    check_block_shapes(sxx, sxy);
    Blocks init;
    for (const Mat& b : sxy) init.push_back(Mat::Zero(b.rows(), b.cols()));
    return solve_matrix_response(sxx, sxy, opts, init);
}

SolveResult solve_matrix_response(const Mat& sxx, const std::vector<Mat>& sxy, const SolveOpts& opts,
                                  const std::vector<Mat>& init) {
    check_block_shapes(sxx, sxy);
    if (init.size() != sxy.size()) throw Error(Errc::ShapeMismatch, "initial block count mismatch");
    for (std::size_t k = 0; k < sxy.size(); ++k) {
        require_finite(sxy[k], "Sxy block");
        if (init[k].rows() != sxy[k].rows() || init[k].cols() != sxy[k].cols()) {
            throw Error(Errc::ShapeMismatch, "initial block shape mismatch");
        }
    }
    const BlockQuadratic f{sxx, sxy};
    return run_apg(f, lipschitz(sxx), init, opts);
}

} // namespace rlr
