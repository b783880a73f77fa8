#include "doctest.h"
#include "test_util.hpp"

#include "rlr/solver.hpp"

#include <cmath>

using namespace rlr;
using namespace rlr_test;

namespace {

double smooth_multitask(const Mat& t, const Mat& sxx, const Mat& sxy) {
    return (t.transpose() * sxx * t).trace() - 2.0 * (t.transpose() * sxy).trace();
}

double smooth_blocks(const std::vector<Mat>& t, const Mat& sxx, const std::vector<Mat>& sxy) {
    double f = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        for (std::size_t j = 0; j < t.size(); ++j) f += sxx(i, j) * t[i].cwiseProduct(t[j]).sum();
        f -= 2.0 * sxy[i].cwiseProduct(t[i]).sum();
    }
    return f;
}

SolveOpts opts(double lambda, double tol = 1e-12, int iters = 20000) {
    SolveOpts o;
    o.lambda = lambda;
    o.tol = tol;
    o.max_iters = iters;
    return o;
}

} // namespace

TEST_CASE("multitask objective examples") {
    Rng rng(61);
    const Mat sxx = random_psd(4, rng), sxy = gaussian(4, 3, rng);
    CHECK(objective_multitask(Mat::Zero(4, 3), sxx, sxy, 0.7) == 0.0);
    const Mat t = gaussian(4, 3, rng);
    const Mat id = Mat::Identity(4, 4);
    CHECK(objective_multitask(t, id, sxy, 0.0) ==
          doctest::Approx((t - sxy).squaredNorm() - sxy.squaredNorm()).epsilon(1e-12));
    CHECK(objective_multitask(t, sxx, sxy, 0.5) ==
          doctest::Approx(smooth_multitask(t, sxx, sxy) + 0.5 * oracle_nuclear(t)).epsilon(1e-12));
    CHECK(error_code([&] { objective_multitask(t, sxx, gaussian(3, 3, rng), 0.1); }) == Errc::ShapeMismatch);
}

TEST_CASE("multitask gradient matches central differences") {
    Rng rng(62);
    for (int inst = 0; inst < 10; ++inst) {
        const Mat sxx = random_symmetric(4, rng), sxy = gaussian(4, 3, rng), t = gaussian(4, 3, rng);
        const Mat g = gradient_multitask(t, sxx, sxy);
        const double h = 1e-5;
        for (Eigen::Index i = 0; i < 4; ++i)
            for (Eigen::Index j = 0; j < 3; ++j) {
                Mat tp = t, tm = t;
                tp(i, j) += h;
                tm(i, j) -= h;
                const double fd = (smooth_multitask(tp, sxx, sxy) - smooth_multitask(tm, sxx, sxy)) / (2 * h);
                CHECK(std::abs(fd - g(i, j)) <= 1e-5 * (1 + std::abs(g(i, j))));
            }
    }
}

TEST_CASE("solve_multitask closed forms") {
    Rng rng(63);
    const Mat sxy = gaussian(5, 3, rng);
    SolveResult r = solve_multitask(Mat::Identity(5, 5), sxy, opts(0.0));
    CHECK((r.theta[0] - sxy).norm() <= 1e-8);
    CHECK(r.converged);

    Mat s(2, 2);
    s << 3, 0, 0, 1;
    Mat expect = Mat::Zero(2, 2);
    expect(0, 0) = 2;
    r = solve_multitask(Mat::Identity(2, 2), s, opts(2.0));
    CHECK((r.theta[0] - expect).norm() <= 1e-8);

    for (int inst = 0; inst < 20; ++inst) {
        const Mat b = gaussian(6, 4, rng);
        const double lambda = 0.5 + rng.uniform();
        r = solve_multitask(Mat::Identity(6, 6), b, opts(lambda));
        CHECK((r.theta[0] - svt(b, lambda / 2.0)).norm() <= 1e-8);
    }
}

TEST_CASE("solve_multitask agrees with a grid oracle on a 2x1 problem") {
    Mat sxx = Mat::Zero(2, 2);
    sxx(0, 0) = 2;
    sxx(1, 1) = 1;
    Rng rng(64);
    for (int inst = 0; inst < 5; ++inst) {
        const Mat sxy = gaussian(2, 1, rng) * 2.0;
        const double lambda = 0.3 + rng.uniform();
        const auto f = [&](double a, double b) {
            Mat t(2, 1);
            t << a, b;
            return smooth_multitask(t, sxx, sxy) + lambda * std::hypot(a, b);
        };
        double ca = 0, cb = 0, width = 8.0, best = f(0, 0);
        for (int zoom = 0; zoom < 40; ++zoom) {
            double ba = ca, bb = cb;
            for (int i = -50; i <= 50; ++i)
                for (int j = -50; j <= 50; ++j) {
                    const double a = ca + width * i / 50.0, b = cb + width * j / 50.0;
                    const double v = f(a, b);
                    if (v < best) {
                        best = v;
                        ba = a;
                        bb = b;
                    }
                }
            ca = ba;
            cb = bb;
            width *= 0.2;
        }
        const SolveResult r = solve_multitask(sxx, sxy, opts(lambda));
        const double got = objective_multitask(r.theta[0], sxx, sxy, lambda);
        CHECK(std::abs(got - best) <= 1e-6);
        CHECK(got <= best + 1e-12);
    }
}

TEST_CASE("solve_multitask properties") {
    Rng rng(65);
    for (int inst = 0; inst < 10; ++inst) {
        const Mat sxx = random_psd(6, rng), sxy = gaussian(6, 5, rng);
        const double lambda = 0.2 + rng.uniform();
        const SolveResult r = solve_multitask(sxx, sxy, opts(lambda));
        REQUIRE(r.converged);
        const Mat& t = r.theta[0];

        for (std::size_t k = 2; k < r.objective_trace.size(); ++k)
            CHECK(r.objective_trace[k] <= r.objective_trace[k - 1] + 1e-12 * (1 + std::abs(r.objective_trace[k - 1])));
        CHECK(objective_multitask(t, sxx, sxy, lambda) <= 0.0);

        // 0 in 2 Sxx T - 2 Sxy + lambda d|T|_*.
        const Mat g = gradient_multitask(t, sxx, sxy);
        CHECK(oracle_op(g) <= lambda * (1 + 1e-4));
        CHECK(-g.cwiseProduct(t).sum() == doctest::Approx(lambda * oracle_nuclear(t)).epsilon(1e-4));

        const SolveResult r2 = solve_multitask(sxx, sxy, opts(lambda), gaussian(6, 5, rng) * 3.0);
        CHECK(r2.converged);
        CHECK(objective_multitask(r2.theta[0], sxx, sxy, lambda) ==
              doctest::Approx(objective_multitask(t, sxx, sxy, lambda)).epsilon(1e-9));
        CHECK((r2.theta[0] - t).norm() <= 1e-4 * std::max(t.norm(), 1e-12) + 1e-9);

        SolveOpts plain = opts(lambda);
        plain.acceleration = false;
        const SolveResult r3 = solve_multitask(sxx, sxy, plain);
        CHECK(objective_multitask(r3.theta[0], sxx, sxy, lambda) ==
              doctest::Approx(objective_multitask(t, sxx, sxy, lambda)).epsilon(1e-7));
    }
}

TEST_CASE("large lambda gives zero, bad inputs are rejected") {
    Rng rng(66);
    const Mat sxy = gaussian(4, 4, rng);
    const double lam = 2.0 * oracle_op(sxy);
    CHECK(solve_multitask(Mat::Identity(4, 4), sxy, opts(1.25 * lam)).theta[0].norm() == 0.0);
    CHECK(solve_multitask(Mat::Identity(4, 4), sxy, opts(lam)).theta[0].norm() <= 1e-12);

    Mat neg = Mat::Identity(4, 4);
    neg(3, 3) = -1e-6;
    CHECK(error_code([&] { solve_multitask(neg, sxy, opts(0.1)); }) == Errc::NotPsd);
    neg(3, 3) = -1e-12;
    CHECK_NOTHROW(solve_multitask(neg, sxy, opts(0.1)));
    CHECK(error_code([&] { solve_multitask(Mat::Zero(4, 4), sxy, opts(0.1)); }) == Errc::DegenerateData);
    CHECK(error_code([&] { solve_multitask(Mat::Identity(3, 3), sxy, opts(0.1)); }) == Errc::ShapeMismatch);
    Mat asym = Mat::Identity(4, 4);
    asym(0, 1) = 0.5;
    CHECK(error_code([&] { solve_multitask(asym, sxy, opts(0.1)); }) == Errc::NotSymmetric);
}

TEST_CASE("iteration budget is reported through the flag") {
    Rng rng(67);
    const Mat sxx = random_psd(8, rng) + 1e-3 * Mat::Identity(8, 8);
    const SolveResult r = solve_multitask(sxx, gaussian(8, 8, rng), opts(0.01, 1e-15, 3));
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 3);
}

TEST_CASE("matrix-response objective and gradient") {
    Rng rng(68);
    const Mat sxx = random_psd(3, rng);
    std::vector<Mat> sxy, t;
    for (int k = 0; k < 3; ++k) {
        sxy.push_back(gaussian(4, 2, rng));
        t.push_back(gaussian(4, 2, rng));
    }
    const std::vector<Mat> zeros(3, Mat::Zero(4, 2));
    CHECK(objective_matrix_response(zeros, sxx, sxy, 0.9) == 0.0);
    double nuc = 0.0;
    for (const Mat& m : t) nuc += oracle_nuclear(m);
    CHECK(objective_matrix_response(t, sxx, sxy, 0.3) ==
          doctest::Approx(smooth_blocks(t, sxx, sxy) + 0.3 * nuc).epsilon(1e-12));

    // s = 1 reduces to the multi-task objective with Sxx = c I.
    CHECK(objective_matrix_response({t[0]}, Mat::Constant(1, 1, 1.7), {sxy[0]}, 0.4) ==
          doctest::Approx(objective_multitask(t[0], 1.7 * Mat::Identity(4, 4), sxy[0], 0.4)).epsilon(1e-12));

    const std::vector<Mat> g = gradient_matrix_response(t, sxx, sxy);
    const double h = 1e-5;
    for (int k = 0; k < 3; ++k)
        for (Eigen::Index i = 0; i < 4; ++i)
            for (Eigen::Index j = 0; j < 2; ++j) {
                auto tp = t, tm = t;
                tp[k](i, j) += h;
                tm[k](i, j) -= h;
                const double fd = (smooth_blocks(tp, sxx, sxy) - smooth_blocks(tm, sxx, sxy)) / (2 * h);
                CHECK(std::abs(fd - g[k](i, j)) <= 1e-5 * (1 + std::abs(g[k](i, j))));
            }

    CHECK(error_code([&] { objective_matrix_response(t, Mat::Identity(2, 2), sxy, 0.1); }) == Errc::ShapeMismatch);
    auto bad = sxy;
    bad[1] = Mat::Zero(3, 3);
    CHECK(error_code([&] { objective_matrix_response(t, sxx, bad, 0.1); }) == Errc::ShapeMismatch);
}

TEST_CASE("solve_matrix_response closed forms") {
    Rng rng(69);
    const Mat y = gaussian(3, 4, rng);
    SolveResult r = solve_matrix_response(Mat::Identity(1, 1), {y}, opts(0.0));
    CHECK((r.theta[0] - y).norm() <= 1e-8);

    std::vector<Mat> sxy;
    for (int k = 0; k < 4; ++k) sxy.push_back(gaussian(5, 6, rng));
    r = solve_matrix_response(Mat::Identity(4, 4), sxy, opts(1.3));
    for (int k = 0; k < 4; ++k) CHECK((r.theta[k] - svt(sxy[k], 0.65)).norm() <= 1e-8);

    Mat sxx(2, 2);
    sxx << 2, 1, 1, 2;
    for (int inst = 0; inst < 10; ++inst) {
        const std::vector<Mat> b{gaussian(3, 3, rng), gaussian(3, 3, rng)};
        r = solve_matrix_response(sxx, b, opts(0.0));
        // Direct solve of sum_j Sxx_kj T_j = B_k.
        const Mat inv = sxx.inverse();
        for (int k = 0; k < 2; ++k) {
            const Mat expect = inv(k, 0) * b[0] + inv(k, 1) * b[1];
            CHECK((r.theta[k] - expect).norm() <= 1e-7);
        }
    }
}

TEST_CASE("solve_matrix_response optimality and initialization invariance") {
    Rng rng(70);
    for (int inst = 0; inst < 5; ++inst) {
        const Mat sxx = random_psd(4, rng);
        std::vector<Mat> sxy, init;
        for (int k = 0; k < 4; ++k) {
            sxy.push_back(gaussian(6, 5, rng));
            init.push_back(gaussian(6, 5, rng));
        }
        const double lambda = 0.3 + rng.uniform();
        const SolveResult r = solve_matrix_response(sxx, sxy, opts(lambda));
        REQUIRE(r.converged);
        const auto g = gradient_matrix_response(r.theta, sxx, sxy);
        for (int k = 0; k < 4; ++k) {
            CHECK(oracle_op(g[k]) <= lambda * (1 + 1e-4));
            CHECK(-g[k].cwiseProduct(r.theta[k]).sum() ==
                  doctest::Approx(lambda * oracle_nuclear(r.theta[k])).epsilon(1e-4).scale(1e-6));
        }
        const SolveResult r2 = solve_matrix_response(sxx, sxy, opts(lambda), init);
        CHECK(objective_matrix_response(r2.theta, sxx, sxy, lambda) ==
              doctest::Approx(objective_matrix_response(r.theta, sxx, sxy, lambda)).epsilon(1e-9));
        for (int k = 0; k < 4; ++k) CHECK((r2.theta[k] - r.theta[k]).norm() <= 1e-4 * (1 + r.theta[k].norm()));
        for (std::size_t k = 2; k < r.objective_trace.size(); ++k)
            CHECK(r.objective_trace[k] <= r.objective_trace[k - 1] + 1e-12 * (1 + std::abs(r.objective_trace[k - 1])));
    }
}
