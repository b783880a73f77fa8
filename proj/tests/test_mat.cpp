#include "doctest.h"
#include "test_util.hpp"

#include "rlr/exact_sum.hpp"
#include "rlr/mat.hpp"

#include <algorithm>
#include <random>

using namespace rlr;
using namespace rlr_test;

TEST_CASE("matrix_norm on diagonal and zero matrices") {
    Mat a = Mat::Zero(2, 2);
    a(0, 0) = 3;
    a(1, 1) = 4;
    CHECK(matrix_norm(a, NormKind::Fro) == doctest::Approx(5.0).epsilon(1e-15));
    a(1, 1) = -4;
    CHECK(matrix_norm(a, NormKind::Op) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(matrix_norm(a, NormKind::Nuclear) == doctest::Approx(7.0).epsilon(1e-14));
    CHECK(matrix_norm(a, NormKind::Max) == 4.0);
    const Mat z = Mat::Zero(3, 5);
    for (NormKind k : {NormKind::Fro, NormKind::Op, NormKind::Nuclear, NormKind::Max}) CHECK(matrix_norm(z, k) == 0.0);
}

TEST_CASE("matrix_norm ordering and triangle inequality") {
    Rng rng(11);
    for (int t = 0; t < 100; ++t) {
        const Mat a = gaussian(5, 3, rng), b = gaussian(5, 3, rng);
        const double op = matrix_norm(a, NormKind::Op), fro = matrix_norm(a, NormKind::Fro),
                     nuc = matrix_norm(a, NormKind::Nuclear);
        CHECK(op <= fro * (1 + 1e-12));
        CHECK(fro <= nuc * (1 + 1e-12));
        CHECK(op == doctest::Approx(oracle_op(a)).epsilon(1e-10));
        CHECK(nuc == doctest::Approx(oracle_nuclear(a)).epsilon(1e-10));
        for (NormKind k : {NormKind::Fro, NormKind::Op, NormKind::Nuclear, NormKind::Max}) {
            CHECK(matrix_norm(a + b, k) <= (matrix_norm(a, k) + matrix_norm(b, k)) * (1 + 1e-12));
        }
    }
}

TEST_CASE("non-finite input is rejected") {
    Mat a = Mat::Identity(2, 2);
    a(0, 1) = std::nan("");
    CHECK(error_code([&] { matrix_norm(a, NormKind::Fro); }) == Errc::NonFinite);
    a(0, 1) = INFINITY;
    CHECK(error_code([&] { svt(a, 1.0); }) == Errc::NonFinite);
}

TEST_CASE("sym_eigen examples") {
    Mat a = Mat::Zero(2, 2);
    a(0, 0) = 2;
    a(1, 1) = -1;
    SymEigen e = sym_eigen(a);
    CHECK(e.values(0) == doctest::Approx(2.0));
    CHECK(e.values(1) == doctest::Approx(-1.0));

    Mat s(2, 2);
    s << 0, 1, 1, 0;
    e = sym_eigen(s);
    CHECK(e.values(0) == doctest::Approx(1.0));
    CHECK(e.values(1) == doctest::Approx(-1.0));

    CHECK(error_code([] { sym_eigen(Mat::Zero(2, 3)); }) == Errc::NotSquare);
    Mat ns = Mat::Identity(3, 3);
    ns(0, 2) = 1e-6;
    CHECK(error_code([&] { sym_eigen(ns); }) == Errc::NotSymmetric);
    ns(0, 2) = 1e-10;
    CHECK_NOTHROW(sym_eigen(ns));
}

TEST_CASE("sym_eigen invariants on random symmetric matrices") {
    Rng rng(12);
    for (int t = 0; t < 50; ++t) {
        const Eigen::Index d = 2 + t % 9;
        const Mat a = random_symmetric(d, rng);
        const SymEigen e = sym_eigen(a);
        const Mat vtv = e.vectors.transpose() * e.vectors;
        CHECK((vtv - Mat::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-10);
        const Mat rec = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
        CHECK((rec - a).norm() <= 1e-8 * (1 + a.norm()));
        for (Eigen::Index i = 0; i + 1 < d; ++i) CHECK(e.values(i) >= e.values(i + 1));
        for (Eigen::Index j = 0; j < d; ++j) {
            const auto col = e.vectors.col(j);
            Eigen::Index first = 0;
            while (std::abs(col(first)) <= 1e-12) ++first;
            CHECK(col(first) > 0.0);
        }
    }
}

TEST_CASE("svd invariants") {
    Rng rng(13);
    for (int t = 0; t < 50; ++t) {
        const Eigen::Index r = 1 + t % 7, c = 1 + (t * 3) % 5;
        const Mat a = gaussian(r, c, rng);
        const Svd f = svd(a);
        const Mat rec = f.u * f.values.asDiagonal() * f.v.transpose();
        CHECK((rec - a).norm() <= 1e-8 * (1 + a.norm()));
        for (Eigen::Index i = 0; i < f.values.size(); ++i) {
            CHECK(f.values(i) >= 0.0);
            if (i + 1 < f.values.size()) CHECK(f.values(i) >= f.values(i + 1));
        }
        const Vec oracle = oracle_singular_values(a);
        for (Eigen::Index i = 0; i < f.values.size(); ++i) CHECK(f.values(i) == doctest::Approx(oracle(i)).epsilon(1e-9));
        CHECK((singular_values(a) - f.values).norm() <= 1e-12);
    }
}

TEST_CASE("apply_spectral_fn examples") {
    Rng rng(14);
    const Mat a = random_symmetric(6, rng);
    CHECK((apply_spectral_fn(a, [](double x) { return x; }) - a).cwiseAbs().maxCoeff() <= 1e-9);

    Mat d = Mat::Zero(2, 2);
    d(0, 0) = 2;
    d(1, 1) = -0.5;
    Mat expect = Mat::Zero(2, 2);
    expect(0, 0) = 1;
    expect(1, 1) = -0.5;
    CHECK((apply_spectral_fn(d, [](double x) { return clip(x, 1.0); }) - expect).norm() <= 1e-12);

    Mat s(2, 2);
    s << 0, 1, 1, 0;
    CHECK((apply_spectral_fn(s, [](double x) { return x * x; }) - Mat::Identity(2, 2)).norm() <= 1e-12);
}

TEST_CASE("apply_spectral_fn commutes and maps the spectrum") {
    Rng rng(15);
    for (int t = 0; t < 50; ++t) {
        const Mat a = random_symmetric(5, rng);
        const auto f = [](double x) { return std::tanh(x) + 0.3 * x * x; };
        const Mat fa = apply_spectral_fn(a, f);
        CHECK((fa * a - a * fa).norm() <= 1e-9);
        Eigen::SelfAdjointEigenSolver<Mat> ea(a), efa(fa);
        std::vector<double> mapped, got;
        for (Eigen::Index i = 0; i < 5; ++i) {
            mapped.push_back(f(ea.eigenvalues()(i)));
            got.push_back(efa.eigenvalues()(i));
        }
        std::sort(mapped.begin(), mapped.end());
        std::sort(got.begin(), got.end());
        for (int i = 0; i < 5; ++i) CHECK(got[i] == doctest::Approx(mapped[i]).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("spectral clip bounds the operator norm") {
    Rng rng(16);
    for (int t = 0; t < 200; ++t) {
        const Mat a = random_symmetric(1 + t % 8, rng) * std::exp(rng.normal() * 3);
        const double tau = std::exp(rng.normal());
        const Mat c = apply_spectral_fn(a, [tau](double x) { return clip(x, tau); });
        CHECK(matrix_norm(c, NormKind::Op) <= tau * (1 + 1e-12));
    }
}

TEST_CASE("svt examples") {
    Mat a = Mat::Zero(2, 2);
    a(0, 0) = 3;
    a(1, 1) = 1;
    Mat expect = Mat::Zero(2, 2);
    expect(0, 0) = 1;
    CHECK((svt(a, 2.0) - expect).norm() <= 1e-12);

    Rng rng(17);
    const Mat g = gaussian(6, 4, rng);
    CHECK((svt(g, 0.0) - g).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(svt(g, matrix_norm(g, NormKind::Op)).norm() <= 1e-12);

    double nuc = -1;
    const Mat z = svt(g, 0.7, nuc);
    CHECK(nuc == doctest::Approx(oracle_nuclear(z)).epsilon(1e-10));
    CHECK(matrix_norm(z, NormKind::Op) == doctest::Approx(std::max(oracle_op(g) - 0.7, 0.0)).epsilon(1e-10));
    const Vec s = oracle_singular_values(g);
    Eigen::Index expected_rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) expected_rank += s(i) > 0.7 ? 1 : 0;
    const Vec sz = oracle_singular_values(z);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sz.size(); ++i) rank += sz(i) > 1e-9 ? 1 : 0;
    CHECK(rank == expected_rank);
}

namespace {

double prox_objective(const Mat& z, const Mat& a, double t) {
    return 0.5 * (z - a).squaredNorm() + t * oracle_nuclear(z);
}

// Subgradient descent with Polyak-free diminishing steps, started from A.
// Converges slowly but relies only on the objective's definition.
Mat subgradient_oracle(const Mat& a, double t, int iters) {
    Mat z = a, best = a;
    double best_f = prox_objective(a, a, t);
    for (int k = 1; k <= iters; ++k) {
        Eigen::JacobiSVD<Mat> js(z, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Mat sub = Mat::Zero(z.rows(), z.cols());
        for (Eigen::Index i = 0; i < js.singularValues().size(); ++i) {
            if (js.singularValues()(i) > 1e-12) sub += js.matrixU().col(i) * js.matrixV().col(i).transpose();
        }
        const Mat grad = (z - a) + t * sub;
        z -= grad * (0.5 / std::sqrt(static_cast<double>(k)));
        const double f = prox_objective(z, a, t);
        if (f < best_f) {
            best_f = f;
            best = z;
        }
    }
    return best;
}

} // namespace

TEST_CASE("svt minimizes the nuclear-norm proximal objective on 4x4") {
    Rng rng(18);
    for (int inst = 0; inst < 20; ++inst) {
        const Mat a = gaussian(4, 4, rng);
        const double t = 0.2 + rng.uniform() * 1.5;
        const Mat z = svt(a, t);
        const double f = prox_objective(z, a, t);

        // Optimality certificate: A - Z = t (U V^T + W) with the residual's
        // operator norm at most t and alignment on the support of Z.
        const Mat r = a - z;
        CHECK(oracle_op(r) <= t * (1 + 1e-9));
        CHECK((r.cwiseProduct(z)).sum() == doctest::Approx(t * oracle_nuclear(z)).epsilon(1e-9).scale(1.0));

        // Brute-force scan of a grid of perturbations around the solution.
        double worst = 0.0;
        for (int dir = 0; dir < 200; ++dir) {
            const Mat e = gaussian(4, 4, rng);
            for (double h : {1e-1, 1e-2, 1e-3, 1e-4}) {
                worst = std::min(worst, prox_objective(z + h * e / e.norm(), a, t) - f);
            }
        }
        CHECK(worst >= -1e-12);

        const Mat sg = subgradient_oracle(a, t, 4000);
        CHECK(f <= prox_objective(sg, a, t) + 1e-12);
        CHECK(prox_objective(sg, a, t) - f <= 1e-2);
    }
}

TEST_CASE("ExactSum is exact and order independent") {
    std::vector<double> v;
    Rng rng(19);
    for (int i = 0; i < 5000; ++i) v.push_back(rng.normal() * std::exp(rng.normal() * 10));
    v.push_back(1e300);
    v.push_back(-1e300);
    v.push_back(5e-324);
    ExactSum a;
    for (double x : v) a.add(x);
    std::mt19937_64 g(3);
    for (int rep = 0; rep < 5; ++rep) {
        std::shuffle(v.begin(), v.end(), g);
        ExactSum b;
        for (double x : v) b += x;
        CHECK(b.value() == a.value());
    }
    ExactSum c;
    c += 1.0;
    c += 1e-30;
    c += -1.0;
    CHECK(c.value() == 1e-30);
    ExactSum z;
    CHECK(z.value() == 0.0);
    ExactSum neg;
    neg += -2.5;
    neg += 0.25;
    CHECK(neg.value() == -2.25);
}
