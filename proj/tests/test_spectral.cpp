#include "hyperlab/spectral.hpp"

#include "test_support.hpp"

#include "doctest.h"
#include <unsupported/Eigen/MatrixFunctions>

#include <numbers>
#include <random>

using namespace hyperlab;

namespace {

Mat rot(double theta) {
    Mat r(2, 2);
    r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return r;
}

/// Block-diagonal orthogonal matrix from explicit angles and +-1 counts, then conjugated by q.
Mat assemble(const std::vector<double>& angles, int p, int q, const Mat& conj) {
    const int n = 2 * static_cast<int>(angles.size()) + p + q;
    Mat d = Mat::Zero(n, n);
    int k = 0;
    for (double a : angles) {
        d.block(k, k, 2, 2) = rot(a);
        k += 2;
    }
    for (int i = 0; i < p; ++i, ++k) d(k, k) = 1.0;
    for (int i = 0; i < q; ++i, ++k) d(k, k) = -1.0;
    return conj * d * conj.transpose();
}

}  // namespace

TEST_CASE("identity has only a +1 eigenspace") {
    const auto d = orthogonal_block_decomposition(Mat::Identity(4, 4));
    CHECK(d.plus_dim == 4);
    CHECK(d.minus_dim == 0);
    CHECK(d.angles.empty());
}

TEST_CASE("a plane rotation is one block with its angle") {
    const auto d = orthogonal_block_decomposition(rot(std::numbers::pi / 3));
    REQUIRE(d.angles.size() == 1);
    CHECK(d.angles[0] == doctest::Approx(std::numbers::pi / 3).epsilon(1e-14));
    // Clockwise rotation reports the same positive angle after flipping a frame vector.
    const auto back = orthogonal_block_decomposition(rot(-1.0));
    CHECK(back.angles[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK((back.frame.transpose() * rot(-1.0) * back.frame - rot(1.0)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("random orthogonal matrices round-trip through the normal form") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        const Mat t = testing::random_orthogonal(rng, 9);
        const auto d = orthogonal_block_decomposition(t);
        CHECK((d.frame * d.normal_form() * d.frame.transpose() - t).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK((d.frame.transpose() * d.frame - Mat::Identity(9, 9)).cwiseAbs().maxCoeff() <= 1e-9);
        CHECK(std::is_sorted(d.angles.begin(), d.angles.end()));
        CHECK(2 * static_cast<int>(d.angles.size()) + d.plus_dim + d.minus_dim == 9);
        for (double a : d.angles) CHECK((a > 0.0 && a < std::numbers::pi));
    }
}

TEST_CASE("designed spectra are recovered") {
    std::mt19937_64 rng(4);
    const Mat q = testing::random_orthogonal(rng, 9);
    const Mat t = assemble({2.0, 0.5, 0.5}, 2, 1, q);
    const auto d = orthogonal_block_decomposition(t);
    REQUIRE(d.angles.size() == 3);
    CHECK(d.angles[0] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(d.angles[2] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(d.plus_dim == 2);
    CHECK(d.minus_dim == 1);
    const auto classes = angle_classes(d);
    REQUIRE(classes.size() == 2);
    CHECK(classes[0].multiplicity == 2);

    // A rotation by pi - 1e-9 sits inside the -1 cluster.
    const auto near_pi = orthogonal_block_decomposition(rot(std::numbers::pi - 1e-9));
    CHECK(near_pi.minus_dim == 2);
}

TEST_CASE("non-orthogonal input is rejected") {
    Mat t = Mat::Identity(3, 3);
    t(0, 1) = 1e-6;
    CHECK_THROWS_WITH_AS(orthogonal_block_decomposition(t), doctest::Contains("non-orthogonal"), Error);
}

TEST_CASE("centralizer dimension on small examples") {
    CHECK(centralizer_algebra(Mat::Identity(5, 5)).dim == 10);
    CHECK(centralizer_algebra(rot(0.83)).dim == 1);

    std::mt19937_64 rng(6);
    const Mat q6 = testing::random_orthogonal(rng, 6);
    CHECK(centralizer_algebra(assemble({0.3, 1.1, 2.4}, 0, 0, q6)).dim == 3);
    const Mat q4 = testing::random_orthogonal(rng, 4);
    CHECK(centralizer_algebra(assemble({0.7, 0.7}, 0, 0, q4)).dim == 4);
}

TEST_CASE("null-space count matches the closed form on seeded matrices") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> size_pick(1, 12);
    std::uniform_real_distribution<double> angle_pick(0.05, std::numbers::pi - 0.05);
    int generic = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = size_pick(rng);
        Mat t;
        if (trial % 2 == 0) {
            t = testing::random_orthogonal(rng, n);
            ++generic;
        } else {
            // Draw angles from a small palette so classes repeat, then split the rest into +-1.
            const std::vector<double> palette{angle_pick(rng), angle_pick(rng)};
            std::vector<double> angles;
            int rest = n;
            while (rest >= 2 && rng() % 3 != 0) {
                angles.push_back(palette[rng() % 2]);
                rest -= 2;
            }
            const int p = rest == 0 ? 0 : static_cast<int>(rng() % (rest + 1));
            t = assemble(angles, p, rest - p, testing::random_orthogonal(rng, n));
        }
        const auto d = orthogonal_block_decomposition(t);
        const auto alg = centralizer_algebra(t);
        CHECK_MESSAGE(alg.dim == centralizer_dim_closed_form(d), "trial ", trial, " n=", n);
    }
    CHECK(generic == 50);
}

TEST_CASE("basis elements commute, are antisymmetric and exponentiate into the centralizer") {
    std::mt19937_64 rng(31);
    const Mat t = assemble({0.4, 0.4, 1.9}, 3, 2, testing::random_orthogonal(rng, 11));
    const auto alg = centralizer_algebra(t);
    CHECK(alg.dim == 4 + 1 + 3 + 1);
    REQUIRE(alg.basis.size() == static_cast<size_t>(alg.dim));
    for (const Mat& b : alg.basis) {
        CHECK((b * t - t * b).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK((b + b.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
        for (double s : {0.25, 0.5, 1.0}) {
            const Mat e = (s * b).exp();
            CHECK((e * t - t * e).cwiseAbs().maxCoeff() <= 1e-8);
            CHECK((e.transpose() * e - Mat::Identity(11, 11)).cwiseAbs().maxCoeff() <= 1e-8);
        }
    }
}

TEST_CASE("dimension grows with the number of distinct angles") {
    std::mt19937_64 rng(3);
    int previous = 0;
    for (int blocks = 2; blocks <= 12; blocks += 2) {
        std::vector<double> angles;
        for (int k = 0; k < blocks; ++k) angles.push_back(0.1 + 0.25 * k);
        const int dim = centralizer_algebra(assemble(angles, 0, 0, testing::random_orthogonal(rng, 2 * blocks))).dim;
        CHECK(dim == blocks);
        CHECK(dim > previous);
        previous = dim;
    }
}
