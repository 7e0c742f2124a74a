#include "doctest.h"
#include "test_support.hpp"

#include "hyperlab/bending.hpp"

#include <cmath>
#include <numbers>

using namespace hyperlab;

namespace {

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

/// Relator evaluated with LU inverses, independent of the table's cached evaluation.
Mat naive_product(const RepresentationTable& rho, const Word& w) {
    const auto n = rho.dim_spatial() + 1;
    Mat acc = Mat::Identity(n, n);
    for (int l : w.letters()) {
        const Mat& g = rho.images()[std::abs(l) - 1].matrix();
        acc = acc * (l > 0 ? g : Mat(g.inverse()));
    }
    return acc;
}

double naive_relator_residual(const RepresentationTable& rho) {
    double worst = 0.0;
    for (const Word& r : rho.presentation().relators) {
        const Mat m = naive_product(rho, r);
        worst = std::max(worst, max_abs(m - Mat::Identity(m.rows(), m.cols())));
    }
    return worst;
}

/// Fuchsian genus-2 table inside O(4,1) and the frame of the splitting curve.
struct Setup {
    RepresentationTable rho = fuchsian_genus2().block_embedded(4);
    SplittingData split;
    AxisFrame frame;
    BendShape shape;

    explicit Setup(SplittingData s) : split(std::move(s)) {
        frame = axis_frame(rho.evaluate(split.c_generator));
        shape = bend_shape(frame);
    }
};

}  // namespace

TEST_CASE("zero parameters give the identity") {
    Setup s(split_amalgam_genus2());
    CHECK(s.shape.plus_dim == 3);
    CHECK(s.shape.classes.empty());
    const Isometry z = centralizer_element(s.frame, BendParams::zero(s.shape));
    CHECK(z.matrix() == Mat::Identity(5, 5));
}

TEST_CASE("a quarter turn has order four on its block") {
    std::mt19937_64 rng(12);
    const Isometry g = testing::random_loxodromic(rng, 4, 1.3, 0.7);
    const AxisFrame frame = axis_frame(g);
    const BendShape shape = bend_shape(frame);
    REQUIRE(shape.classes.size() == 1);
    CHECK(shape.plus_dim == 1);
    BendParams p = BendParams::zero(shape);
    p.angles[0] = std::numbers::pi / 2;
    const Isometry z = centralizer_element(frame, p);
    const Mat z4 = z.matrix() * z.matrix() * z.matrix() * z.matrix();
    CHECK(max_abs(z4 - Mat::Identity(5, 5)) <= 1e-9 * entry_scale(z.matrix()));
    CHECK(max_abs(z.matrix() * z.matrix() - Mat::Identity(5, 5)) > 0.5);
}

TEST_CASE("random centralizer elements commute and fix the axis") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const Isometry g = testing::random_loxodromic(rng, 7, 0.8 + 0.1 * trial, 0.3 + 0.2 * trial);
        const AxisFrame frame = axis_frame(g);
        const BendShape shape = bend_shape(frame);
        const Isometry z = centralizer_element(frame, BendParams::random(shape, 100 + trial));
        const Mat& zm = z.matrix();
        CHECK(max_abs(zm * g.matrix() - g.matrix() * zm) <= 1e-8 * entry_scale(zm) * entry_scale(g.matrix()));
        CHECK(max_abs(zm * frame.v_plus - frame.v_plus) <= 1e-9 * entry_scale(zm));
        CHECK(max_abs(zm * frame.v_minus - frame.v_minus) <= 1e-9 * entry_scale(zm));
    }
}

TEST_CASE("incompatible parameters are rejected") {
    Setup s(split_amalgam_genus2());
    BendParams p = BendParams::zero(s.shape);
    p.angles.push_back(0.1);
    CHECK_THROWS_AS(centralizer_element(s.frame, p), Error);
}

TEST_CASE("amalgam bending keeps the relator and the A factor") {
    Setup s(split_amalgam_genus2());
    CHECK(bend_amalgam(s.rho, s.split, Isometry::identity(4)).images()[2].matrix() == s.rho.images()[2].matrix());
    const auto a_words = subgroup_ball(s.split.a_generators, 4);
    for (int seed = 0; seed < 20; ++seed) {
        const Isometry z = centralizer_element(s.frame, BendParams::random(s.shape, seed));
        const auto sigma = bend_amalgam(s.rho, s.split, z);
        CHECK(naive_relator_residual(sigma) <= 1e-6);
        CHECK(sigma.images()[0].matrix() == s.rho.images()[0].matrix());
        CHECK(sigma.images()[1].matrix() == s.rho.images()[1].matrix());
        const Mat expect = z.matrix() * s.rho.images()[3].matrix() * z.inverse().matrix();
        CHECK(max_abs(sigma.images()[3].matrix() - expect) <= 1e-10 * entry_scale(expect));
        if (seed < 3)
            for (const Word& w : a_words) CHECK(sigma.evaluate_matrix(w) == s.rho.evaluate_matrix(w));
    }
}

TEST_CASE("bending with an element off the centralizer is refused") {
    Setup s(split_amalgam_genus2());
    CHECK_THROWS_WITH_AS(bend_amalgam(s.rho, s.split, Isometry::rotation(4, 1, 3, 0.4)),
                         doctest::Contains("does not commute"), Error);
}

TEST_CASE("HNN bending twists the stable letter") {
    Setup s(split_hnn_genus2());
    const auto same = bend_hnn(s.rho, s.split, Isometry::identity(4));
    for (std::size_t i = 0; i < 4; ++i) CHECK(same.images()[i].matrix() == s.rho.images()[i].matrix());
    for (int seed = 0; seed < 20; ++seed) {
        const Isometry z = centralizer_element(s.frame, BendParams::random(s.shape, seed));
        const auto sigma = bend_hnn(s.rho, s.split, z);
        CHECK(hnn_relation_residual(sigma, s.split) <= 1e-6);
        CHECK(naive_relator_residual(sigma) <= 1e-6);
        const Mat expect = z.matrix() * s.rho.images()[1].matrix();
        CHECK(max_abs(sigma.images()[1].matrix() - expect) <= 1e-10 * entry_scale(expect));
        CHECK(sigma.images()[0].matrix() == s.rho.images()[0].matrix());
    }
}

TEST_CASE("length spectra are conjugation invariant") {
    Setup s(split_amalgam_genus2());
    const auto words = mixed_words(s.split, 40, 6, 3);
    const Isometry z = centralizer_element(s.frame, BendParams::random(s.shape, 9));
    const auto sigma = bend_amalgam(s.rho, s.split, z);
    std::mt19937_64 rng(77);
    const auto conj = sigma.conjugated(testing::random_isometry(rng, 4, 1.5));
    const auto l1 = length_spectrum(sigma, words);
    const auto l2 = length_spectrum(conj, words);
    REQUIRE(l1.size() == words.size());
    for (std::size_t i = 0; i < l1.size(); ++i) {
        CHECK(l1[i].first == l2[i].first);
        CHECK(std::abs(l1[i].second - l2[i].second) <= 1e-7);
    }
    CHECK(std::is_sorted(l1.begin(), l1.end(), [](const auto& a, const auto& b) { return a.first < b.first; }));
    CHECK(nonconjugacy_certificate(sigma, conj, words).verdict() == "INCONCLUSIVE");
    CHECK(nonconjugacy_certificate(sigma, sigma, words).verdict() == "INCONCLUSIVE");
}

TEST_CASE("A-only spectra agree across bendings") {
    Setup s(split_amalgam_genus2());
    const auto a_words = subgroup_ball(s.split.a_generators, 3);
    const auto s1 = bend_amalgam(s.rho, s.split, centralizer_element(s.frame, BendParams::random(s.shape, 1)));
    const auto s2 = bend_amalgam(s.rho, s.split, centralizer_element(s.frame, BendParams::random(s.shape, 2)));
    std::vector<Word> nontrivial;
    for (const Word& w : a_words)
        if (!w.empty()) nontrivial.push_back(w);
    const auto l1 = length_spectrum(s1, nontrivial);
    const auto l2 = length_spectrum(s2, nontrivial);
    for (std::size_t i = 0; i < l1.size(); ++i) CHECK(l1[i].second == l2[i].second);
}

TEST_CASE("distinct bendings are told apart by a mixed word") {
    Setup s(split_amalgam_genus2());
    const Word a1b2({1, 4});
    int separated = 0;
    for (int pair = 0; pair < 100; ++pair) {
        const auto z1 = centralizer_element(s.frame, BendParams::random(s.shape, 1000 + 2 * pair));
        const auto z2 = centralizer_element(s.frame, BendParams::random(s.shape, 1001 + 2 * pair));
        const double l1 = bend_amalgam(s.rho, s.split, z1).evaluate(a1b2).translation_length();
        const double l2 = bend_amalgam(s.rho, s.split, z2).evaluate(a1b2).translation_length();
        if (std::abs(l1 - l2) > 1e-3) ++separated;
    }
    CHECK(separated >= 95);

    const auto words = mixed_words(s.split, 100, 6, 11);
    const auto z1 = centralizer_element(s.frame, BendParams::random(s.shape, 1));
    const auto z2 = centralizer_element(s.frame, BendParams::random(s.shape, 2));
    const auto report = nonconjugacy_certificate(bend_amalgam(s.rho, s.split, z1), bend_amalgam(s.rho, s.split, z2), words);
    CHECK(report.verdict() == "NON-CONJUGATE");
    REQUIRE(report.witness.has_value());
    CHECK(report.max_difference > report.threshold);
}

TEST_CASE("mixed words involve both factors") {
    const auto split = split_hnn_genus2();
    const auto words = mixed_words(split, 50, 5, 4);
    CHECK(words.size() == 50);
    for (const Word& w : words) {
        bool s = false, a = false;
        for (int l : w.letters()) (std::abs(l) == 2 ? s : a) = true;
        CHECK((s && a));
    }
    CHECK(words == mixed_words(split, 50, 5, 4));
}
