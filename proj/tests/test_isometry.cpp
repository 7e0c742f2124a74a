#include "doctest.h"
#include "test_support.hpp"

#include "hyperlab/isometry.hpp"
#include "hyperlab/log.hpp"

#include <cmath>
#include <numbers>

using namespace hyperlab;

namespace {

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

Mat block(const Mat& a, const Mat& b) {
    Mat m = Mat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    m.topLeftCorner(a.rows(), a.cols()) = a;
    m.bottomRightCorner(b.rows(), b.cols()) = b;
    return m;
}

Mat rot2(double theta) {
    Mat r(2, 2);
    r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return r;
}

}  // namespace

TEST_CASE("check_isometry accepts group elements and rejects perturbations") {
    const Isometry id = Isometry::check(Mat::Identity(4, 4));
    CHECK(id.residual() == 0.0);
    CHECK_NOTHROW(Isometry::boost(3, 1.7));
    Mat m = Isometry::boost(3, 0.4).matrix();
    m(1, 2) += 1e-3;
    const Mat j = form_matrix(4);
    CHECK(max_abs(m.transpose() * j * m - j) > 1e-8);
    CHECK_THROWS_WITH(Isometry::check(m), doctest::Contains("not J-orthogonal"));
    CHECK_THROWS_WITH(Isometry::check(-Mat::Identity(3, 3)), doctest::Contains("wrong sheet"));
}

TEST_CASE("classification of basic isometries") {
    CHECK(Isometry::identity(3).classification() == IsometryClass::elliptic);
    CHECK(Isometry::boost(3, 1.0).classification() == IsometryClass::loxodromic);
    CHECK(Isometry::boost(3, 1.0).spectral_radius() == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
    const Isometry r = Isometry::rotation(3, 1, 2, std::numbers::pi / 3);
    CHECK(r.classification() == IsometryClass::elliptic);
    CHECK(distance(HPoint::origin(3), r.apply(HPoint::origin(3))) == 0.0);

    // An elliptic whose fixed point is far from e0: conjugate of a rotation.
    std::mt19937_64 rng(3);
    const Isometry g = testing::random_isometry(rng, 3);
    CHECK((g * r * g.inverse()).classification() == IsometryClass::elliptic);
}

TEST_CASE("parabolic isometries are detected") {
    set_warnings_enabled(false);
    // Unipotent element fixing the light-like vector (1, 1, 0).
    const double s = 0.7;
    Mat p(3, 3);
    p << 1 + s * s / 2, -s * s / 2, s,
         s * s / 2, 1 - s * s / 2, s,
         s, -s, 1;
    const Isometry u = Isometry::check(p);
    CHECK(u.classification() == IsometryClass::parabolic);
    CHECK(u.translation_length() == 0.0);
    set_warnings_enabled(true);
}

TEST_CASE("translation length") {
    CHECK(Isometry::identity(2).translation_length() == 0.0);
    CHECK(std::abs(Isometry::boost(2, 2.5).translation_length() - 2.5) <= 1e-9);
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const Isometry m = testing::random_loxodromic(rng, 4, 0.3 + 0.1 * trial);
        const Isometry g = testing::random_isometry(rng, 4);
        CHECK(std::abs((g * m * g.inverse()).translation_length() - m.translation_length()) <= 1e-8);
    }
    const Isometry m = testing::random_loxodromic(rng, 3, 0.6);
    REQUIRE(m.classification() == IsometryClass::loxodromic);
    Isometry power = m;
    for (int n = 2; n <= 20; ++n) {
        power = power * m;
        CHECK(std::abs(power.translation_length() - n * m.translation_length()) <= 1e-7);
    }
}

TEST_CASE("long products keep J-orthogonality after renormalization") {
    std::mt19937_64 rng(5);
    const Isometry a = testing::random_isometry(rng, 3, 0.3), b = testing::random_isometry(rng, 3, 0.3);
    const Isometry w = a * b * a.inverse() * b.inverse();
    Mat acc = Mat::Identity(4, 4);
    const Mat j = form_matrix(4);
    for (int k = 1; k <= 10000; ++k) {
        acc = acc * w.matrix();
        if (k % 50 == 0) acc = j_polar(acc);
    }
    // Entries grow like e^{n l}; the residual is judged relative to them.
    CHECK(max_abs(acc.transpose() * j * acc - j) <= 1e-8 * entry_scale(acc) * entry_scale(acc));
}

TEST_CASE("j_polar returns J-orthogonal matrices and fixes them") {
    std::mt19937_64 rng(6);
    const Mat m = testing::random_isometry(rng, 4).matrix();
    CHECK(max_abs(j_polar(m) - m) <= 1e-12 * entry_scale(m));
    std::normal_distribution<double> g(0.0, 1e-4);
    Mat noisy = m;
    for (Eigen::Index i = 0; i < noisy.size(); ++i) noisy.data()[i] += g(rng);
    const Mat fixed = j_polar(noisy);
    const Mat j = form_matrix(5);
    CHECK(max_abs(fixed.transpose() * j * fixed - j) <= 1e-12 * entry_scale(fixed) * entry_scale(fixed));
    CHECK(max_abs(fixed - m) <= 1e-2);
}

TEST_CASE("axis frame of a boost") {
    const AxisFrame f = axis_frame(Isometry::boost(3, 1.2));
    CHECK(f.lambda == doctest::Approx(std::exp(1.2)).epsilon(1e-12));
    CHECK(std::abs(bilinear_form(f.v_plus, f.v_minus) + 1.0) <= 1e-12);
    CHECK(std::abs(quadratic_form(f.v_plus)) <= 1e-12);
    CHECK(std::abs(f.v_plus(0) - 1.0 / std::sqrt(2.0)) <= 1e-12);
    CHECK(std::abs(f.v_plus(1) - 1.0 / std::sqrt(2.0)) <= 1e-12);
    CHECK(std::abs(f.v_minus(1) + 1.0 / std::sqrt(2.0)) <= 1e-12);
    CHECK(max_abs(f.t.cwiseAbs() - Mat::Identity(2, 2)) <= 1e-12);
    CHECK_THROWS(axis_frame(Isometry::identity(3)));
}

TEST_CASE("axis frame of boost plus rotation recovers the rotation") {
    const double theta = 0.9;
    Mat m = block(Isometry::boost(1, 0.8).matrix(), rot2(theta));
    const AxisFrame f = axis_frame(Isometry::check(m));
    // T is a rotation by theta up to the orientation of the chosen basis of E.
    CHECK(std::abs(f.t.trace() - 2.0 * std::cos(theta)) <= 1e-12);
    CHECK(max_abs(f.t.transpose() * f.t - Mat::Identity(2, 2)) <= 1e-12);
    CHECK(max_abs(f.assemble(f.t) - m) <= 1e-7);
}

TEST_CASE("axis frame of random conjugates") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const Isometry m = testing::random_loxodromic(rng, 5, 0.2 + 0.15 * trial);
        const AxisFrame f = axis_frame(m);
        CHECK(max_abs(f.assemble(f.t) - m.matrix()) <= 1e-7 * entry_scale(m.matrix()));
        CHECK(max_abs(f.t.transpose() * f.t - Mat::Identity(4, 4)) <= 1e-8);
        CHECK(max_abs(m.matrix() * f.v_plus - f.lambda * f.v_plus) <= 1e-8 * entry_scale(m.matrix()));
        const Mat j = form_matrix(6);
        CHECK(max_abs(f.e_basis.transpose() * j * f.e_basis - Mat::Identity(4, 4)) <= 1e-10);
        // The axis is translated by the translation length.
        const double l = m.translation_length();
        for (double s : {-1.0, 0.0, 2.0}) {
            const HPoint x = HPoint::from_coords(f.axis_point(s));
            const HPoint y = m.apply(HPoint::from_coords(f.axis_point(s - l)));
            CHECK(distance(x, y) <= 1e-7);
        }
    }
}

TEST_CASE("fit_isometry recovers a known isometry") {
    std::mt19937_64 rng(8);
    std::vector<HPoint> src;
    for (int i = 0; i < 8; ++i) src.push_back(testing::random_point(rng, 4));
    const FitResult same = fit_isometry(src, src);
    CHECK(max_abs(same.isometry.matrix() - Mat::Identity(5, 5)) <= 1e-12);
    CHECK(same.residual <= 1e-12);

    const Isometry g = testing::random_isometry(rng, 4);
    std::vector<HPoint> dst;
    for (const auto& p : src) dst.push_back(g.apply(p));
    const FitResult r = fit_isometry(src, dst);
    CHECK(r.rank == 5);
    CHECK(r.residual <= 1e-7);
    CHECK(max_abs(r.isometry.matrix() - g.matrix()) <= 1e-7);
    const HPoint z = testing::random_point(rng, 4);
    CHECK(distance(r.isometry.apply(z), g.apply(z)) <= 1e-6);
}

TEST_CASE("fit_isometry rejects non-congruent and degenerate configurations") {
    std::mt19937_64 rng(9);
    std::vector<HPoint> src;
    for (int i = 0; i < 6; ++i) src.push_back(testing::random_point(rng, 3));
    std::vector<HPoint> dst = src;
    // Move one point by 1e-3 along a unit tangent: its Gram row changes at order 1e-3.
    const Vec p = dst[2].coords();
    Vec tangent = Vec::Unit(4, 1) + bilinear_form(Vec::Unit(4, 1), p) * p;
    tangent /= std::sqrt(quadratic_form(tangent));
    dst[2] = HPoint::from_coords(std::cosh(1e-3) * p + std::sinh(1e-3) * tangent);
    CHECK_THROWS_WITH(fit_isometry(src, dst), doctest::Contains("not congruent"));

    std::vector<HPoint> line{HPoint::origin(3), HPoint::on_first_axis(3, 1.0), HPoint::on_first_axis(3, 2.5)};
    CHECK_THROWS_WITH(fit_isometry(line, line), doctest::Contains("degenerate configuration"));
}

TEST_CASE("isometric completion of rank-deficient fits") {
    std::mt19937_64 rng(10);
    const Isometry g = testing::random_isometry(rng, 5);
    // Points in a totally geodesic H^2 inside H^5.
    std::vector<HPoint> src, dst;
    for (int i = 0; i < 6; ++i) {
        Vec x = Vec::Zero(6);
        x.head(3) = testing::random_point(rng, 2).coords();
        src.push_back(HPoint::from_coords(x));
        dst.push_back(g.apply(src.back()));
    }
    FitOptions opts;
    opts.completion = Completion::minimal_rotation;
    const FitResult r = fit_isometry(src, dst, opts);
    CHECK(r.rank == 3);
    CHECK(r.residual <= 1e-7);
    // On the span of the sources the fit agrees with g.
    for (int k = 0; k < 5; ++k) {
        Vec x = Vec::Zero(6);
        x.head(3) = testing::random_point(rng, 2).coords();
        const HPoint p = HPoint::from_coords(x);
        CHECK(distance(r.isometry.apply(p), g.apply(p)) <= 1e-6);
    }
    opts.completion = Completion::guided;
    opts.hint = g.matrix();
    const FitResult guided = fit_isometry(src, dst, opts);
    CHECK(max_abs(guided.isometry.matrix() - g.matrix()) <= 1e-6 * entry_scale(g.matrix()));
}

TEST_CASE("short loxodromics are not mistaken for parabolics") {
    std::mt19937_64 rng(21);
    const Isometry m = testing::random_loxodromic(rng, 3, 1e-5);
    CHECK(m.classification() == IsometryClass::loxodromic);
    CHECK(std::abs(m.translation_length() - 1e-5) <= 1e-9);
}

TEST_CASE("elliptic with a distant fixed point") {
    const Isometry far = Isometry::boost(3, 6.0);
    const Isometry r = far * Isometry::rotation(3, 2, 3, 2.0) * far.inverse();
    CHECK(r.classification() == IsometryClass::elliptic);
    CHECK(r.translation_length() == 0.0);
}
