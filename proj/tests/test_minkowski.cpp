#include "doctest.h"
#include "test_support.hpp"

#include "hyperlab/minkowski.hpp"

#include <cmath>

using namespace hyperlab;

TEST_CASE("bilinear form on basis vectors") {
    const Vec e0 = Vec::Unit(3, 0), e1 = Vec::Unit(3, 1), e2 = Vec::Unit(3, 2);
    CHECK(bilinear_form(e0, e0) == -1.0);
    CHECK(bilinear_form(e1, e2) == 0.0);
    Vec x(3);
    x << std::cosh(1.0), std::sinh(1.0), 0.0;
    CHECK(bilinear_form(x, e0) == doctest::Approx(-std::cosh(1.0)).epsilon(1e-15));
    CHECK_THROWS_AS(bilinear_form(e0, Vec::Unit(4, 0)), Error);
}

TEST_CASE("quadratic space carries the form signs") {
    QuadraticSpace s(3);
    CHECK(s.ambient_dim() == 4);
    CHECK(s.form_signs()(0) == -1.0);
    CHECK(s.form_signs().tail(3).minCoeff() == 1.0);
    CHECK_THROWS_AS(QuadraticSpace(0), Error);
}

TEST_CASE("HPoint validation and renormalization") {
    Vec x(3);
    x << 1.0 + 1e-8, 0.0, 0.0;
    const HPoint p = HPoint::from_coords(x);
    CHECK(std::abs(quadratic_form(p.coords()) + 1.0) <= 1e-15);
    x << 1.1, 0.0, 0.0;
    CHECK_THROWS_AS(HPoint::from_coords(x), Error);
    x << -1.0, 0.0, 0.0;
    CHECK_THROWS_AS(HPoint::from_coords(x), Error);
}

TEST_CASE("distance on a coordinate geodesic") {
    const HPoint o = HPoint::origin(2);
    CHECK(distance(o, o) == 0.0);
    CHECK(distance(o, HPoint::on_first_axis(2, 2.0)) == doctest::Approx(2.0).epsilon(1e-14));
    // The asinh branch keeps tiny distances accurate.
    CHECK(distance(o, HPoint::on_first_axis(2, 1e-9)) == doctest::Approx(1e-9).epsilon(1e-6));
}

TEST_CASE("distance equals the length of a fine geodesic polyline") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const HPoint p = testing::random_point(rng, 4), q = testing::random_point(rng, 4);
        double length = 0.0;
        HPoint prev = p;
        for (int k = 1; k <= 1000; ++k) {
            const HPoint cur = geodesic_point(p, q, k / 1000.0);
            length += distance(prev, cur);
            prev = cur;
        }
        CHECK(std::abs(length - distance(p, q)) <= 1e-6);
    }
}

TEST_CASE("geodesic endpoints and midpoint") {
    std::mt19937_64 rng(12);
    const HPoint p = testing::random_point(rng, 3), q = testing::random_point(rng, 3);
    CHECK((geodesic_point(p, q, 0.0).coords() - p.coords()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((geodesic_point(p, q, 1.0).coords() - q.coords()).cwiseAbs().maxCoeff() <= 1e-10);
    const HPoint m = geodesic_point(p, q, 0.5);
    CHECK(std::abs(distance(p, m) - 0.5 * distance(p, q)) <= 1e-9);
    CHECK(std::abs(distance(m, q) - 0.5 * distance(p, q)) <= 1e-9);
    for (double s : {0.1, 0.37, 0.9})
        CHECK(std::abs(quadratic_form(geodesic_point(p, q, s).coords()) + 1.0) <= 1e-10);
    CHECK_THROWS_WITH(geodesic_point(p, p, 0.5), doctest::Contains("coincident endpoints"));
}

TEST_CASE("metric axioms on random triples") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 500; ++trial) {
        const HPoint p = testing::random_point(rng, 3, 2.0), q = testing::random_point(rng, 3, 2.0),
                     r = testing::random_point(rng, 3, 2.0);
        CHECK(distance(p, q) >= 0.0);
        CHECK(distance(p, q) == distance(q, p));
        CHECK(distance(p, r) <= distance(p, q) + distance(q, r) + 1e-9);
    }
}

TEST_CASE("projection onto a coordinate subspace") {
    const auto y = GeodesicSubspace::coordinate(2, {2});
    const double r = 1.5;
    Vec x(3);
    x << std::cosh(r), 0.0, std::sinh(r);
    const Projection pr = project_to_subspace(HPoint::from_coords(x), y);
    CHECK((pr.point.coords() - Vec::Unit(3, 0)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(pr.distance == doctest::Approx(r).epsilon(1e-12));
    CHECK(distance(HPoint::from_coords(x), pr.point) == doctest::Approx(pr.distance).epsilon(1e-12));

    const HPoint inside = HPoint::on_first_axis(2, 0.8);
    const Projection same = project_to_subspace(inside, y);
    CHECK(same.distance == 0.0);
    CHECK((same.point.coords() - inside.coords()).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("projection is the nearest point and is idempotent") {
    std::mt19937_64 rng(14);
    std::uniform_int_distribution<int> pick(1, 5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<int> zero_set{pick(rng)};
        if (int other = pick(rng); other != zero_set[0]) zero_set.push_back(other);
        const Mat basis = testing::random_isometry(rng, 5).matrix();
        const auto y = GeodesicSubspace::adapted(basis, zero_set, Tolerances{.point = 1e-8});
        const HPoint x = testing::random_point(rng, 5);
        const Projection pr = project_to_subspace(x, y);
        CHECK(y.contains(pr.point, 1e-9));
        CHECK(std::abs(distance(x, pr.point) - pr.distance) <= 1e-9);
        for (int k = 0; k < 100; ++k) {
            // Random point of Y: project a random point of H^5.
            const HPoint w = project_to_subspace(testing::random_point(rng, 5), y).point;
            CHECK(pr.distance <= distance(x, w) + 1e-12);
        }
        const Projection again = project_to_subspace(pr.point, y);
        CHECK(again.distance <= 1e-9);
    }
}

TEST_CASE("projection onto the orthogonal complement of a timelike direction is undefined") {
    // Zeroing x1 in a basis whose first spatial column is the boost direction leaves only
    // the subspace orthogonal to a timelike vector when the basis is swapped.
    Vec x(2);
    x << 1.0, 0.0;
    const auto y = GeodesicSubspace::coordinate(1, {1});
    CHECK_NOTHROW(project_to_subspace(HPoint::from_coords(x), y));
    Mat swapped(2, 2);
    swapped << 0.0, 1.0, 1.0, 0.0;
    CHECK_THROWS(GeodesicSubspace::adapted(swapped, {1}));
}

TEST_CASE("Busemann function against the limit d(x, ray(r)) - r") {
    Vec v(3);
    v << 1.0, 0.6, 0.8;
    const IdealPoint xi = IdealPoint::from_coords(v);
    const HPoint x0 = HPoint::origin(2);
    CHECK(busemann(xi, x0, x0) == 0.0);
    // Unit-speed ray from x0 to xi: cosh(s) x0 + sinh(s) (0, 0.6, 0.8).
    auto ray = [&](double s) {
        Vec p(3);
        p << std::cosh(s), 0.6 * std::sinh(s), 0.8 * std::sinh(s);
        return HPoint::from_coords(p);
    };
    auto limit = [&](const HPoint& x) { return distance(x, ray(30.0)) - 30.0; };
    const HPoint toward = ray(3.0), away = ray(-3.0);
    CHECK(std::abs(busemann(xi, x0, toward) - -3.0) <= 1e-9);
    CHECK(std::abs(busemann(xi, x0, away) - 3.0) <= 1e-9);
    CHECK(std::abs(busemann(xi, x0, toward) - limit(toward)) <= 1e-9);
    CHECK(std::abs(busemann(xi, x0, away) - limit(away)) <= 1e-9);
    std::mt19937_64 rng(15);
    const HPoint z = testing::random_point(rng, 2);
    CHECK(std::abs(busemann(xi, x0, z) - limit(z)) <= 1e-9);
}

TEST_CASE("ideal points are normalized to x0 = 1") {
    Vec v(3);
    v << 2.0, 2.0, 0.0;
    CHECK(IdealPoint::from_coords(v).coords()(0) == 1.0);
    v << 2.0, 1.0, 0.0;
    CHECK_THROWS(IdealPoint::from_coords(v));
}
