#pragma once

#include "hyperlab/isometry.hpp"
#include "hyperlab/minkowski.hpp"

#include <random>

namespace testing {

using hyperlab::HPoint;
using hyperlab::Mat;
using hyperlab::Vec;

/// Point with spatial part drawn from N(0, scale^2).
inline HPoint random_point(std::mt19937_64& rng, int n, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Vec x(n + 1);
    for (int i = 1; i <= n; ++i) x(i) = g(rng);
    x(0) = std::sqrt(1.0 + x.tail(n).squaredNorm());
    return HPoint::from_coords(x);
}

inline Mat random_orthogonal(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g;
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = g(rng);
    Eigen::HouseholderQR<Mat> qr(a);
    Mat q = qr.householderQ();
    Vec d = qr.matrixQR().diagonal().array().sign();
    return q * d.asDiagonal();
}

/// A random isometry built as rotation * boost * rotation, each factor exact.
inline hyperlab::Isometry random_isometry(std::mt19937_64& rng, int n, double max_boost = 2.0) {
    std::uniform_real_distribution<double> u(0.1, max_boost);
    Mat k1 = Mat::Identity(n + 1, n + 1), k2 = Mat::Identity(n + 1, n + 1);
    k1.bottomRightCorner(n, n) = random_orthogonal(rng, n);
    k2.bottomRightCorner(n, n) = random_orthogonal(rng, n);
    const Mat b = hyperlab::Isometry::boost(n, u(rng)).matrix();
    return hyperlab::Isometry::check(k1 * b * k2);
}

}  // namespace testing

namespace testing {

/// g (boost(length) + rotation by angle in the (2,3) plane) g^-1 for a random g; n >= 3.
inline hyperlab::Isometry random_loxodromic(std::mt19937_64& rng, int n, double length, double angle = 0.7) {
    const auto g = random_isometry(rng, n);
    const auto core = hyperlab::Isometry::boost(n, length) * hyperlab::Isometry::rotation(n, 2, 3, angle);
    return g * core * g.inverse();
}

}  // namespace testing
