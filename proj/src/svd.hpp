#pragma once

#include "hyperlab/common.hpp"

#include <Eigen/SVD>

namespace hyperlab::detail {

struct Svd {
    Vec singular;
    Mat u;  ///< full U, empty unless requested
    Mat v;  ///< full V
};

/// SVD with full V (and optionally full U). Runs divide-and-conquer first and checks the
/// result; Eigen 3.4.0's BDCSVD can return NaN or wrong values when many singular values
/// coincide, in which case the one-sided Jacobi solver is used instead.
Svd svd(const Mat& a, bool want_u = false);

}  // namespace hyperlab::detail
