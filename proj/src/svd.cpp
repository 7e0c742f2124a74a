#include "svd.hpp"

#include <algorithm>
#include <cmath>

namespace hyperlab::detail {

namespace {

/// Checks A V = W with W having orthogonal columns of norms sigma_i (zero past the rank-
/// revealing part) and V orthogonal. This validates the factorization without forming U.
bool consistent(const Mat& a, const Vec& s, const Mat& v) {
    if (!s.allFinite() || !v.allFinite()) return false;
    if ((v.transpose() * v - Mat::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff() > 1e-11) return false;
    const auto k = s.size();
    const double top = std::max(1.0, s(0));
    const double tol = 1e-11 * top * std::sqrt(static_cast<double>(std::max(a.rows(), a.cols())));
    const Mat w = a * v;
    for (Eigen::Index i = 0; i < v.cols(); ++i) {
        const double expect = i < k ? s(i) : 0.0;
        if (std::abs(w.col(i).norm() - expect) > tol) return false;
    }
    Mat gram = w.transpose() * w;
    gram.diagonal().setZero();
    return gram.cwiseAbs().maxCoeff() <= tol * top;
}

}  // namespace

Svd svd(const Mat& a, bool want_u) {
    if (a.size() == 0) return {Vec(), Mat::Identity(a.rows(), a.rows()), Mat::Identity(a.cols(), a.cols())};
    const unsigned flags = Eigen::ComputeFullV | (want_u ? static_cast<unsigned>(Eigen::ComputeFullU) : 0u);
    {
        Eigen::BDCSVD<Mat> d(a, flags);
        if (consistent(a, d.singularValues(), d.matrixV()) && (!want_u || d.matrixU().allFinite()))
            return {d.singularValues(), want_u ? d.matrixU() : Mat(), d.matrixV()};
    }
    Eigen::JacobiSVD<Mat> j(a, flags);
    return {j.singularValues(), want_u ? j.matrixU() : Mat(), j.matrixV()};
}

}  // namespace hyperlab::detail
