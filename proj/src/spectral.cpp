#include "hyperlab/spectral.hpp"

#include "hyperlab/log.hpp"
#include "svd.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hyperlab {

namespace {

constexpr double kUnitCluster = 1e-7;

Mat rotation2(double theta) {
    Mat r(2, 2);
    r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return r;
}

}  // namespace

Mat BlockDecomposition::normal_form() const {
    const auto n = frame.rows();
    Mat d = Mat::Zero(n, n);
    Eigen::Index k = 0;
    for (double theta : angles) {
        d.block(k, k, 2, 2) = rotation2(theta);
        k += 2;
    }
    for (int i = 0; i < plus_dim; ++i, ++k) d(k, k) = 1.0;
    for (int i = 0; i < minus_dim; ++i, ++k) d(k, k) = -1.0;
    return d;
}

BlockDecomposition orthogonal_block_decomposition(const Mat& t, const Tolerances& tol) {
    (void)tol;
    const auto n = t.rows();
    if (t.cols() != n || n == 0) fail(ErrorKind::invalid_input, "non-orthogonal input: matrix must be square");
    if ((t.transpose() * t - Mat::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-8)
        fail(ErrorKind::invalid_input, "non-orthogonal input");

    Eigen::RealSchur<Mat> schur(t);
    const Mat& u = schur.matrixU();
    const Mat& s = schur.matrixT();

    struct Rotation {
        double theta;
        Mat columns;
    };
    std::vector<Rotation> rotations;
    std::vector<Vec> plus, minus;
    for (Eigen::Index i = 0; i < n;) {
        if (i + 1 < n && std::abs(s(i + 1, i)) > 0.0) {
            // A 2x2 orthogonal block with det +1 is a rotation; read off its angle.
            const Mat b = s.block(i, i, 2, 2);
            Mat cols = u.middleCols(i, 2);
            double theta = std::atan2(0.5 * (b(1, 0) - b(0, 1)), 0.5 * (b(0, 0) + b(1, 1)));
            if (theta < 0.0) {
                cols.col(1) = -cols.col(1);
                theta = -theta;
            }
            if (theta < kUnitCluster) {
                plus.push_back(cols.col(0));
                plus.push_back(cols.col(1));
            } else if (theta > std::numbers::pi - kUnitCluster) {
                minus.push_back(cols.col(0));
                minus.push_back(cols.col(1));
            } else {
                if (theta < 1e-5 || theta > std::numbers::pi - 1e-5)
                    log_warning("rotation angle within 1e-5 of 0 or pi kept as a rotation block");
                rotations.push_back({theta, cols});
            }
            i += 2;
        } else {
            (s(i, i) > 0.0 ? plus : minus).push_back(u.col(i));
            i += 1;
        }
    }
    std::stable_sort(rotations.begin(), rotations.end(),
                     [](const Rotation& a, const Rotation& b) { return a.theta < b.theta; });

    BlockDecomposition d;
    d.frame.resize(n, n);
    Eigen::Index k = 0;
    for (const auto& r : rotations) {
        d.frame.middleCols(k, 2) = r.columns;
        d.angles.push_back(r.theta);
        k += 2;
    }
    for (const Vec& v : plus) d.frame.col(k++) = v;
    for (const Vec& v : minus) d.frame.col(k++) = v;
    d.plus_dim = static_cast<int>(plus.size());
    d.minus_dim = static_cast<int>(minus.size());

    if ((d.frame * d.normal_form() * d.frame.transpose() - t).cwiseAbs().maxCoeff() > 1e-8)
        fail(ErrorKind::numerical, "block decomposition reconstruction failed");
    return d;
}

std::vector<AngleClass> angle_classes(const BlockDecomposition& d, const Tolerances& tol) {
    std::vector<AngleClass> classes;
    for (double theta : d.angles) {
        // Angles are sorted, so a class is a run of consecutive near-equal angles.
        if (!classes.empty() && theta - classes.back().angle <= tol.angle)
            ++classes.back().multiplicity;
        else
            classes.push_back({theta, 1});
    }
    return classes;
}

int centralizer_dim_closed_form(const BlockDecomposition& d, const Tolerances& tol) {
    int dim = d.plus_dim * (d.plus_dim - 1) / 2 + d.minus_dim * (d.minus_dim - 1) / 2;
    for (const auto& c : angle_classes(d, tol)) dim += c.multiplicity * c.multiplicity;
    return dim;
}

CentralizerAlgebra centralizer_algebra(const Mat& t, double rank_tol) {
    const auto n = t.rows();
    if (t.cols() != n) fail(ErrorKind::invalid_input, "centralizer needs a square matrix");
    const Eigen::Index pairs = n * (n - 1) / 2;
    CentralizerAlgebra out;
    if (pairs == 0) return out;

    // Column (i,j) holds vec(E T - T E) for E = E_ij - E_ji.
    Mat op(n * n, pairs);
    std::vector<std::pair<Eigen::Index, Eigen::Index>> index;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            Mat e = Mat::Zero(n, n);
            e(i, j) = 1.0;
            e(j, i) = -1.0;
            const Mat c = e * t - t * e;
            op.col(static_cast<Eigen::Index>(index.size())) = Eigen::Map<const Vec>(c.data(), n * n);
            index.emplace_back(i, j);
        }
    const auto svd = detail::svd(op);
    const Vec& sv = svd.singular;
    const double cutoff = rank_tol * std::max(1.0, sv(0));
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;
    out.dim = static_cast<int>(pairs - rank);
    for (Eigen::Index c = rank; c < pairs; ++c) {
        const Vec coeffs = svd.v.col(c);
        Mat b = Mat::Zero(n, n);
        for (Eigen::Index k = 0; k < pairs; ++k) {
            b(index[k].first, index[k].second) = coeffs(k);
            b(index[k].second, index[k].first) = -coeffs(k);
        }
        out.basis.push_back(b);
    }
    return out;
}

}  // namespace hyperlab
