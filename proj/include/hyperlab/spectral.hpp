#pragma once

#include "hyperlab/common.hpp"

#include <vector>

namespace hyperlab {

/// frame^T T frame = diag(R(theta_1), ..., R(theta_k), I_p, -I_q) with R(theta) the rotation
/// [[cos, -sin], [sin, cos]] and 0 < theta_1 <= ... <= theta_k < pi.
struct BlockDecomposition {
    Mat frame;
    std::vector<double> angles;
    int plus_dim = 0;
    int minus_dim = 0;

    /// The block-diagonal normal form.
    Mat normal_form() const;
};

/// An angle class: rotation blocks whose angles agree within tau_angle.
struct AngleClass {
    double angle;
    int multiplicity;  ///< number of 2x2 blocks
};

/// Real Schur form of an orthogonal matrix, with each 2x2 block rotated to R(theta), theta > 0.
/// Blocks within 1e-7 of angle 0 or pi are counted in the +1 or -1 eigenspace. Throws
/// invalid_input "non-orthogonal input" when |T^T T - I| > 1e-8 and numerical when the
/// reconstruction misses 1e-8.
BlockDecomposition orthogonal_block_decomposition(const Mat& t, const Tolerances& tol = {});

/// Groups the angles of a decomposition into classes within tol.angle.
std::vector<AngleClass> angle_classes(const BlockDecomposition& d, const Tolerances& tol = {});

struct CentralizerAlgebra {
    int dim = 0;
    std::vector<Mat> basis;  ///< antisymmetric matrices B with BT = TB
};

/// Null space of B -> BT - TB on antisymmetric matrices, by SVD rank with relative cutoff
/// rank_tol.
CentralizerAlgebra centralizer_algebra(const Mat& t, double rank_tol = 1e-9);

/// Closed form sum m_j^2 + p(p-1)/2 + q(q-1)/2 from the block structure.
int centralizer_dim_closed_form(const BlockDecomposition& d, const Tolerances& tol = {});

}  // namespace hyperlab
