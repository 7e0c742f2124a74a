#pragma once

#include "hyperlab/common.hpp"

#include <vector>

namespace hyperlab {

/// Signature-(N,1) quadratic space R^{N+1} with Q(x) = -x0^2 + sum_{i>=1} xi^2.
class QuadraticSpace {
public:
    explicit QuadraticSpace(int dim_spatial);

    int dim_spatial() const { return n_; }
    int ambient_dim() const { return n_ + 1; }
    /// Diagonal sign vector (-1, +1, ..., +1).
    Vec form_signs() const;
    /// The Gram matrix J of the form.
    Mat form_matrix() const;

private:
    int n_;
};

/// J = diag(-1, 1, ..., 1) of the given ambient size.
Mat form_matrix(Eigen::Index ambient_dim);

double bilinear_form(const Vec& x, const Vec& y);
inline double quadratic_form(const Vec& x) { return bilinear_form(x, x); }

/// A point of the upper sheet {Q = -1, x0 > 0}. Immutable once built.
class HPoint {
public:
    /// Validates x and snaps it onto the sheet when |Q(x)+1| is within tol.renormalize (relative to
    /// x0^2). The snap recomputes x0 from the spatial part: scaling by sqrt(-Q(x)) would amplify the
    /// cancellation error of Q for distant points.
    static HPoint from_coords(const Vec& x, const Tolerances& tol = {});
    /// The point of H^N above the given spatial coordinates, x0 = sqrt(1 + |x|^2). Exact for any
    /// spatial part, so it is the preferred way to lift far-away points.
    static HPoint from_spatial(const Vec& spatial);
    /// The base point (1, 0, ..., 0) of H^N.
    static HPoint origin(int dim_spatial);
    /// (cosh r, sinh r, 0, ..., 0).
    static HPoint on_first_axis(int dim_spatial, double r);

    const Vec& coords() const { return x_; }
    int dim_spatial() const { return static_cast<int>(x_.size()) - 1; }

private:
    explicit HPoint(Vec x) : x_(std::move(x)) {}
    Vec x_;
};

/// A light-cone representative of a boundary point, normalized so that x0 = 1.
class IdealPoint {
public:
    static IdealPoint from_coords(const Vec& v, const Tolerances& tol = {});
    const Vec& coords() const { return v_; }

private:
    explicit IdealPoint(Vec v) : v_(std::move(v)) {}
    Vec v_;
};

/// Totally geodesic subspace Y = {x : B(x, e_i) = 0 for i in zero_set}, where e_0..e_N are the
/// columns of an explicit J-orthonormal adapted basis (identity for coordinate subspaces).
class GeodesicSubspace {
public:
    static GeodesicSubspace coordinate(int dim_spatial, std::vector<int> zero_set);
    static GeodesicSubspace adapted(Mat basis, std::vector<int> zero_set, const Tolerances& tol = {});

    const std::vector<int>& zero_set() const { return zero_set_; }
    const Mat& basis() const { return basis_; }
    bool contains(const HPoint& x, double tol) const;

private:
    GeodesicSubspace(Mat basis, std::vector<int> zero_set)
        : basis_(std::move(basis)), zero_set_(std::move(zero_set)) {}
    Mat basis_;
    std::vector<int> zero_set_;
};

struct Projection {
    HPoint point;
    double distance;
};

/// Hyperbolic distance arccosh(max(1, -B(p,q))), evaluated through 2 asinh(sqrt(Q(p-q))/2) for
/// nearby points where the arccosh form loses digits.
double distance(const HPoint& p, const HPoint& q);

/// Point at fraction s of the geodesic from p to q: cosh(u) p + sinh(u) b with u = s d(p,q).
HPoint geodesic_point(const HPoint& p, const HPoint& q, double s, const Tolerances& tol = {});

/// Unit spacelike tangent at p pointing to q.
Vec initial_direction(const HPoint& p, const HPoint& q, const Tolerances& tol = {});

/// Nearest-point projection onto Y and the distance d(x, Y).
Projection project_to_subspace(const HPoint& x, const GeodesicSubspace& y, const Tolerances& tol = {});

/// Busemann function beta_{xi,x0}(x) = ln(B(x,xi) / B(x0,xi)).
double busemann(const IdealPoint& xi, const HPoint& x0, const HPoint& x);

}  // namespace hyperlab
