#include "hyperlab/minkowski.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace hyperlab {

QuadraticSpace::QuadraticSpace(int dim_spatial) : n_(dim_spatial) {
    if (dim_spatial < 1) fail(ErrorKind::invalid_input, "quadratic space needs N >= 1");
}

Vec QuadraticSpace::form_signs() const {
    Vec s = Vec::Ones(n_ + 1);
    s(0) = -1.0;
    return s;
}

Mat QuadraticSpace::form_matrix() const { return hyperlab::form_matrix(n_ + 1); }

Mat form_matrix(Eigen::Index ambient_dim) {
    Mat j = Mat::Identity(ambient_dim, ambient_dim);
    j(0, 0) = -1.0;
    return j;
}

double bilinear_form(const Vec& x, const Vec& y) {
    if (x.size() != y.size() || x.size() < 2)
        fail(ErrorKind::invalid_input, "bilinear_form: dimension mismatch");
    return -x(0) * y(0) + x.tail(x.size() - 1).dot(y.tail(y.size() - 1));
}

HPoint HPoint::from_coords(const Vec& x, const Tolerances& tol) {
    if (x.size() < 2) fail(ErrorKind::invalid_input, "HPoint needs at least 2 coordinates");
    if (!x.allFinite()) fail(ErrorKind::invalid_input, "HPoint coordinates must be finite");
    if (!(x(0) > 0.0)) fail(ErrorKind::invalid_input, "HPoint must lie on the upper sheet (x0 > 0)");
    const double q = quadratic_form(x);
    // Far from the base point Q(x) is a difference of terms of size x0^2.
    const double slack = tol.renormalize * std::max(1.0, x(0) * x(0));
    if (std::abs(q + 1.0) > slack) fail(ErrorKind::invalid_input, "HPoint: Q(x) is not -1");
    return from_spatial(x.tail(x.size() - 1));
}

HPoint HPoint::from_spatial(const Vec& spatial) {
    Vec x(spatial.size() + 1);
    x(0) = std::sqrt(1.0 + spatial.squaredNorm());
    x.tail(spatial.size()) = spatial;
    return HPoint(std::move(x));
}

HPoint HPoint::origin(int dim_spatial) {
    Vec x = Vec::Zero(dim_spatial + 1);
    x(0) = 1.0;
    return HPoint(std::move(x));
}

HPoint HPoint::on_first_axis(int dim_spatial, double r) {
    Vec x = Vec::Zero(dim_spatial + 1);
    x(0) = std::cosh(r);
    x(1) = std::sinh(r);
    return HPoint(std::move(x));
}

IdealPoint IdealPoint::from_coords(const Vec& v, const Tolerances& tol) {
    if (v.size() < 2 || !v.allFinite()) fail(ErrorKind::invalid_input, "IdealPoint: bad coordinates");
    if (!(v(0) > 0.0)) fail(ErrorKind::invalid_input, "IdealPoint must lie in the forward light cone");
    Vec u = v / v(0);
    if (std::abs(quadratic_form(u)) > tol.point)
        fail(ErrorKind::invalid_input, "IdealPoint: vector is not light-like");
    u(0) = 1.0;
    return IdealPoint(std::move(u));
}

GeodesicSubspace GeodesicSubspace::coordinate(int dim_spatial, std::vector<int> zero_set) {
    return adapted(Mat::Identity(dim_spatial + 1, dim_spatial + 1), std::move(zero_set));
}

GeodesicSubspace GeodesicSubspace::adapted(Mat basis, std::vector<int> zero_set, const Tolerances& tol) {
    const auto n = basis.rows();
    if (basis.cols() != n || n < 2) fail(ErrorKind::invalid_input, "adapted basis must be square");
    const Mat j = form_matrix(n);
    if ((basis.transpose() * j * basis - j).cwiseAbs().maxCoeff() > tol.point * entry_scale(basis))
        fail(ErrorKind::invalid_input, "adapted basis is not J-orthonormal");
    std::set<int> seen;
    for (int i : zero_set) {
        if (i < 1 || i >= n) fail(ErrorKind::invalid_input, "zero set index out of range 1..N");
        if (!seen.insert(i).second) fail(ErrorKind::invalid_input, "zero set index repeated");
    }
    std::sort(zero_set.begin(), zero_set.end());
    return GeodesicSubspace(std::move(basis), std::move(zero_set));
}

bool GeodesicSubspace::contains(const HPoint& x, double tol) const {
    for (int i : zero_set_)
        if (std::abs(bilinear_form(x.coords(), basis_.col(i))) > tol) return false;
    return true;
}

double distance(const HPoint& p, const HPoint& q) {
    const double c = -bilinear_form(p.coords(), q.coords());
    if (c < 1.5) {
        const double chord2 = std::max(0.0, quadratic_form(p.coords() - q.coords()));
        return 2.0 * std::asinh(0.5 * std::sqrt(chord2));
    }
    return std::acosh(std::max(1.0, c));
}

Vec initial_direction(const HPoint& p, const HPoint& q, const Tolerances& tol) {
    const double d = distance(p, q);
    if (d <= tol.point) fail(ErrorKind::invalid_input, "geodesic: coincident endpoints");
    // q = cosh(d) p + sinh(d) b
    Vec b = (q.coords() - std::cosh(d) * p.coords()) / std::sinh(d);
    // Re-orthogonalize against p to remove roundoff.
    b += bilinear_form(b, p.coords()) * p.coords();
    return b / std::sqrt(quadratic_form(b));
}

HPoint geodesic_point(const HPoint& p, const HPoint& q, double s, const Tolerances& tol) {
    const Vec b = initial_direction(p, q, tol);
    const double u = s * distance(p, q);
    return HPoint::from_coords(std::cosh(u) * p.coords() + std::sinh(u) * b, tol);
}

Projection project_to_subspace(const HPoint& x, const GeodesicSubspace& y, const Tolerances& tol) {
    if (y.basis().rows() != x.coords().size())
        fail(ErrorKind::invalid_input, "project_to_subspace: dimension mismatch");
    Vec v = x.coords();
    for (int i : y.zero_set()) {
        const auto e = y.basis().col(i);
        v -= bilinear_form(x.coords(), e) * e;
    }
    const double q = quadratic_form(v);
    if (q >= -tol.point) fail(ErrorKind::numerical, "projection undefined");
    Vec p = v / std::sqrt(-q);
    if (p(0) < 0.0) p = -p;
    // cosh^2 d - 1 = -Q(v) - 1 is the sum of the squared removed components; asinh keeps small d exact.
    double removed = 0.0;
    for (int i : y.zero_set()) removed += std::pow(bilinear_form(x.coords(), y.basis().col(i)), 2);
    return {HPoint::from_coords(p, tol), std::asinh(std::sqrt(removed))};
}

double busemann(const IdealPoint& xi, const HPoint& x0, const HPoint& x) {
    return std::log(bilinear_form(x.coords(), xi.coords()) / bilinear_form(x0.coords(), xi.coords()));
}

}  // namespace hyperlab
