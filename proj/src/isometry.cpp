#include "hyperlab/isometry.hpp"

#include "hyperlab/log.hpp"
#include "svd.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace hyperlab {

namespace {
constexpr double kPolarScaleLimit = 1e6;
}  // namespace

std::string_view to_string(IsometryClass c) {
    switch (c) {
        case IsometryClass::elliptic: return "elliptic";
        case IsometryClass::parabolic: return "parabolic";
        case IsometryClass::loxodromic: return "loxodromic";
    }
    return "unknown";
}

Isometry Isometry::check(const Mat& m, const Tolerances& tol) {
    if (m.rows() != m.cols() || m.rows() < 2) fail(ErrorKind::invalid_input, "isometry must be square, size >= 2");
    if (!m.allFinite()) fail(ErrorKind::numerical, "isometry has non-finite entries");
    const Mat j = form_matrix(m.rows());
    const double residual = (m.transpose() * j * m - j).cwiseAbs().maxCoeff();
    // Products of long words have entries of size e^{length}; the residual is judged relative to them.
    if (residual > tol.iso * entry_scale(m) * entry_scale(m) && residual > tol.iso)
        fail(ErrorKind::numerical, "not J-orthogonal");
    if (!(m(0, 0) > 0.0)) fail(ErrorKind::numerical, "wrong sheet");
    return Isometry(m, residual, tol);
}

Isometry Isometry::identity(int dim_spatial) {
    return check(Mat::Identity(dim_spatial + 1, dim_spatial + 1));
}

Isometry Isometry::boost(int dim_spatial, double length) {
    Mat m = Mat::Identity(dim_spatial + 1, dim_spatial + 1);
    m(0, 0) = m(1, 1) = std::cosh(length);
    m(0, 1) = m(1, 0) = std::sinh(length);
    return check(m);
}

Isometry Isometry::rotation(int dim_spatial, int i, int j, double angle) {
    if (i < 1 || j < 1 || i > dim_spatial || j > dim_spatial || i == j)
        fail(ErrorKind::invalid_input, "rotation plane must be two distinct spatial axes");
    Mat m = Mat::Identity(dim_spatial + 1, dim_spatial + 1);
    m(i, i) = m(j, j) = std::cos(angle);
    m(i, j) = -std::sin(angle);
    m(j, i) = std::sin(angle);
    return check(m);
}

Isometry Isometry::operator*(const Isometry& rhs) const {
    if (rhs.m_.rows() != m_.rows()) fail(ErrorKind::invalid_input, "isometry dimension mismatch");
    return check(m_ * rhs.m_, tol_);
}

Isometry Isometry::inverse() const {
    const Mat j = form_matrix(m_.rows());
    return Isometry(j * m_.transpose() * j, residual_, tol_);
}

HPoint Isometry::apply(const HPoint& x) const { return HPoint::from_coords(m_ * x.coords(), tol_); }

namespace {

HPoint to_hyperboloid(const Vec& x) {
    const Vec y = (x(0) < 0 ? -x : x) / std::sqrt(-quadratic_form(x));
    return HPoint::from_spatial(y.tail(y.size() - 1));
}

double displacement(const Mat& m, const HPoint& x) {
    return distance(x, HPoint::from_spatial((m * x.coords()).tail(m.rows() - 1)));
}

/// Displacement d(x, Mx) at the best fixed-point candidate: e0, and the timelike direction of
/// ker(M - I) when that kernel has one. A parabolic element fixes only light-like and spacelike
/// vectors, so its kernel carries no timelike candidate; its displacement tends to 0 toward the
/// fixed ideal point, which is why points are never pushed outward here. Fixed points with
/// x0 beyond ~1e6 are not searched for.
double min_displacement(const Mat& m) {
    const auto n = m.rows();
    const Mat j = form_matrix(n);
    double best = displacement(m, HPoint::origin(static_cast<int>(n) - 1));

    const auto svd = detail::svd(m - Mat::Identity(n, n));
    const double cutoff = 1e-6 * entry_scale(m);
    std::vector<Eigen::Index> kernel;
    for (Eigen::Index k = 0; k < n; ++k)
        if (svd.singular(k) <= cutoff) kernel.push_back(k);
    if (kernel.empty()) return best;
    Mat w(n, static_cast<Eigen::Index>(kernel.size()));
    for (std::size_t c = 0; c < kernel.size(); ++c) w.col(static_cast<Eigen::Index>(c)) = svd.v.col(kernel[c]);
    Eigen::SelfAdjointEigenSolver<Mat> restricted(w.transpose() * j * w);
    if (restricted.eigenvalues()(0) < -1e-12)
        best = std::min(best, displacement(m, to_hyperboloid(w * restricted.eigenvectors().col(0))));
    return best;
}

constexpr double kRefineWindow = 1e-3;

Vec light_null_vector(const Mat& a) {
    Vec v = detail::svd(a).v.col(a.cols() - 1);
    return v(0) < 0 ? Vec(-v) : v;
}

double refined_radius(const Mat& m, double radius) {
    const auto n = m.rows();
    const Mat j = form_matrix(n);
    const Mat id = Mat::Identity(n, n);
    Vec vp = light_null_vector(m - radius * id);
    Vec vm = light_null_vector(j * m.transpose() * j - radius * id);
    if (std::abs(vp(0)) < 1e-12 || std::abs(vm(0)) < 1e-12) return 1.0;
    vp /= vp(0);
    vm /= vm(0);
    const double b = bilinear_form(vp, vm);
    if (b > -1e-6) return 1.0;
    return bilinear_form(m * vp, vm) / b;
}

}  // namespace

const Isometry::Spectral& Isometry::spectral() const {
    std::call_once(cache_->once, [this] {
        auto& c = *cache_;
        Eigen::EigenSolver<Mat> es(m_, false);
        c.radius = es.eigenvalues().cwiseAbs().maxCoeff();
        // A unipotent (parabolic) element has a 3x3 Jordan block whose computed eigenvalues are
        // spread by ~eps^{1/3}. Near 1 the radius is therefore recomputed from the light-like
        // eigenvectors, which coincide for a parabolic and are B-independent for a loxodromic.
        if (c.radius > 1.0 + tol_.classify && c.radius < 1.0 + kRefineWindow) c.radius = refined_radius(m_, c.radius);
        if (c.radius > 1.0 + tol_.classify) {
            c.cls = IsometryClass::loxodromic;
            c.length = std::log(c.radius);
            if (c.radius < 1.0 + 100.0 * tol_.classify)
                log_warning("loxodromic classification is within 100x of the spectral-radius threshold");
            return;
        }
        c.length = 0.0;
        const double d = min_displacement(m_);
        if (d <= tol_.classify) {
            c.cls = IsometryClass::elliptic;
        } else {
            c.cls = IsometryClass::parabolic;
            log_warning("parabolic isometry detected (minimal displacement " + std::to_string(d) + ")");
        }
    });
    return *cache_;
}

Mat j_polar(const Mat& m, int max_iterations) {
    // The Newton step inverts X, whose condition number is about entry_scale^2. Past ~1e6 the
    // entries of M^T J M - J are dominated by rounding of the stored matrix itself, so there is
    // nothing left to polish and the inversion would only inject noise.
    const double scale = entry_scale(m);
    if (scale > kPolarScaleLimit) return m;
    const Mat j = form_matrix(m.rows());
    // Already J-orthogonal to within the rounding of its own entries: a Newton step would trade
    // that for inversion noise of the same order and visibly move the spectrum.
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * scale * scale;
    if ((m.transpose() * j * m - j).cwiseAbs().maxCoeff() <= floor) return m;
    Mat x = m;
    double previous = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iterations; ++it) {
        const Mat inv_t = x.partialPivLu().inverse().transpose();
        // Far from convergence the Frobenius-norm scaling of the polar Newton iteration keeps
        // the step count logarithmic in the initial distortion.
        double mu = 1.0;
        if (previous > 1e-2 * entry_scale(x)) mu = std::sqrt(inv_t.norm() / x.norm());
        Mat next = 0.5 * (mu * x + j * inv_t * j / mu);
        const double step = (next - x).cwiseAbs().maxCoeff();
        x = std::move(next);
        // Stop at roundoff level, or when the steps stop shrinking there.
        if (step <= 1e-14 * entry_scale(x) || (step <= 1e-10 * entry_scale(x) && step >= 0.5 * previous)) break;
        previous = step;
    }
    return x;
}

Mat AxisFrame::frame_matrix() const {
    const auto n = v_plus.size();
    Mat f(n, n);
    f.col(0) = v_plus;
    f.col(1) = v_minus;
    f.rightCols(n - 2) = e_basis;
    return f;
}

Mat AxisFrame::frame_inverse() const {
    const Mat f = frame_matrix();
    const Mat j = form_matrix(f.rows());
    const Mat gram = f.transpose() * j * f;
    return gram.partialPivLu().solve(f.transpose() * j);
}

Mat AxisFrame::assemble(const Mat& inner) const {
    const auto n = v_plus.size();
    Mat d = Mat::Zero(n, n);
    d(0, 0) = lambda;
    d(1, 1) = 1.0 / lambda;
    d.bottomRightCorner(n - 2, n - 2) = inner;
    return frame_matrix() * d * frame_inverse();
}

Vec AxisFrame::axis_point(double s) const {
    return (std::exp(s) * v_plus + std::exp(-s) * v_minus) / std::sqrt(2.0);
}

namespace {

Vec null_vector(const Mat& a) {
    return detail::svd(a).v.col(a.cols() - 1);
}

}  // namespace

AxisFrame axis_frame(const Isometry& iso) {
    if (iso.classification() != IsometryClass::loxodromic)
        fail(ErrorKind::invalid_input, "axis_frame needs a loxodromic isometry");
    const Mat& m = iso.matrix();
    const auto n = m.rows();
    const Mat j = form_matrix(n);
    const Mat id = Mat::Identity(n, n);
    double lambda = iso.spectral_radius();

    Vec vp = null_vector(m - lambda * id);
    Vec vm = null_vector(j * m.transpose() * j - lambda * id);
    if (vp(0) < 0) vp = -vp;
    if (vm(0) < 0) vm = -vm;
    // Normalize both to time coordinate 1, then scale jointly so that B(v+, v-) = -1.
    vp /= vp(0);
    vm /= vm(0);
    const double b = bilinear_form(vp, vm);
    if (!(b < 0.0)) fail(ErrorKind::numerical, "axis extraction failed");
    vp /= std::sqrt(-b);
    vm /= std::sqrt(-b);
    lambda = bilinear_form(m * vp, vm) / bilinear_form(vp, vm);

    const double scale = entry_scale(m);
    const double tol = 1e-7 * scale;
    if ((m * vp - lambda * vp).cwiseAbs().maxCoeff() > tol * vp.cwiseAbs().maxCoeff() ||
        (m * vm - vm / lambda).cwiseAbs().maxCoeff() > tol * vm.cwiseAbs().maxCoeff())
        fail(ErrorKind::numerical, "axis extraction failed");

    // B-orthogonal projection onto E, then pivoted Gram-Schmidt of the projected unit vectors.
    auto project = [&](const Vec& x) -> Vec {
        return x + bilinear_form(x, vm) * vp + bilinear_form(x, vp) * vm;
    };
    std::vector<Vec> pool;
    for (Eigen::Index i = 0; i < n; ++i) pool.push_back(project(Vec::Unit(n, i)));
    Mat e(n, n - 2);
    for (Eigen::Index k = 0; k < n - 2; ++k) {
        std::size_t best = 0;
        double best_norm = -1.0;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            const double q = quadratic_form(pool[i]);
            if (q > best_norm) {
                best_norm = q;
                best = i;
            }
        }
        if (!(best_norm > 1e-12)) fail(ErrorKind::numerical, "axis extraction failed");
        Vec v = pool[best] / std::sqrt(best_norm);
        v = project(v);
        for (Eigen::Index c = 0; c < k; ++c) v -= bilinear_form(v, e.col(c)) * e.col(c);
        v /= std::sqrt(quadratic_form(v));
        e.col(k) = v;
        for (auto& p : pool) p -= bilinear_form(p, v) * v;
    }

    AxisFrame f{vp, vm, e, lambda, e.transpose() * j * m * e};
    if ((f.assemble(f.t) - m).cwiseAbs().maxCoeff() > tol)
        fail(ErrorKind::numerical, "axis extraction failed");
    return f;
}

namespace {

double max_displacement(const Mat& m, const Mat& sources, const Mat& targets) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < sources.cols(); ++i) {
        const Eigen::Index n = m.rows() - 1;
        const HPoint a = HPoint::from_spatial((m * sources.col(i)).tail(n));
        const HPoint b = HPoint::from_spatial(targets.col(i).tail(n));
        worst = std::max(worst, distance(a, b));
    }
    return worst;
}

/// Columns spanning the B-orthogonal complement of span(w), made J-orthonormal. The complement
/// is positive definite when span(w) contains a timelike vector.
Mat orthonormal_complement(const Mat& w, Eigen::Index dim) {
    const auto n = w.rows();
    const Mat j = form_matrix(n);
    Mat c = detail::svd(w.transpose() * j).v.rightCols(dim);
    Eigen::SelfAdjointEigenSolver<Mat> es(c.transpose() * j * c);
    if (es.eigenvalues().minCoeff() <= 0.0) fail(ErrorKind::numerical, "degenerate configuration");
    return c * es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal();
}

}  // namespace

FitResult fit_isometry(const Mat& sources, const Mat& targets, const FitOptions& opts) {
    const auto n = sources.rows();
    const auto count = sources.cols();
    if (targets.rows() != n || targets.cols() != count || count == 0)
        fail(ErrorKind::invalid_input, "fit_isometry: source/target shapes differ");
    const Mat j = form_matrix(n);

    const Mat gs = sources.transpose() * j * sources;
    const Mat gt = targets.transpose() * j * targets;
    for (Eigen::Index a = 0; a < count; ++a)
        for (Eigen::Index b = 0; b < count; ++b)
            if (std::abs(gs(a, b) - gt(a, b)) > opts.tol.fit * std::max(1.0, std::abs(gs(a, b))))
                fail(ErrorKind::numerical, "not congruent");

    // Rescale each pair so that far points do not dominate the least-squares problem.
    Mat s = sources, t = targets;
    for (Eigen::Index i = 0; i < count; ++i) {
        const double c = 1.0 / std::max({1.0, std::abs(s(0, i)), std::abs(t(0, i))});
        s.col(i) *= c;
        t.col(i) *= c;
    }

    Eigen::ColPivHouseholderQR<Mat> qr(s);
    qr.setThreshold(1e-10);
    const auto rank = qr.rank();

    Mat m;
    if (rank == n) {
        m = s.transpose().colPivHouseholderQr().solve(t.transpose()).transpose();
    } else {
        if (opts.completion == Completion::none) fail(ErrorKind::numerical, "degenerate configuration");
        if (opts.completion == Completion::guided && !opts.hint) fail(ErrorKind::invalid_input, "guided completion needs a hint");
        // span(S) = Q_r with S P_r = Q_r R_rr; the isometry sends Q_r to T P_r R_rr^{-1}.
        const Mat q = qr.householderQ() * Mat::Identity(n, rank);
        const Mat r = qr.matrixR().topLeftCorner(rank, rank).template triangularView<Eigen::Upper>();
        const Mat tp = t * qr.colsPermutation();
        const Mat gq = r.transpose().triangularView<Eigen::Lower>().solve(tp.leftCols(rank).transpose()).transpose();

        const Mat ns = orthonormal_complement(q, n - rank);
        const Mat nt = orthonormal_complement(gq, n - rank);
        const Mat hint = opts.completion == Completion::guided ? *opts.hint : Mat::Identity(n, n);
        const auto svd = detail::svd(nt.transpose() * j * hint * ns, true);
        const Mat rot = svd.u * svd.v.transpose();

        Mat fs(n, n), ft(n, n);
        fs << q, ns;
        ft << gq, nt * rot;
        m = ft * fs.partialPivLu().inverse();
    }

    m = j_polar(m);
    if (m(0, 0) < 0.0) fail(ErrorKind::numerical, "not congruent");
    Isometry iso = Isometry::check(m, opts.tol);
    return {iso, max_displacement(iso.matrix(), sources, targets), static_cast<int>(rank)};
}

FitResult fit_isometry(const std::vector<HPoint>& sources, const std::vector<HPoint>& targets,
                       const FitOptions& opts) {
    if (sources.empty() || sources.size() != targets.size())
        fail(ErrorKind::invalid_input, "fit_isometry: source/target counts differ");
    const auto n = sources.front().coords().size();
    Mat s(n, static_cast<Eigen::Index>(sources.size())), t(n, static_cast<Eigen::Index>(targets.size()));
    for (std::size_t i = 0; i < sources.size(); ++i) {
        s.col(static_cast<Eigen::Index>(i)) = sources[i].coords();
        t.col(static_cast<Eigen::Index>(i)) = targets[i].coords();
    }
    return fit_isometry(s, t, opts);
}

}  // namespace hyperlab
