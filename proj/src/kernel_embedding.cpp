#include "hyperlab/kernel_embedding.hpp"

#include "hyperlab/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace hyperlab {

std::string_view to_string(KernelKind k) {
    return k == KernelKind::tree_lambda ? "tree_lambda" : "cosh_power";
}

std::string_view to_string(RhoTMode m) { return m == RhoTMode::galerkin ? "galerkin" : "suborbit"; }

KernelSpec KernelSpec::tree(double lambda) {
    KernelSpec k{KernelKind::tree_lambda, lambda};
    k.validate();
    return k;
}

KernelSpec KernelSpec::cosh_power(double t) {
    KernelSpec k{KernelKind::cosh_power, t};
    k.validate();
    return k;
}

void KernelSpec::validate() const {
    if (kind == KernelKind::tree_lambda && !(parameter > 1.0 && std::isfinite(parameter)))
        fail(ErrorKind::invalid_input, "tree kernel needs lambda > 1");
    if (kind == KernelKind::cosh_power && !(parameter > 0.0 && parameter <= 1.0))
        fail(ErrorKind::invalid_input, "cosh kernel needs 0 < t <= 1");
}

namespace {

/// ln cosh d without overflow.
double log_cosh(double d) {
    d = std::abs(d);
    return d + std::log1p(std::exp(-2.0 * d)) - std::numbers::ln2;
}

/// arccosh(e^y) for y >= 0, accurate near y = 0 and for very large y.
double acosh_exp(double y) {
    if (y < 20.0) {
        const double z = std::expm1(y);
        return std::log1p(z + std::sqrt(z * (z + 2.0)));
    }
    return y + std::log1p(std::sqrt(-std::expm1(-2.0 * y)));
}

}  // namespace

double KernelSpec::operator()(double d) const {
    if (kind == KernelKind::tree_lambda) return std::exp(d * std::log(parameter));
    if (parameter == 1.0) return std::cosh(d);
    return std::exp(parameter * log_cosh(d));
}

GramMatrix gram_from_kernel(const Mat& dists, const KernelSpec& kernel) {
    kernel.validate();
    const auto m = dists.rows();
    if (dists.cols() != m || m == 0) fail(ErrorKind::invalid_input, "distance matrix must be square and nonempty");
    if (!dists.allFinite()) fail(ErrorKind::invalid_input, "distance matrix has non-finite entries");
    const double scale = std::max(1.0, dists.cwiseAbs().maxCoeff());
    const double tol = 1e-12 * scale;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (dists(i, i) != 0.0) fail(ErrorKind::invalid_input, "non-metric input: nonzero diagonal");
        for (Eigen::Index j = 0; j < i; ++j) {
            if (dists(i, j) < 0.0) fail(ErrorKind::invalid_input, "non-metric input: negative distance");
            if (std::abs(dists(i, j) - dists(j, i)) > tol) fail(ErrorKind::invalid_input, "non-metric input: asymmetric");
        }
    }
    auto triangle = [&](Eigen::Index i, Eigen::Index j, Eigen::Index k) {
        if (dists(i, k) > dists(i, j) + dists(j, k) + tol)
            fail(ErrorKind::invalid_input, "non-metric input: triangle inequality fails");
    };
    if (m <= 200) {
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < m; ++j)
                for (Eigen::Index k = 0; k < m; ++k) triangle(i, j, k);
    } else {
        std::mt19937_64 rng(0x5eed);
        std::uniform_int_distribution<Eigen::Index> pick(0, m - 1);
        for (int s = 0; s < 1'000'000; ++s) triangle(pick(rng), pick(rng), pick(rng));
    }
    GramMatrix g{Mat(m, m), dists, kernel};
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = 0; i < m; ++i) g.entries(i, j) = -kernel(dists(i, j));
    return g;
}

Signature kernel_signature(const GramMatrix& g, const Tolerances& tol) {
    Eigen::SelfAdjointEigenSolver<Mat> es(g.entries, Eigen::EigenvaluesOnly);
    const Vec& ev = es.eigenvalues();
    const double tau = tol.signature * ev.cwiseAbs().maxCoeff();
    Signature s;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < -tau)
            ++s.negative;
        else if (ev(i) > tau)
            ++s.positive;
        else
            ++s.zero;
    }
    return s;
}

Embedding minkowski_embed(const GramMatrix& g, int max_dim, const Tolerances& tol) {
    const Mat& gm = g.entries;
    const auto m = gm.rows();
    if (gm.cols() != m || m == 0) fail(ErrorKind::invalid_input, "Gram matrix must be square and nonempty");
    if ((gm - gm.transpose()).cwiseAbs().maxCoeff() > 1e-12 * entry_scale(gm))
        fail(ErrorKind::invalid_input, "Gram matrix must be symmetric");

    Eigen::SelfAdjointEigenSolver<Mat> es(gm);
    const Vec& ev = es.eigenvalues();
    const Mat& u = es.eigenvectors();
    const double norm = ev.cwiseAbs().maxCoeff();
    const double tau = tol.signature * norm;

    std::vector<Eigen::Index> negative, positive;
    Embedding emb;
    emb.kernel = g.kernel;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (ev(i) < -tau)
            negative.push_back(i);
        else if (ev(i) > tau)
            positive.push_back(i);
        else
            emb.null_spectrum.push_back(ev(i));
    }
    if (negative.size() != 1) fail(ErrorKind::numerical, "kernel not of hyperbolic type at this configuration");
    std::reverse(positive.begin(), positive.end());  // descending
    const std::size_t keep =
        max_dim < 0 ? positive.size() : std::min(positive.size(), static_cast<std::size_t>(max_dim));
    for (std::size_t i = 0; i < positive.size(); ++i)
        (i < keep ? emb.kept_spectrum : emb.dropped_spectrum).push_back(ev(positive[i]));

    // At least one spatial coordinate, so that the result lives in some H^N with N >= 1.
    const Eigen::Index n = 1 + std::max<Eigen::Index>(1, static_cast<Eigen::Index>(keep));
    emb.eigenvectors = Mat::Zero(m, n);
    emb.coords = Mat::Zero(n, m);
    emb.neg_eigenvalue = ev(negative[0]);

    Vec time = u.col(negative[0]);
    if (time(0) < 0.0) time = -time;
    emb.eigenvectors.col(0) = time;
    emb.coords.row(0) = std::sqrt(-emb.neg_eigenvalue) * time.transpose();
    for (std::size_t k = 0; k < keep; ++k) {
        Vec v = u.col(positive[k]);
        const double cutoff = 1e-12 * v.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < m; ++i) {
            if (std::abs(v(i)) > cutoff) {
                if (v(i) < 0.0) v = -v;
                break;
            }
        }
        const auto row = static_cast<Eigen::Index>(k) + 1;
        emb.eigenvectors.col(row) = v;
        emb.coords.row(row) = std::sqrt(emb.kept_spectrum[k]) * v.transpose();
    }
    if (emb.coords.row(0).minCoeff() <= 0.0) fail(ErrorKind::numerical, "kernel not of hyperbolic type at this configuration");

    const Mat recon = emb.coords.transpose() * form_matrix(n) * emb.coords;
    emb.reconstruction_error = (recon - gm).cwiseAbs().maxCoeff() / norm;
    for (Eigen::Index i = 0; i < m; ++i) {
        emb.max_snap = std::max(emb.max_snap, std::abs(recon(i, i) + 1.0));
        emb.points.push_back(HPoint::from_spatial(emb.coords.col(i).tail(n - 1)));
    }
    if (!emb.truncated() && emb.reconstruction_error > tol.embed)
        fail(ErrorKind::numerical, "embedding reconstruction failed");
    return emb;
}

FitResult equivariant_operator(const Embedding& emb, const std::vector<std::pair<int, int>>& perm,
                               const Tolerances& tol) {
    if (perm.empty()) fail(ErrorKind::invalid_input, "equivariant_operator needs a nonempty domain");
    const auto n = emb.coords.rows();
    Mat s(n, static_cast<Eigen::Index>(perm.size())), t(n, static_cast<Eigen::Index>(perm.size()));
    for (std::size_t k = 0; k < perm.size(); ++k) {
        const auto [i, j] = perm[k];
        if (i < 0 || j < 0 || i >= emb.coords.cols() || j >= emb.coords.cols())
            fail(ErrorKind::invalid_input, "permutation index out of range");
        s.col(static_cast<Eigen::Index>(k)) = emb.coords.col(i);
        t.col(static_cast<Eigen::Index>(k)) = emb.coords.col(j);
    }
    FitOptions opts;
    opts.completion = Completion::minimal_rotation;
    opts.tol = tol;
    return fit_isometry(s, t, opts);
}

Mat distance_matrix(const std::vector<HPoint>& points) {
    const auto m = static_cast<Eigen::Index>(points.size());
    Mat d = Mat::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < i; ++j) d(i, j) = d(j, i) = distance(points[i], points[j]);
    return d;
}

namespace {

HPoint orbit_point(const RepresentationTable& base, const Word& w) {
    const Mat m = base.evaluate_matrix(w);
    return HPoint::from_spatial(m.col(0).tail(m.rows() - 1));
}

}  // namespace

std::vector<Word> rho_t_orbit_words(const RepresentationTable& base, int ball_radius, const RhoTOptions& opts) {
    if (ball_radius < 0) fail(ErrorKind::invalid_input, "ball radius must be >= 0");
    const GroupPresentation& p = base.presentation();
    const int rank = p.rank();
    std::vector<Word> candidates = cayley_ball(p, std::min(ball_radius, opts.core_radius)).words;
    for (int g = 1; g <= rank; ++g)
        for (int sign : {1, -1})
            for (int k = 1; k <= ball_radius; ++k) candidates.push_back(Word::letter(sign * g).power(k));
    if (ball_radius > opts.core_radius) {
        const CayleyBall sample = cayley_ball(p, ball_radius, BallPolicy::sampled(opts.samples_per_length, opts.seed));
        for (const Word& w : sample.words) {
            if (static_cast<int>(w.size()) <= opts.core_radius) continue;
            candidates.push_back(w);
            for (int g = 1; g <= rank; ++g)
                for (int sign : {1, -1}) candidates.push_back(Word::letter(sign * g) * w);
        }
    }
    // Orbit points of distinct group elements are at least the systole apart; 1e-6 only merges
    // words that represent the same element.
    std::vector<Word> out;
    std::vector<HPoint> seen;
    for (const Word& w : candidates) {
        const HPoint x = orbit_point(base, w);
        bool duplicate = false;
        for (const HPoint& y : seen) {
            if (std::abs(x.coords()(0) - y.coords()(0)) > 1e-6 * x.coords()(0)) continue;
            if (distance(x, y) < 1e-6) {
                duplicate = true;
                break;
            }
        }
        if (duplicate) continue;
        seen.push_back(x);
        out.push_back(w);
    }
    return out;
}

RhoTResult rho_t_generators(const RepresentationTable& base, double t, int ball_radius, const RhoTOptions& opts) {
    const KernelSpec kernel = KernelSpec::cosh_power(t);
    if (base.dim_spatial() != 2) fail(ErrorKind::invalid_input, "rho_t needs a base representation in O(2,1)");
    if (ball_radius < 1) fail(ErrorKind::invalid_input, "ball radius must be >= 1");

    const std::vector<Word> words = rho_t_orbit_words(base, ball_radius, opts);
    std::vector<HPoint> pts;
    for (const Word& w : words) pts.push_back(orbit_point(base, w));
    const auto m = static_cast<Eigen::Index>(pts.size());
    const Mat dists = distance_matrix(pts);
    const Embedding emb = minkowski_embed(gram_from_kernel(dists, kernel), opts.max_dim, opts.tol);
    const auto n = emb.coords.rows();
    const Mat jn = form_matrix(n);

    Vec inv_sqrt(n);
    inv_sqrt(0) = 1.0 / std::sqrt(-emb.neg_eigenvalue);
    for (Eigen::Index k = 1; k < n; ++k)
        inv_sqrt(k) = k - 1 < static_cast<Eigen::Index>(emb.kept_spectrum.size()) ? 1.0 / std::sqrt(emb.kept_spectrum[k - 1]) : 0.0;

    const int rank = base.presentation().rank();
    std::vector<Mat> operators(rank);
    RhoTDiagnostics diag;
    diag.polar_defects.assign(rank, 0.0);
    diag.fit_residuals.assign(rank, 0.0);

    parallel_for(static_cast<std::size_t>(rank), [&](std::size_t gi) {
        const Mat& gamma = base.images()[gi].matrix();
        std::vector<HPoint> moved;
        for (const HPoint& x : pts) moved.push_back(HPoint::from_spatial((gamma * x.coords()).tail(2)));
        Mat cross(m, m);
        for (Eigen::Index u = 0; u < m; ++u)
            for (Eigen::Index w = 0; w < m; ++w) cross(w, u) = -kernel(distance(pts[w], moved[u]));
        Mat op = jn * inv_sqrt.asDiagonal() * (emb.eigenvectors.transpose() * cross * emb.eigenvectors) *
                 inv_sqrt.asDiagonal();
        diag.polar_defects[gi] = (op.transpose() * jn * op - jn).cwiseAbs().maxCoeff();
        op = j_polar(op);

        // Sub-orbit correspondence u -> gamma u, by orbit point.
        std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
        for (Eigen::Index u = 0; u < m; ++u)
            for (Eigen::Index w = 0; w < m; ++w)
                if (std::abs(moved[u].coords()(0) - pts[w].coords()(0)) <= 1e-6 * pts[w].coords()(0) &&
                    distance(moved[u], pts[w]) < 1e-6) {
                    pairs.emplace_back(u, w);
                    break;
                }

        if (opts.mode == RhoTMode::suborbit) {
            Mat s(n, static_cast<Eigen::Index>(pairs.size())), tt(n, static_cast<Eigen::Index>(pairs.size()));
            for (std::size_t k = 0; k < pairs.size(); ++k) {
                s.col(static_cast<Eigen::Index>(k)) = emb.coords.col(pairs[k].first);
                tt.col(static_cast<Eigen::Index>(k)) = emb.coords.col(pairs[k].second);
            }
            FitOptions fo;
            fo.completion = Completion::guided;
            fo.hint = op;
            fo.tol = opts.tol;
            op = fit_isometry(s, tt, fo).isometry.matrix();
        }

        double worst = 0.0;
        for (const auto& [u, w] : pairs) {
            const Vec image = op * emb.coords.col(u);
            worst = std::max(worst, distance(HPoint::from_spatial(image.tail(n - 1)), emb.points[w]));
        }
        diag.fit_residuals[gi] = worst;
        operators[gi] = std::move(op);
    });

    std::vector<Isometry> images;
    for (const Mat& op : operators) images.push_back(Isometry::check(op, opts.tol));
    RepresentationTable table = base.with_images(
        std::move(images), Provenance{"rho_t",
                                      {{"t", t},
                                       {"ball_radius", static_cast<double>(ball_radius)},
                                       {"dim", static_cast<double>(n - 1)},
                                       {"orbit_points", static_cast<double>(m)}}});

    diag.orbit_points = static_cast<std::size_t>(m);
    diag.dim_spatial = static_cast<int>(n - 1);
    diag.neg_eigenvalue = emb.neg_eigenvalue;
    diag.dropped_count = emb.dropped_spectrum.size();
    diag.dropped_max = emb.dropped_spectrum.empty() ? 0.0 : emb.dropped_spectrum.front();
    diag.null_count = emb.null_spectrum.size();
    diag.base_lengths.resize(rank);
    diag.lengths.resize(rank);
    diag.length_ratios.resize(rank);
    parallel_for(static_cast<std::size_t>(rank), [&](std::size_t gi) {
        diag.base_lengths[gi] = base.images()[gi].translation_length();
        diag.lengths[gi] = table.images()[gi].translation_length();
        diag.length_ratios[gi] = diag.lengths[gi] / diag.base_lengths[gi];
    });
    diag.relator_residual = table.relator_residual();
    if (!base.presentation().relators.empty()) {
        const Mat r = table.evaluate_matrix(base.presentation().relators.front());
        diag.relator_displacement =
            distance(emb.points[0], HPoint::from_spatial((r * emb.points[0].coords()).tail(n - 1)));
    }
    const Mat recon = emb.coords.transpose() * jn * emb.coords;
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < i; ++j)
            diag.rescaled_distortion = std::max(
                diag.rescaled_distortion, std::abs(std::acosh(std::max(1.0, -recon(i, j))) - t * dists(i, j)));

    return {std::move(table), std::move(diag), words};
}

std::vector<double> scaled_length_curve(double length, double t, int n_max) {
    if (!(length > 0.0)) fail(ErrorKind::invalid_input, "scaled_length_curve needs L > 0");
    if (!(t > 0.0 && t <= 1.0)) fail(ErrorKind::invalid_input, "scaled_length_curve needs 0 < t <= 1");
    if (n_max < 1) fail(ErrorKind::invalid_input, "scaled_length_curve needs n_max >= 1");
    std::vector<double> a;
    for (int n = 1; n <= n_max; ++n) a.push_back(acosh_exp(t * log_cosh(n * length)) / n);
    return a;
}

std::vector<double> boundary_kernel_sample(const Isometry& g, const HPoint& o, double t,
                                           const std::vector<double>& angles) {
    if (g.dim_spatial() != 2 || o.dim_spatial() != 2) fail(ErrorKind::invalid_input, "boundary kernel lives on H^2");
    const Vec go = g.apply(o.coords());
    std::vector<double> out;
    for (double theta : angles) {
        Vec b(3);
        b << 1.0, std::cos(theta), std::sin(theta);
        out.push_back(std::pow(bilinear_form(o.coords(), b) / bilinear_form(go, b), t + 1.0));
    }
    return out;
}

}  // namespace hyperlab
