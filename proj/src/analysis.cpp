#include "hyperlab/analysis.hpp"

#include "hyperlab/parallel.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>

namespace hyperlab {

namespace {

void check_pairs(const std::vector<QIPair>& pairs) {
    if (pairs.size() < 2) fail(ErrorKind::invalid_input, "qi_fit needs at least two pairs");
    for (const auto& p : pairs)
        if (!(p.word_length > 0.0) || !std::isfinite(p.distance))
            fail(ErrorKind::invalid_input, "qi_fit needs positive word lengths and finite distances");
}

int slot_letter(std::size_t slot) {
    const int g = static_cast<int>(slot / 2) + 1;
    return slot % 2 == 0 ? g : -g;
}

struct Walker {
    const RepresentationTable& rho;
    int radius;
    std::size_t slot;
    const std::function<void(std::size_t, int, const Mat&)>& fn;
    std::vector<Mat> stack;

    void descend(int depth, int last) {
        fn(slot, depth, stack[static_cast<std::size_t>(depth)]);
        if (depth == radius) return;
        const int rank = rho.presentation().rank();
        for (int g = 1; g <= rank; ++g)
            for (int l : {g, -g}) {
                if (l == -last) continue;
                stack[static_cast<std::size_t>(depth) + 1].noalias() =
                    stack[static_cast<std::size_t>(depth)] * rho.letter_matrix(l);
                descend(depth + 1, l);
            }
    }
};

double distance_to_image(const HPoint& x0, const Mat& m) {
    const Vec y = m * x0.coords();
    return distance(x0, HPoint::from_spatial(y.tail(y.size() - 1)));
}

}  // namespace

double hyperbolic_delta() { return std::acosh(std::sqrt(2.0)); }

double qi_additive(const std::vector<QIPair>& pairs, double k) {
    double c = 0.0;
    for (const auto& p : pairs) c = std::max({c, p.distance - k * p.word_length, p.word_length / k - p.distance});
    return c;
}

double qi_slack(const std::vector<QIPair>& pairs, double k, double c) {
    double slack = std::numeric_limits<double>::infinity();
    for (const auto& p : pairs)
        slack = std::min({slack, k * p.word_length + c - p.distance, p.distance - (p.word_length / k - c)});
    return slack;
}

QIEstimate qi_fit(const std::vector<QIPair>& pairs, double c_budget) {
    check_pairs(pairs);
    if (!(c_budget >= 0.0)) fail(ErrorKind::invalid_input, "qi_fit budget must be non-negative");
    // Each pair gives two lower bounds on K once C is pinned to the budget.
    double k = 1.0;
    for (const auto& p : pairs) {
        k = std::max(k, (p.distance - c_budget) / p.word_length);
        if (p.distance + c_budget <= 0.0) fail(ErrorKind::numerical, "qi_fit: no finite K within the additive budget");
        k = std::max(k, p.word_length / (p.distance + c_budget));
    }
    QIEstimate e;
    e.K = k;
    e.C = std::min(qi_additive(pairs, k), c_budget);
    e.n_constraints = static_cast<int>(2 * pairs.size());
    e.max_violation = -qi_slack(pairs, e.K, e.C);
    e.delta_used = hyperbolic_delta();
    return e;
}

void stream_ball(const RepresentationTable& rho, int radius,
                 const std::function<void(std::size_t, int, const Mat&)>& fn) {
    if (radius < 1) return;
    const int rank = rho.presentation().rank();
    if (reduced_word_count(rank, radius) > kMaxStreamWords) fail(ErrorKind::invalid_input, "ball too large");
    const auto n = rho.dim_spatial() + 1;
    parallel_for(2 * static_cast<std::size_t>(rank), [&](std::size_t slot) {
        Walker w{rho, radius, slot, fn, std::vector<Mat>(static_cast<std::size_t>(radius) + 1, Mat(n, n))};
        const int first = slot_letter(slot);
        w.stack[1] = rho.letter_matrix(first);
        w.descend(1, first);
    });
}

std::vector<QIPair> orbit_pairs(const RepresentationTable& rho, const HPoint& x0, int radius) {
    if (x0.dim_spatial() != rho.dim_spatial()) fail(ErrorKind::invalid_input, "base point dimension mismatch");
    std::vector<std::vector<QIPair>> per_slot(2 * static_cast<std::size_t>(rho.presentation().rank()));
    stream_ball(rho, radius, [&](std::size_t slot, int length, const Mat& m) {
        per_slot[slot].push_back({static_cast<double>(length), distance_to_image(x0, m)});
    });
    std::vector<QIPair> out;
    for (auto& v : per_slot) out.insert(out.end(), v.begin(), v.end());
    return out;
}

std::uint64_t discreteness_count(const RepresentationTable& rho, const HPoint& x0, double r, int ball_radius) {
    if (x0.dim_spatial() != rho.dim_spatial()) fail(ErrorKind::invalid_input, "base point dimension mismatch");
    if (!(r >= 0.0)) fail(ErrorKind::invalid_input, "discreteness radius must be non-negative");
    std::vector<std::uint64_t> counts(2 * static_cast<std::size_t>(rho.presentation().rank()), 0);
    stream_ball(rho, ball_radius, [&](std::size_t slot, int, const Mat& m) {
        if (distance_to_image(x0, m) <= r) ++counts[slot];
    });
    std::uint64_t total = 1;  // the empty word
    for (auto c : counts) total += c;
    return total;
}

double gromov_product(const HPoint& p, const HPoint& q, const HPoint& r) {
    return 0.5 * (distance(p, r) + distance(q, r) - distance(p, q));
}

double four_point_defect(const HPoint& x, const HPoint& y, const HPoint& z, const HPoint& w) {
    const double xy = gromov_product(x, y, w), xz = gromov_product(x, z, w), yz = gromov_product(y, z, w);
    return std::max({std::min(xz, yz) - xy, std::min(xy, yz) - xz, std::min(xy, xz) - yz});
}

Isometry random_elliptic(int dim_spatial, double magnitude, std::mt19937_64& rng) {
    if (magnitude == 0.0 || dim_spatial < 2) return Isometry::identity(dim_spatial);
    std::normal_distribution<double> g;
    Mat a = Mat::Zero(dim_spatial, dim_spatial);
    for (int i = 0; i < dim_spatial; ++i)
        for (int j = i + 1; j < dim_spatial; ++j) {
            a(i, j) = g(rng);
            a(j, i) = -a(i, j);
        }
    a *= magnitude / a.norm();
    Mat m = Mat::Identity(dim_spatial + 1, dim_spatial + 1);
    m.bottomRightCorner(dim_spatial, dim_spatial) = a.exp();
    return Isometry::check(m);
}

StabilityReport stability_probe(const RepresentationTable& rho, const std::vector<double>& magnitudes, int trials,
                                std::uint64_t seed, int ball_radius, double c_budget) {
    if (trials < 1) fail(ErrorKind::invalid_input, "stability probe needs at least one trial");
    const HPoint x0 = HPoint::origin(rho.dim_spatial());
    StabilityReport report;
    report.ball_radius = ball_radius;
    report.c_budget = c_budget;
    report.baseline = qi_fit(orbit_pairs(rho, x0, ball_radius), c_budget);

    for (std::size_t mi = 0; mi < magnitudes.size(); ++mi) {
        StabilityRow row;
        row.magnitude = magnitudes[mi];
        for (int t = 0; t < trials; ++t) {
            std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                              static_cast<std::uint32_t>(t)};
            std::mt19937_64 rng(seq);
            std::vector<Isometry> images;
            for (const auto& g : rho.images()) images.push_back(g * random_elliptic(rho.dim_spatial(), row.magnitude, rng));
            Provenance p = rho.provenance();
            p.parameters["perturbation"] = row.magnitude;
            const auto perturbed = rho.with_images(std::move(images), std::move(p));
            const auto fit = qi_fit(orbit_pairs(perturbed, x0, ball_radius), c_budget);
            row.trials.push_back({fit.K, fit.C, perturbed.relator_residual()});
            const auto rel = [](double a, double b) { return b == 0.0 ? std::abs(a) : std::abs(a - b) / std::abs(b); };
            row.max_relative_k_change = std::max(row.max_relative_k_change, rel(fit.K, report.baseline.K));
            row.max_relative_c_change = std::max(row.max_relative_c_change, rel(fit.C, report.baseline.C));
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace hyperlab
