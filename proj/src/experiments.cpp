#include "hyperlab/experiments.hpp"

#include "hyperlab/trees.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

namespace hyperlab {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, x);
    return buf;
}

Json doubles(const std::vector<double>& xs) {
    Json a = Json::array();
    for (double x : xs) a.push_back(x);
    return a;
}

bool same_images(const RepresentationTable& a, const RepresentationTable& b) {
    if (a.images().size() != b.images().size()) return false;
    for (std::size_t i = 0; i < a.images().size(); ++i)
        if (a.images()[i].matrix() != b.images()[i].matrix()) return false;
    return true;
}

SplittingData splitting(const std::string& kind, int genus) {
    if (kind == "amalgam") return split_amalgam(genus);
    if (kind == "hnn") {
        if (genus != 2) fail(ErrorKind::invalid_input, "the HNN splitting is available for genus 2 only");
        return split_hnn_genus2();
    }
    fail(ErrorKind::invalid_input, "split must be amalgam or hnn, got '" + kind + "'");
}

RhoTMode rho_t_mode(const std::string& m) {
    if (m == "galerkin") return RhoTMode::galerkin;
    if (m == "suborbit") return RhoTMode::suborbit;
    fail(ErrorKind::invalid_input, "mode must be galerkin or suborbit, got '" + m + "'");
}

/// Haar-random orthogonal matrix from the QR factorization of a Gaussian matrix.
Mat random_orthogonal(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g;
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = g(rng);
    Eigen::HouseholderQR<Mat> qr(a);
    const Mat q = qr.householderQ();
    return q * qr.matrixQR().diagonal().array().sign().matrix().asDiagonal();
}

/// Orthogonal matrix with prescribed rotation angles and +-1 multiplicities, in a random frame.
Mat designed_orthogonal(const std::vector<double>& angles, int p, int q, std::mt19937_64& rng) {
    const int n = 2 * static_cast<int>(angles.size()) + p + q;
    Mat d = Mat::Zero(n, n);
    int k = 0;
    for (double a : angles) {
        d.block(k, k, 2, 2) << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
        k += 2;
    }
    for (int i = 0; i < p; ++i, ++k) d(k, k) = 1.0;
    for (int i = 0; i < q; ++i, ++k) d(k, k) = -1.0;
    const Mat frame = random_orthogonal(rng, n);
    return frame * d * frame.transpose();
}

/// A generic isometry: rotation, boost of random length, rotation.
Isometry random_motion(int n, double max_boost, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.1, max_boost);
    const Isometry r1 = random_elliptic(n, 2.0, rng);
    const Isometry b = Isometry::boost(n, u(rng));
    const Isometry r2 = random_elliptic(n, 2.0, rng);
    return r1 * b * r2;
}

/// Keeps at most `limit` points, evenly strided, so plots stay readable.
std::vector<std::pair<double, double>> thin(const std::vector<QIPair>& pairs, std::size_t limit) {
    std::vector<std::pair<double, double>> out;
    const std::size_t stride = std::max<std::size_t>(1, pairs.size() / limit);
    for (std::size_t i = 0; i < pairs.size(); i += stride) out.emplace_back(pairs[i].word_length, pairs[i].distance);
    return out;
}

Scatter qi_scatter(std::string title, std::string x_label, const std::vector<QIPair>& pairs, const QIEstimate& fit) {
    Scatter s;
    s.title = std::move(title);
    s.x_label = std::move(x_label);
    s.y_label = "distance in H^N";
    s.points = thin(pairs, 2000);
    s.lines.push_back({"K L + C", fit.K, fit.C});
    s.lines.push_back({"L / K - C", 1.0 / fit.K, -fit.C});
    return s;
}

// ---------------------------------------------------------------------------------------------
// Shared measurement routines (used by the subcommands and by the acceptance suite)

struct CentralizerSweep {
    Json rows = Json::array();
    int agree = 0;
    int total = 0;
};

CentralizerSweep centralizer_sweep(std::uint64_t seed, int count, int max_size, const Tolerances& tol) {
    if (count < 1 || max_size < 1) fail(ErrorKind::invalid_input, "centralizer sweep needs count >= 1 and max_size >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> size_pick(1, max_size);
    std::uniform_real_distribution<double> angle_pick(0.05, std::numbers::pi - 0.05);
    CentralizerSweep out;
    for (int i = 0; i < count; ++i) {
        const int n = size_pick(rng);
        Mat t;
        std::string kind;
        if (i % 2 == 0) {
            kind = "haar";
            t = random_orthogonal(rng, n);
        } else {
            // Angles from a two-element palette so that classes repeat.
            kind = "designed";
            const std::vector<double> palette{angle_pick(rng), angle_pick(rng)};
            std::vector<double> angles;
            int rest = n;
            while (rest >= 2 && rng() % 3 != 0) {
                angles.push_back(palette[rng() % 2]);
                rest -= 2;
            }
            const int p = rest == 0 ? 0 : static_cast<int>(rng() % static_cast<unsigned>(rest + 1));
            t = designed_orthogonal(angles, p, rest - p, rng);
        }
        const auto d = orthogonal_block_decomposition(t, tol);
        const int null_dim = centralizer_algebra(t).dim;
        const int closed = centralizer_dim_closed_form(d, tol);
        Json classes = Json::array();
        for (const auto& c : angle_classes(d, tol)) classes.push_back({{"angle", c.angle}, {"multiplicity", c.multiplicity}});
        out.rows.push_back({{"size", n},
                            {"kind", kind},
                            {"angle_classes", classes},
                            {"plus_dim", d.plus_dim},
                            {"minus_dim", d.minus_dim},
                            {"nullspace_dim", null_dim},
                            {"closed_form_dim", closed}});
        out.agree += null_dim == closed ? 1 : 0;
        ++out.total;
    }
    return out;
}

struct Growth {
    Json rows = Json::array();
    bool linear = true;
};

/// Distinct-angle blocks k = 2, 3, ..., 12 (sizes 4..24): the centralizer dimension should be k.
Growth centralizer_growth(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Growth g;
    int previous = 0;
    for (int blocks = 2; blocks <= 12; ++blocks) {
        std::vector<double> angles;
        for (int k = 0; k < blocks; ++k) angles.push_back(0.1 + 0.25 * k);
        const int dim = centralizer_algebra(designed_orthogonal(angles, 0, 0, rng)).dim;
        g.rows.push_back({{"size", 2 * blocks}, {"distinct_blocks", blocks}, {"nullspace_dim", dim}});
        g.linear = g.linear && dim == blocks && dim > previous;
        previous = dim;
    }
    return g;
}

struct BendSetup {
    RepresentationTable rho;
    SplittingData split;
    AxisFrame frame;
    BendShape shape;
};

BendSetup block_embedded_setup(int genus, int dim, const std::string& split_kind, const Tolerances& tol) {
    if (dim < 2) fail(ErrorKind::invalid_input, "dim must be >= 2");
    RepresentationTable rho = fuchsian_surface(genus).block_embedded(dim);
    SplittingData split = splitting(split_kind, genus);
    AxisFrame frame = axis_frame(rho.evaluate(split.c_generator));
    BendShape shape = bend_shape(frame, tol);
    return {std::move(rho), std::move(split), std::move(frame), std::move(shape)};
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// Subcommands

Report run_embed_tree(const Settings& s) {
    Report r;
    r.command = "embed-tree";
    r.config = {{"tree", s.edges_file.empty() ? s.tree : std::string()},
                {"edges", s.edges_file},
                {"lambda", s.lambda},
                {"midpoints", s.midpoints},
                {"c_budget", s.c_budget},
                {"tol", to_json(s.tol)}};

    Tree tree = [&] {
        if (s.edges_file.empty()) return build_tree(TreeSpec::parse(s.tree));
        std::ifstream in(s.edges_file);
        if (!in) fail(ErrorKind::invalid_input, "cannot open edge list '" + s.edges_file + "'");
        return read_edge_list(in);
    }();
    const TreeEmbedding e = bim_embed(tree, s.lambda, s.midpoints, s.tol);
    const auto m = static_cast<int>(e.embedding.size());

    std::vector<QIPair> vertex_pairs;
    Json pairs = Json::array();
    double max_kernel_error = 0.0;
    Json diameter;
    double diameter_length = -1.0;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            const double dt = e.distances(i, j);
            const double dh = distance(e.embedding.points[i], e.embedding.points[j]);
            const double target = std::pow(s.lambda, dt);
            const double err = std::abs(std::cosh(dh) - target) / target;
            max_kernel_error = std::max(max_kernel_error, err);
            if (i < e.vertex_count && j < e.vertex_count) {
                vertex_pairs.push_back({dt, dh});
                if (dt > diameter_length) {
                    diameter_length = dt;
                    diameter = {{"u", i}, {"v", j}, {"tree_distance", dt}, {"distance", dh}};
                }
            }
            if (m <= 100) pairs.push_back({{"u", i}, {"v", j}, {"tree_distance", dt}, {"distance", dh}, {"kernel_error", err}});
        }

    const double ln = std::log(s.lambda);
    const double ref_k = std::max(ln, 1.0 / ln), ref_c = std::log(2.0) / ln;
    Json results{{"vertices", e.vertex_count},
                 {"points", m},
                 {"edges", tree.edges()},
                 {"embedding",
                  {{"dim_spatial", e.embedding.dim_spatial()},
                   {"neg_eigenvalue", e.embedding.neg_eigenvalue},
                   {"reconstruction_error", e.embedding.reconstruction_error},
                   {"truncated", e.embedding.truncated()}}},
                 {"max_kernel_error", max_kernel_error},
                 {"diameter_pair", diameter}};
    if (vertex_pairs.size() >= 2) {
        const QIEstimate fit = qi_fit(vertex_pairs, s.c_budget);
        const double slack = qi_slack(vertex_pairs, ref_k, ref_c);
        results["qi_fit"] = to_json(fit);
        results["reference_constants"] = {{"K", ref_k}, {"C", ref_c}, {"min_slack", slack}};
        r.csv.push_back({"embed-tree", "lambda=" + format_double(s.lambda), fit.K, fit.C,
                         static_cast<double>(vertex_pairs.size()), max_kernel_error});
        r.csv.push_back({"embed-tree/reference-constants", "lambda=" + format_double(s.lambda), ref_k, ref_c,
                         static_cast<double>(vertex_pairs.size()), -slack});
        r.scatter = qi_scatter("tree embedding, lambda = " + format_double(s.lambda), "tree distance", vertex_pairs, fit);
    }
    results["pairs"] = m <= 100 ? pairs : Json("omitted: more than 100 points");
    r.results = std::move(results);
    return r;
}

Report run_fuchsian(const Settings& s) {
    Report r;
    r.command = "fuchsian";
    r.config = {{"genus", s.genus}, {"ball_radius", s.ball_radius}, {"c_budget", s.c_budget}, {"tol", to_json(s.tol)}};
    const RepresentationTable rho = fuchsian_surface(s.genus);

    Json gens = Json::array();
    for (std::size_t i = 0; i < rho.images().size(); ++i) {
        const auto& g = rho.images()[i];
        gens.push_back({{"name", rho.presentation().generators[i]},
                        {"class", std::string(to_string(g.classification()))},
                        {"translation_length", g.translation_length()}});
    }
    const double relator = rho.relator_residual();
    Json splits{{"amalgam", {{"data", to_json(split_amalgam(s.genus))}, {"residual", splitting_residual(rho, split_amalgam(s.genus))}}}};
    if (s.genus == 2)
        splits["hnn"] = {{"data", to_json(split_hnn_genus2())}, {"residual", splitting_residual(rho, split_hnn_genus2())}};

    const auto pairs = orbit_pairs(rho, HPoint::origin(2), s.ball_radius);
    const QIEstimate fit = qi_fit(pairs, s.c_budget);
    r.results = {{"table", to_json(rho)},
                 {"generators", gens},
                 {"relator_residual", relator},
                 {"splittings", splits},
                 {"orbit_pairs", pairs.size()},
                 {"qi_fit", to_json(fit)}};
    r.csv.push_back({"fuchsian", "genus=" + std::to_string(s.genus), fit.K, fit.C, static_cast<double>(pairs.size()), relator});
    r.scatter = qi_scatter("Fuchsian orbit map, genus " + std::to_string(s.genus), "word length", pairs, fit);
    return r;
}

Report run_rho_t(const Settings& s) {
    Report r;
    r.command = "rho-t";
    r.config = {{"t", s.t},
                {"genus", s.genus},
                {"ball_radius", s.ball_radius},
                {"mode", s.mode},
                {"core_radius", s.core_radius},
                {"samples", s.samples},
                {"max_dim", s.max_dim},
                {"seed", s.seed},
                {"tol", to_json(s.tol)}};
    RhoTOptions opts;
    opts.mode = rho_t_mode(s.mode);
    opts.core_radius = s.core_radius;
    opts.samples_per_length = s.samples;
    opts.seed = s.seed;
    opts.max_dim = s.max_dim;
    opts.tol = s.tol;
    const RepresentationTable base = fuchsian_surface(s.genus);
    const RhoTResult res = rho_t_generators(base, s.t, s.ball_radius, opts);

    Json curve = Json::array();
    for (double L : {0.5, 1.0, 2.0, 4.0}) {
        const double a = scaled_length_curve(L, s.t, 40).back();
        curve.push_back({{"L", L}, {"n", 40}, {"a_n", a}, {"tL", s.t * L}, {"relative_error", std::abs(a - s.t * L) / (s.t * L)}});
    }
    Json gens = Json::array();
    for (std::size_t i = 0; i < res.table.images().size(); ++i) {
        const double ratio = res.diagnostics.length_ratios[i];
        gens.push_back({{"name", base.presentation().generators[i]},
                        {"base_length", res.diagnostics.base_lengths[i]},
                        {"length", res.diagnostics.lengths[i]},
                        {"ratio", ratio},
                        {"relative_error", std::abs(ratio - s.t) / s.t}});
        r.csv.push_back({"rho-t", "t=" + format_double(s.t) + " " + base.presentation().generators[i], std::nullopt,
                         std::nullopt, static_cast<double>(res.diagnostics.orbit_points), std::abs(ratio - s.t)});
    }
    r.results = {{"diagnostics", to_json(res.diagnostics)}, {"generators", gens}, {"closed_form_curve", curve}};
    if (res.diagnostics.dim_spatial <= 64)
        r.results["table"] = to_json(res.table);
    else
        r.results["table"] = "omitted: dimension above 64";
    return r;
}

Report run_bend(const Settings& s) {
    Report r;
    r.command = "bend";
    r.config = {{"t", s.t},       {"genus", s.genus}, {"dim", s.dim},        {"split", s.split},
                {"z", s.z},       {"angles", doubles(s.angles)}, {"bend_scale", s.bend_scale},
                {"seed", s.seed}, {"words", s.words}, {"ball_radius", s.ball_radius},
                {"c_budget", s.c_budget}, {"tol", to_json(s.tol)}};
    if (s.z != "random" && s.z != "identity") fail(ErrorKind::invalid_input, "z must be random or identity, got '" + s.z + "'");

    // t = 1 is the Fuchsian representation itself, placed in H^dim so that bending has room.
    RepresentationTable rho = [&] {
        if (s.t == 1.0) return fuchsian_surface(s.genus).block_embedded(s.dim);
        RhoTOptions opts;
        opts.core_radius = s.core_radius;
        opts.samples_per_length = s.samples;
        opts.seed = s.seed;
        opts.tol = s.tol;
        return rho_t_generators(fuchsian_surface(s.genus), s.t, s.ball_radius, opts).table;
    }();
    const SplittingData split = splitting(s.split, s.genus);
    const AxisFrame frame = axis_frame(rho.evaluate(split.c_generator));
    const BendShape shape = bend_shape(frame, s.tol);

    BendParams params = s.z == "identity" ? BendParams::zero(shape) : BendParams::random(shape, s.seed, s.bend_scale);
    if (!s.angles.empty()) {
        if (s.angles.size() != shape.classes.size())
            fail(ErrorKind::invalid_input, "expected " + std::to_string(shape.classes.size()) + " bend angles, got " +
                                               std::to_string(s.angles.size()));
        params.angles = s.angles;
    }
    const Isometry z = centralizer_element(frame, params, s.tol);
    const RepresentationTable sigma = bend(rho, split, z);

    Json classes = Json::array();
    for (const auto& c : shape.classes) classes.push_back({{"angle", c.angle}, {"multiplicity", c.multiplicity}});
    bool a_equal = true;
    for (const Word& a : split.a_generators) a_equal = a_equal && sigma.evaluate_matrix(a) == rho.evaluate_matrix(a);
    const auto words = mixed_words(split, s.words, 6, s.seed);
    const auto cert = nonconjugacy_certificate(rho, sigma, words, s.tol);
    const double relator = sigma.relator_residual();

    Json results{{"shape", {{"angle_classes", classes}, {"plus_dim", shape.plus_dim}, {"minus_dim", shape.minus_dim}}},
                 {"params",
                  {{"angles", doubles(params.angles)},
                   {"plus_rotation", doubles(params.plus_rotation)},
                   {"minus_rotation", doubles(params.minus_rotation)}}},
                 {"z", to_json(z)},
                 {"commutator_residual", commutator_residual(z, rho.evaluate(split.c_generator))},
                 {"relator_residual", relator},
                 {"splitting", to_json(split)},
                 {"a_images_equal", a_equal},
                 {"table_equal", same_images(rho, sigma)},
                 {"certificate", to_json(cert, rho.presentation().generators)}};
    if (split.kind == SplitKind::hnn) results["hnn_relation_residual"] = hnn_relation_residual(sigma, split);

    std::optional<double> k, c;
    if (rho.dim_spatial() <= 16) {
        const HPoint o = HPoint::origin(rho.dim_spatial());
        const auto base_fit = qi_fit(orbit_pairs(rho, o, s.ball_radius), s.c_budget);
        const auto pairs = orbit_pairs(sigma, o, s.ball_radius);
        const auto bent_fit = qi_fit(pairs, s.c_budget);
        results["qi_fit"] = {{"rho", to_json(base_fit)}, {"sigma", to_json(bent_fit)}};
        k = bent_fit.K;
        c = bent_fit.C;
        r.scatter = qi_scatter("bent orbit map", "word length", pairs, bent_fit);
    } else {
        results["qi_fit"] = "skipped: dimension above 16";
    }
    results["table"] = sigma.dim_spatial() <= 64 ? to_json(sigma) : Json("omitted: dimension above 64");
    r.csv.push_back({"bend", s.split + " z=" + s.z, k, c, static_cast<double>(words.size()), relator});
    r.csv.push_back({"bend/certificate", std::string(cert.verdict()), std::nullopt, std::nullopt,
                     static_cast<double>(words.size()), cert.max_difference});
    r.results = std::move(results);
    return r;
}

Report run_centralizer_dim(const Settings& s) {
    Report r;
    r.command = "centralizer-dim";
    r.config = {{"seed", s.seed}, {"count", s.count}, {"max_size", s.max_size}, {"tol", to_json(s.tol)}};
    const auto sweep = centralizer_sweep(s.seed, s.count, s.max_size, s.tol);
    const auto growth = centralizer_growth(s.seed);
    for (const auto& row : sweep.rows)
        r.csv.push_back({"centralizer", "n=" + std::to_string(row["size"].get<int>()) + " " + row["kind"].get<std::string>(),
                         std::nullopt, std::nullopt, row["nullspace_dim"].get<double>(),
                         std::abs(row["nullspace_dim"].get<double>() - row["closed_form_dim"].get<double>())});
    for (const auto& row : growth.rows)
        r.csv.push_back({"centralizer/growth", "blocks=" + std::to_string(row["distinct_blocks"].get<int>()), std::nullopt,
                         std::nullopt, row["nullspace_dim"].get<double>(), std::nullopt});
    r.results = {{"sweep", sweep.rows},
                 {"agreement", {{"agree", sweep.agree}, {"total", sweep.total}}},
                 {"growth", growth.rows},
                 {"growth_linear", growth.linear}};
    return r;
}

Report run_discreteness(const Settings& s) {
    Report r;
    r.command = "discreteness";
    r.config = {{"genus", s.genus}, {"radius", s.radius}, {"ball_radius", s.ball_radius}, {"c_budget", s.c_budget},
                {"seed", s.seed},   {"tol", to_json(s.tol)}};
    if (s.ball_radius < 1) fail(ErrorKind::invalid_input, "ball_radius must be >= 1");
    const RepresentationTable rho = fuchsian_surface(s.genus);
    const HPoint o = HPoint::origin(2);
    const auto inner = discreteness_count(rho, o, s.radius, s.ball_radius - 1);
    const auto outer = discreteness_count(rho, o, s.radius, s.ball_radius);
    std::mt19937_64 rng(s.seed);
    const Isometry g = random_motion(2, 1.0, rng);
    const auto moved = discreteness_count(rho.conjugated(g), g.apply(o), s.radius, s.ball_radius);

    // Words longer than K (R + C) cannot move the base point by at most R.
    const auto fit = qi_fit(orbit_pairs(rho, o, std::min(s.ball_radius, 6)), s.c_budget);
    const double word_bound = fit.K * (s.radius + fit.C);
    r.results = {{"counts",
                  {{{"ball_radius", s.ball_radius - 1}, {"count", inner}}, {{"ball_radius", s.ball_radius}, {"count", outer}}}},
                 {"stable", inner == outer},
                 {"conjugated_count", moved},
                 {"conjugation_invariant", moved == outer},
                 {"qi_fit", to_json(fit)},
                 {"word_length_bound", word_bound},
                 {"ball_covers_bound", s.ball_radius >= word_bound},
                 {"caveat", "counts are over freely reduced words in a finite ball, not over the whole group"}};
    r.csv.push_back({"discreteness", "R=" + format_double(s.radius) + " ball=" + std::to_string(s.ball_radius - 1),
                     std::nullopt, std::nullopt, static_cast<double>(inner), std::nullopt});
    r.csv.push_back({"discreteness", "R=" + format_double(s.radius) + " ball=" + std::to_string(s.ball_radius), fit.K,
                     fit.C, static_cast<double>(outer), std::nullopt});
    r.csv.push_back({"discreteness/conjugated", "R=" + format_double(s.radius) + " ball=" + std::to_string(s.ball_radius),
                     std::nullopt, std::nullopt, static_cast<double>(moved), std::nullopt});
    return r;
}

Report run_stability(const Settings& s) {
    Report r;
    r.command = "stability";
    r.config = {{"genus", s.genus},   {"ball_radius", s.ball_radius},      {"trials", s.trials},
                {"seed", s.seed},     {"magnitudes", doubles(s.magnitudes)}, {"c_budget", s.c_budget},
                {"tol", to_json(s.tol)}};
    const auto report = stability_probe(fuchsian_surface(s.genus), s.magnitudes, s.trials, s.seed, s.ball_radius, s.c_budget);
    r.results = to_json(report);
    r.csv.push_back({"stability/baseline", "eps=0", report.baseline.K, report.baseline.C, std::nullopt, std::nullopt});
    for (const auto& row : report.rows)
        for (std::size_t i = 0; i < row.trials.size(); ++i)
            r.csv.push_back({"stability", "eps=" + format_double(row.magnitude) + " trial=" + std::to_string(i),
                             row.trials[i].K, row.trials[i].C, std::nullopt, row.trials[i].relator_residual});
    return r;
}

// ---------------------------------------------------------------------------------------------
// Acceptance criteria

namespace {

CriterionResult named(int id, std::string name) {
    CriterionResult c;
    c.id = id;
    c.name = std::move(name);
    return c;
}

CriterionResult criterion_tree_exactness(std::uint64_t seed) {
    CriterionResult c = named(1, "tree kernel exactness");
    const auto start = Clock::now();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> size(2, 40);
    double worst = 0.0;
    int pairs = 0;
    for (int i = 0; i < 50; ++i) {
        const Tree tree = build_tree({TreeSpec::Kind::random, size(rng), 0, seed * 1000 + static_cast<std::uint64_t>(i)});
        for (double lambda : {1.5, 2.0}) {
            const auto e = bim_embed(tree, lambda);
            for (int u = 0; u < tree.size(); ++u)
                for (int v = u + 1; v < tree.size(); ++v) {
                    const double target = std::pow(lambda, tree.distances()(u, v));
                    const double ch = std::cosh(distance(e.embedding.points[u], e.embedding.points[v]));
                    worst = std::max(worst, std::abs(ch - target) / target);
                    ++pairs;
                }
        }
    }
    const double secs = seconds_since(start);
    const bool fast = secs <= 30.0;
    c.passed = worst <= 1e-8 && fast;
    c.detail = "max relative kernel error " + fmt("%.3g", worst) + " over " + std::to_string(pairs) + " pairs";
    c.data = {{"trees", 50}, {"pairs", pairs}, {"max_relative_error", worst}, {"threshold", 1e-8}, {"within_30s", fast}};
    return c;
}

CriterionResult criterion_reference_constants(std::uint64_t seed) {
    CriterionResult c = named(2, "reference QI constants feasible");
    const double k = 1.0 / std::log(2.0), cc = 1.0;
    std::vector<Tree> trees;
    // A long path is the widest dynamic range that double precision still resolves at lambda = 2.
    trees.push_back(build_tree({TreeSpec::Kind::path, 24}));
    trees.push_back(build_tree({TreeSpec::Kind::star, 59}));
    trees.push_back(build_tree({TreeSpec::Kind::regular, 3, 4}));
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> size(2, 60);
    for (int i = 0; i < 20; ++i) trees.push_back(build_tree({TreeSpec::Kind::random, size(rng), 0, seed * 7919 + static_cast<std::uint64_t>(i)}));
    double worst = std::numeric_limits<double>::infinity();
    std::size_t constraints = 0;
    for (const Tree& tree : trees) {
        const auto e = bim_embed(tree, 2.0);
        std::vector<QIPair> pairs;
        for (int u = 0; u < tree.size(); ++u)
            for (int v = u + 1; v < tree.size(); ++v)
                pairs.push_back({tree.distances()(u, v), distance(e.embedding.points[u], e.embedding.points[v])});
        if (pairs.empty()) continue;
        worst = std::min(worst, qi_slack(pairs, k, cc));
        constraints += 2 * pairs.size();
    }
    c.passed = worst >= -1e-6;
    c.detail = "min slack " + fmt("%.4g", worst) + " over " + std::to_string(constraints) + " constraints on " +
               std::to_string(trees.size()) + " trees";
    c.data = {{"K", k}, {"C", cc}, {"trees", trees.size()}, {"constraints", constraints}, {"min_slack", worst}};
    return c;
}

CriterionResult criterion_midpoints() {
    CriterionResult c = named(3, "midpoint separation");
    const double sep = midpoint_separation(50, 2.0);
    const double target = std::acosh(2.0);
    Json counts = Json::array();
    std::vector<double> ratio;
    bool increasing = true;
    int previous = 0;
    for (int m : {10, 20, 40, 80}) {
        const int n = separated_midpoints_in_ball(m, 2.0, 1.0);
        counts.push_back({{"m", m}, {"count", n}});
        ratio.push_back(static_cast<double>(n) / m);
        increasing = increasing && n > previous;
        previous = n;
    }
    const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
    const bool linear = increasing && *lo > 0.0 && (*hi - *lo) <= 0.1 * *hi;
    c.passed = std::abs(sep - target) <= 1e-9 && linear;
    c.detail = "min midpoint distance " + fmt("%.12f", sep) + ", counts/m in [" + fmt("%.3g", *lo) + ", " + fmt("%.3g", *hi) + "]";
    c.data = {{"min_distance", sep}, {"target", target}, {"counts", counts}, {"linear", linear}};
    return c;
}

CriterionResult criterion_rescaling(std::uint64_t seed) {
    CriterionResult c = named(4, "translation-length rescaling");
    const auto start = Clock::now();
    Json curve = Json::array();
    double worst_curve = 0.0;
    for (double t : {0.3, 0.5, 0.8})
        for (double L : {0.5, 1.0, 2.0, 4.0}) {
            const double a = scaled_length_curve(L, t, 40).back();
            const double rel = std::abs(a - t * L) / (t * L);
            worst_curve = std::max(worst_curve, rel);
            curve.push_back({{"t", t}, {"L", L}, {"a_40", a}, {"relative_error", rel}});
        }
    Json fitted = Json::array();
    double worst_fit = 0.0;
    const RepresentationTable base = fuchsian_genus2();
    for (double t : {0.5, 0.8}) {
        RhoTOptions opts;
        opts.seed = seed;
        const auto res = rho_t_generators(base, t, 6, opts);
        for (std::size_t g = 0; g < res.diagnostics.length_ratios.size(); ++g) {
            const double rel = std::abs(res.diagnostics.length_ratios[g] - t) / t;
            worst_fit = std::max(worst_fit, rel);
            fitted.push_back({{"t", t},
                              {"generator", base.presentation().generators[g]},
                              {"ratio", res.diagnostics.length_ratios[g]},
                              {"relative_error", rel},
                              {"dim_spatial", res.diagnostics.dim_spatial}});
        }
    }
    const bool fast = seconds_since(start) <= 300.0;
    const bool curve_ok = worst_curve <= 0.01, fit_ok = worst_fit <= 0.05;
    c.passed = curve_ok && fit_ok && fast;
    c.detail = "closed-form worst " + fmt("%.3g", 100 * worst_curve) + "% (limit 1%)" + (curve_ok ? "" : " FAILS") +
               ", fitted worst " + fmt("%.2g", 100 * worst_fit) + "% (limit 5%)" + (fit_ok ? "" : " FAILS");
    c.data = {{"closed_form", curve}, {"closed_form_worst", worst_curve}, {"fitted", fitted},
              {"fitted_worst", worst_fit}, {"within_5min", fast}};
    return c;
}

CriterionResult criterion_signature(std::uint64_t seed) {
    CriterionResult c = named(5, "hyperbolic-type signature");
    const RepresentationTable rho = fuchsian_genus2();
    const auto ball = cayley_ball(rho.presentation(), 4);
    std::vector<HPoint> orbit;
    for (const Word& w : ball.words) {
        const Vec x = rho.evaluate_matrix(w).col(0);
        orbit.push_back(HPoint::from_spatial(x.tail(2)));
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> size(3, 40);
    const double ts[] = {0.3, 0.5, 0.8};
    int good = 0;
    Json counterexamples = Json::array();
    for (int i = 0; i < 200; ++i) {
        std::vector<std::size_t> idx(orbit.size());
        for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
        const int m = size(rng);
        // Partial Fisher-Yates: the first m indices form a uniform subset.
        for (int k = 0; k < m; ++k) std::swap(idx[static_cast<std::size_t>(k)], idx[k + rng() % (idx.size() - k)]);
        std::vector<HPoint> pts;
        Json words = Json::array();
        for (int k = 0; k < m; ++k) {
            pts.push_back(orbit[idx[static_cast<std::size_t>(k)]]);
            words.push_back(to_json(ball.words[idx[static_cast<std::size_t>(k)]]));
        }
        const double t = ts[i % 3];
        const auto sig = kernel_signature(gram_from_kernel(distance_matrix(pts), KernelSpec::cosh_power(t)));
        if (sig.negative == 1)
            ++good;
        else
            counterexamples.push_back({{"t", t}, {"words", words}, {"negative", sig.negative}, {"positive", sig.positive}, {"zero", sig.zero}});
    }
    c.passed = good == 200;
    c.detail = std::to_string(good) + "/200 Gram matrices with exactly one negative eigenvalue";
    c.data = {{"grams", 200}, {"one_negative", good}, {"counterexamples", counterexamples}};
    return c;
}

CriterionResult criterion_bending(std::uint64_t seed) {
    CriterionResult c = named(6, "bending soundness");
    const Tolerances tol;
    const BendSetup am = block_embedded_setup(2, 4, "amalgam", tol);
    const BendSetup hn = block_embedded_setup(2, 4, "hnn", tol);
    const auto a_words = subgroup_ball(am.split.a_generators, 4);

    double worst_relator = 0.0;
    bool a_equal = true, conj_inconclusive = true;
    std::mt19937_64 rng(seed);
    const auto words = mixed_words(am.split, 100, 6, seed);
    for (int i = 0; i < 20; ++i) {
        const std::uint64_t zs = seed * 100 + static_cast<std::uint64_t>(i);
        const auto sa = bend_amalgam(am.rho, am.split, centralizer_element(am.frame, BendParams::random(am.shape, zs)));
        const auto sh = bend_hnn(hn.rho, hn.split, centralizer_element(hn.frame, BendParams::random(hn.shape, zs)));
        worst_relator = std::max({worst_relator, sa.relator_residual(), sh.relator_residual(), hnn_relation_residual(sh, hn.split)});
        for (const Word& w : a_words) a_equal = a_equal && sa.evaluate_matrix(w) == am.rho.evaluate_matrix(w);
        for (const Word& a : hn.split.a_generators) a_equal = a_equal && sh.evaluate_matrix(a) == hn.rho.evaluate_matrix(a);
        const auto conj = sa.conjugated(random_motion(4, 1.5, rng));
        conj_inconclusive = conj_inconclusive && !nonconjugacy_certificate(sa, conj, words, tol).non_conjugate;
    }
    const bool identity_exact =
        same_images(bend_amalgam(am.rho, am.split, centralizer_element(am.frame, BendParams::zero(am.shape))), am.rho) &&
        same_images(bend_hnn(hn.rho, hn.split, centralizer_element(hn.frame, BendParams::zero(hn.shape))), hn.rho);

    int fired = 0;
    for (int p = 0; p < 100; ++p) {
        const std::uint64_t s1 = seed * 100000 + 2 * static_cast<std::uint64_t>(p), s2 = s1 + 1;
        const auto z1 = centralizer_element(am.frame, BendParams::random(am.shape, s1));
        const auto z2 = centralizer_element(am.frame, BendParams::random(am.shape, s2));
        if (nonconjugacy_certificate(bend_amalgam(am.rho, am.split, z1), bend_amalgam(am.rho, am.split, z2), words, tol).non_conjugate)
            ++fired;
    }
    c.passed = worst_relator <= 1e-6 && a_equal && identity_exact && fired >= 95 && conj_inconclusive;
    c.detail = "relator residual " + fmt("%.2g", worst_relator) + ", NON-CONJUGATE " + std::to_string(fired) +
               "/100, A-restriction " + (a_equal ? "bit-equal" : "differs") + ", conjugates " +
               (conj_inconclusive ? "INCONCLUSIVE" : "misreported");
    c.data = {{"max_relator_residual", worst_relator}, {"a_restriction_equal", a_equal}, {"identity_exact", identity_exact},
              {"non_conjugate_pairs", fired}, {"conjugates_inconclusive", conj_inconclusive}};
    return c;
}

CriterionResult criterion_centralizer(std::uint64_t seed) {
    CriterionResult c = named(7, "centralizer dimension");
    const auto sweep = centralizer_sweep(seed, 100, 12, {});
    const auto growth = centralizer_growth(seed);
    c.passed = sweep.agree == sweep.total && growth.linear;
    c.detail = std::to_string(sweep.agree) + "/" + std::to_string(sweep.total) + " closed-form matches, growth " +
               (growth.linear ? "linear" : "not linear");
    c.data = {{"agree", sweep.agree}, {"total", sweep.total}, {"growth", growth.rows}, {"growth_linear", growth.linear}};
    return c;
}

CriterionResult criterion_discreteness(std::uint64_t seed) {
    CriterionResult c = named(8, "strong-discreteness counts");
    const RepresentationTable rho = fuchsian_genus2();
    const HPoint o = HPoint::origin(2);
    const auto c8 = discreteness_count(rho, o, 2.0, 8);
    const auto c9 = discreteness_count(rho, o, 2.0, 9);
    std::mt19937_64 rng(seed);
    const Isometry g = random_motion(2, 1.0, rng);
    const auto moved = discreteness_count(rho.conjugated(g), g.apply(o), 2.0, 8);
    c.passed = c8 == c9 && moved == c8;
    c.detail = "count(R=2) = " + std::to_string(c8) + " at radius 8, " + std::to_string(c9) + " at radius 9, " +
               std::to_string(moved) + " conjugated";
    c.data = {{"radius_8", c8}, {"radius_9", c9}, {"conjugated", moved}};
    return c;
}

CriterionResult criterion_stability(std::uint64_t seed) {
    CriterionResult c = named(9, "stability probe");
    const auto report = stability_probe(fuchsian_genus2(), {1e-3}, 20, seed, 6, 3.0);
    const auto& row = report.rows.front();
    const bool stable = row.max_relative_k_change <= 0.1 && row.max_relative_c_change <= 0.1;

    const Tolerances tol;
    const BendSetup am = block_embedded_setup(2, 4, "amalgam", tol);
    const HPoint o = HPoint::origin(4);
    const auto base = qi_fit(orbit_pairs(am.rho, o, 6), 3.0);
    double worst_ratio = 1.0;
    Json bent = Json::array();
    for (int i = 0; i < 20; ++i) {
        const auto z = centralizer_element(am.frame, BendParams::random(am.shape, seed * 100 + static_cast<std::uint64_t>(i)));
        const auto fit = qi_fit(orbit_pairs(bend_amalgam(am.rho, am.split, z), o, 6), 3.0);
        const auto ratio = [](double a, double b) { return a == b ? 1.0 : std::max(a, b) / std::min(a, b); };
        worst_ratio = std::max({worst_ratio, ratio(fit.K, base.K), ratio(fit.C, base.C)});
        bent.push_back({{"K", fit.K}, {"C", fit.C}});
    }
    c.passed = stable && worst_ratio <= 2.0;
    c.detail = "eps=1e-3 max change K " + fmt("%.2g", row.max_relative_k_change) + ", C " + fmt("%.2g", row.max_relative_c_change) +
               "; bent (K,C) within factor " + fmt("%.3f", worst_ratio) + " (qualitative)";
    c.data = {{"baseline", to_json(report.baseline)},
              {"perturbed", to_json(report)},
              {"bent_fits", bent},
              {"rho_fit", to_json(base)},
              {"worst_bent_ratio", worst_ratio},
              {"note", "qualitative check of openness only; nothing here is a proof"}};
    return c;
}

std::vector<CriterionResult> run_criteria(std::uint64_t seed, const std::function<void(const CriterionResult&)>& on_result) {
    using Runner = std::function<CriterionResult()>;
    const std::vector<Runner> runners{
        [&] { return criterion_tree_exactness(seed); }, [&] { return criterion_reference_constants(seed); },
        [&] { return criterion_midpoints(); },          [&] { return criterion_rescaling(seed); },
        [&] { return criterion_signature(seed); },      [&] { return criterion_bending(seed); },
        [&] { return criterion_centralizer(seed); },    [&] { return criterion_discreteness(seed); },
        [&] { return criterion_stability(seed); },
    };
    std::vector<CriterionResult> out;
    for (const auto& run : runners) {
        const auto start = Clock::now();
        CriterionResult r;
        try {
            r = run();
        } catch (const Error& e) {
            r.id = static_cast<int>(out.size()) + 1;
            r.name = "criterion " + std::to_string(r.id);
            r.passed = false;
            r.detail = std::string("error: ") + e.what();
            r.data = {{"error", e.what()}};
        }
        r.seconds = seconds_since(start);
        if (on_result) on_result(r);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(std::uint64_t seed, const std::function<void(const CriterionResult&)>& on_result) {
    Settings settings;
    settings.seed = seed;
    auto results = run_criteria(seed, on_result);

    // Determinism: the whole artifact is rebuilt from scratch and compared byte for byte.
    const auto start = Clock::now();
    const std::string first = render_json(verify_report(settings, results));
    const std::string second = render_json(verify_report(settings, run_criteria(seed, {})));
    CriterionResult c = named(10, "determinism");
    c.passed = first == second;
    c.detail = std::string(c.passed ? "identical" : "different") + " artifacts across two runs (hash " +
               content_hash(first) + ")";
    c.data = {{"identical", c.passed}, {"bytes", first.size()}, {"hash", content_hash(first)}};
    c.seconds = seconds_since(start);
    if (on_result) on_result(c);
    results.push_back(std::move(c));
    return results;
}

Report verify_report(const Settings& s, const std::vector<CriterionResult>& results) {
    Report r;
    r.command = "verify";
    r.config = {{"seed", s.seed}, {"tol", to_json(s.tol)}};
    Json criteria = Json::array();
    bool all = true;
    for (const auto& c : results) {
        criteria.push_back({{"id", c.id}, {"name", c.name}, {"passed", c.passed}, {"detail", c.detail}, {"data", c.data}});
        all = all && c.passed;
        r.csv.push_back({"verify", std::to_string(c.id) + " " + c.name, std::nullopt, std::nullopt, c.passed ? 1.0 : 0.0, std::nullopt});
    }
    r.results = {{"all_passed", all}, {"criteria", criteria}};
    return r;
}

std::string summary_line(const CriterionResult& r) {
    return "criterion " + std::to_string(r.id) + ": " + (r.passed ? "PASS" : "FAIL") + " " + r.name + " (" + r.detail +
           ") [" + fmt("%.1f", r.seconds) + "s]";
}

}  // namespace hyperlab
