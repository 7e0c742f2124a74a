#include "hyperlab/bending.hpp"

#include "hyperlab/parallel.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

namespace hyperlab {

namespace {

Mat antisymmetric(const std::vector<double>& coords, int dim) {
    Mat a = Mat::Zero(dim, dim);
    std::size_t k = 0;
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j) {
            a(i, j) = coords[k];
            a(j, i) = -coords[k];
            ++k;
        }
    return a;
}

bool all_zero(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

bool is_exact_identity(const Isometry& z) {
    const Mat& m = z.matrix();
    return m == Mat::Identity(m.rows(), m.cols());
}

Isometry letter_image(const RepresentationTable& rho, const Word& generator) {
    if (generator.size() != 1 || generator.letters()[0] <= 0)
        fail(ErrorKind::invalid_input, "splitting generators must be single positive letters");
    return rho.images()[static_cast<std::size_t>(generator.letters()[0] - 1)];
}

void require_commutes(const RepresentationTable& rho, const SplittingData& split, const Isometry& z) {
    if (z.dim_spatial() != rho.dim_spatial()) fail(ErrorKind::invalid_input, "bending element has the wrong dimension");
    if (commutator_residual(z, rho.evaluate(split.c_generator)) > 1e-7)
        fail(ErrorKind::invalid_input, "bending element does not commute with the splitting curve");
}

Provenance bent_provenance(const RepresentationTable& rho, const Isometry& z, std::string kind) {
    Provenance p{std::move(kind), rho.provenance().parameters};
    p.parameters["bend_displacement"] = std::acosh(std::max(1.0, z.matrix()(0, 0)));
    return p;
}

}  // namespace

BendShape bend_shape(const AxisFrame& frame, const Tolerances& tol) {
    const auto d = orthogonal_block_decomposition(frame.t, tol);
    return {angle_classes(d, tol), d.plus_dim, d.minus_dim};
}

BendParams BendParams::zero(const BendShape& shape) {
    BendParams p;
    p.angles.assign(shape.classes.size(), 0.0);
    p.plus_rotation.assign(static_cast<std::size_t>(shape.plus_coordinates()), 0.0);
    p.minus_rotation.assign(static_cast<std::size_t>(shape.minus_coordinates()), 0.0);
    return p;
}

BendParams BendParams::random(const BendShape& shape, std::uint64_t seed, double scale) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    std::normal_distribution<double> coord(0.0, scale);
    BendParams p = zero(shape);
    p.seed = seed;
    for (double& a : p.angles) a = angle(rng);
    for (double& c : p.plus_rotation) c = coord(rng);
    for (double& c : p.minus_rotation) c = coord(rng);
    return p;
}

Isometry centralizer_element(const AxisFrame& frame, const BendParams& params, const Tolerances& tol) {
    const auto d = orthogonal_block_decomposition(frame.t, tol);
    const auto classes = angle_classes(d, tol);
    if (params.angles.size() != classes.size() ||
        params.plus_rotation.size() != static_cast<std::size_t>(d.plus_dim * (d.plus_dim - 1) / 2) ||
        params.minus_rotation.size() != static_cast<std::size_t>(d.minus_dim * (d.minus_dim - 1) / 2))
        fail(ErrorKind::invalid_input, "incompatible bend parameters");

    const int n = static_cast<int>(frame.v_plus.size()) - 1;
    if (all_zero(params.angles) && all_zero(params.plus_rotation) && all_zero(params.minus_rotation))
        return Isometry::identity(n);

    // T' in the normal-form basis of T: the class angle added to every block of the class,
    // rotations exp(A) on the fixed and flipped eigenspaces.
    const auto e = d.frame.rows();
    Mat inner = Mat::Zero(e, e);
    Eigen::Index k = 0;
    for (std::size_t c = 0; c < classes.size(); ++c)
        for (int b = 0; b < classes[c].multiplicity; ++b, k += 2) {
            const double a = params.angles[c];
            inner.block(k, k, 2, 2) << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
        }
    if (d.plus_dim > 0) {
        inner.block(k, k, d.plus_dim, d.plus_dim) = antisymmetric(params.plus_rotation, d.plus_dim).exp();
        k += d.plus_dim;
    }
    if (d.minus_dim > 0)
        inner.block(k, k, d.minus_dim, d.minus_dim) = antisymmetric(params.minus_rotation, d.minus_dim).exp();

    Mat full = Mat::Identity(n + 1, n + 1);
    full.bottomRightCorner(e, e) = d.frame * inner * d.frame.transpose();
    Isometry z = Isometry::check(j_polar(frame.frame_matrix() * full * frame.frame_inverse()), tol);

    const Isometry g = Isometry::check(frame.assemble(frame.t), tol);
    if (commutator_residual(z, g) > 1e-7) fail(ErrorKind::numerical, "internal error: centralizer element does not commute");
    return z;
}

double commutator_residual(const Isometry& z, const Isometry& g) {
    const Mat& a = z.matrix();
    const Mat& b = g.matrix();
    return (a * b - b * a).cwiseAbs().maxCoeff() / (entry_scale(a) * entry_scale(b));
}

RepresentationTable bend_amalgam(const RepresentationTable& rho, const SplittingData& split, const Isometry& z) {
    if (split.kind != SplitKind::amalgam) fail(ErrorKind::invalid_input, "bend_amalgam needs an amalgam splitting");
    require_commutes(rho, split, z);
    if (is_exact_identity(z)) return rho;
    std::vector<Isometry> images = rho.images();
    const Isometry zi = z.inverse();
    for (const Word& b : split.b_generators) {
        const auto index = static_cast<std::size_t>(b.letters()[0] - 1);
        images[index] = Isometry::check(j_polar((z * letter_image(rho, b) * zi).matrix()));
    }
    return rho.with_images(std::move(images), bent_provenance(rho, z, "bent_amalgam"));
}

RepresentationTable bend_hnn(const RepresentationTable& rho, const SplittingData& split, const Isometry& z) {
    if (split.kind != SplitKind::hnn) fail(ErrorKind::invalid_input, "bend_hnn needs an HNN splitting");
    require_commutes(rho, split, z);
    if (is_exact_identity(z)) return rho;
    std::vector<Isometry> images = rho.images();
    const auto index = static_cast<std::size_t>(split.stable_letter - 1);
    images[index] = Isometry::check(j_polar((z * images[index]).matrix()));
    return rho.with_images(std::move(images), bent_provenance(rho, z, "bent_hnn"));
}

RepresentationTable bend(const RepresentationTable& rho, const SplittingData& split, const Isometry& z) {
    return split.kind == SplitKind::amalgam ? bend_amalgam(rho, split, z) : bend_hnn(rho, split, z);
}

double hnn_relation_residual(const RepresentationTable& sigma, const SplittingData& split) {
    const Word s = Word::letter(split.stable_letter);
    const auto& [f1, f2] = split.boundary_identifications;
    const Mat lhs = sigma.evaluate_matrix(f1);
    const Mat rhs = sigma.evaluate_matrix(s * f2 * s.inverse());
    return (lhs - rhs).cwiseAbs().maxCoeff();
}

std::vector<std::pair<Word, double>> length_spectrum(const RepresentationTable& sigma, const std::vector<Word>& words) {
    std::vector<std::pair<Word, double>> out(words.size());
    parallel_for(words.size(), [&](std::size_t i) {
        const Isometry g = Isometry::check(sigma.evaluate_matrix(words[i]), sigma.images().front().tolerances());
        out[i] = {words[i], g.translation_length()};
    });
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

NonconjugacyReport nonconjugacy_certificate(const RepresentationTable& s1, const RepresentationTable& s2,
                                            const std::vector<Word>& words, const Tolerances& tol) {
    if (s1.presentation().generators != s2.presentation().generators)
        fail(ErrorKind::invalid_input, "representations of different presentations");
    const auto l1 = length_spectrum(s1, words);
    const auto l2 = length_spectrum(s2, words);
    NonconjugacyReport r;
    r.threshold = 10.0 * tol.rep;
    for (std::size_t i = 0; i < l1.size(); ++i) {
        const double diff = std::abs(l1[i].second - l2[i].second);
        if (diff > r.max_difference) {
            r.max_difference = diff;
            if (diff > r.threshold) r.witness = l1[i].first;
        }
    }
    r.non_conjugate = r.witness.has_value();
    return r;
}

std::vector<Word> mixed_words(const SplittingData& split, int count, int max_length, std::uint64_t seed) {
    if (count < 0 || max_length < 2) fail(ErrorKind::invalid_input, "mixed_words needs max_length >= 2");
    std::set<int> a_letters;
    for (const Word& w : split.a_generators) a_letters.insert(w.letters()[0]);
    std::set<int> other;
    if (split.kind == SplitKind::amalgam)
        for (const Word& w : split.b_generators) other.insert(w.letters()[0]);
    else
        other.insert(split.stable_letter);
    std::vector<int> alphabet;
    for (int l : a_letters) alphabet.insert(alphabet.end(), {l, -l});
    for (int l : other) alphabet.insert(alphabet.end(), {l, -l});

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> length(2, max_length);
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::set<Word> seen;
    std::vector<Word> out;
    for (int attempts = 0; static_cast<int>(out.size()) < count; ++attempts) {
        if (attempts > 1000 * (count + 1)) fail(ErrorKind::invalid_input, "could not generate enough mixed words");
        std::vector<int> letters(static_cast<std::size_t>(length(rng)));
        for (int& l : letters) l = alphabet[pick(rng)];
        const Word w(std::move(letters));
        bool has_a = false, has_other = false;
        for (int l : w.letters()) {
            has_a |= a_letters.contains(std::abs(l));
            has_other |= other.contains(std::abs(l));
        }
        if (has_a && has_other && seen.insert(w).second) out.push_back(w);
    }
    return out;
}

}  // namespace hyperlab
