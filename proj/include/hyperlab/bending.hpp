#pragma once

#include "hyperlab/groups.hpp"
#include "hyperlab/isometry.hpp"
#include "hyperlab/spectral.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace hyperlab {

/// Shape of the centralizer of a loxodromic element, read from the block structure of the
/// orthogonal part T of its axis frame.
struct BendShape {
    std::vector<AngleClass> classes;
    int plus_dim = 0;
    int minus_dim = 0;

    int plus_coordinates() const { return plus_dim * (plus_dim - 1) / 2; }
    int minus_coordinates() const { return minus_dim * (minus_dim - 1) / 2; }
};

BendShape bend_shape(const AxisFrame& frame, const Tolerances& tol = {});

/// Parameters of a centralizer element: one extra rotation angle per angle class of T and
/// antisymmetric-generator coordinates (upper triangle, row-major) on the +1 and -1 eigenspaces.
struct BendParams {
    std::vector<double> angles;
    std::vector<double> plus_rotation;
    std::vector<double> minus_rotation;
    std::uint64_t seed = 0;

    static BendParams zero(const BendShape& shape);
    /// Angles uniform in (-pi, pi), generator coordinates N(0, scale^2), from mt19937_64(seed).
    static BendParams random(const BendShape& shape, std::uint64_t seed, double scale = 1.0);
};

/// z = F diag(1, 1, T') F^-1 with T' commuting with T. Throws invalid_input "incompatible bend
/// parameters" on a size mismatch and internal when the commutator check fails.
Isometry centralizer_element(const AxisFrame& frame, const BendParams& params, const Tolerances& tol = {});

/// Relative commutator max|zg - gz| / (scale(z) scale(g)).
double commutator_residual(const Isometry& z, const Isometry& g);

/// sigma_z: A-generators keep their images, B-generators are conjugated by z.
RepresentationTable bend_amalgam(const RepresentationTable& rho, const SplittingData& split, const Isometry& z);
/// sigma_z: the stable letter s is sent to z rho(s), everything else is unchanged.
RepresentationTable bend_hnn(const RepresentationTable& rho, const SplittingData& split, const Isometry& z);
/// Dispatches on split.kind.
RepresentationTable bend(const RepresentationTable& rho, const SplittingData& split, const Isometry& z);

/// max|sigma(f1(c)) - sigma(s) sigma(f2(c)) sigma(s)^-1| for an HNN splitting.
double hnn_relation_residual(const RepresentationTable& sigma, const SplittingData& split);

/// (word, translation length) pairs sorted by word.
std::vector<std::pair<Word, double>> length_spectrum(const RepresentationTable& sigma, const std::vector<Word>& words);

struct NonconjugacyReport {
    bool non_conjugate = false;
    std::optional<Word> witness;
    double max_difference = 0.0;
    double threshold = 0.0;

    std::string_view verdict() const { return non_conjugate ? "NON-CONJUGATE" : "INCONCLUSIVE"; }
};

/// NON-CONJUGATE with a witness when some word's lengths differ by more than 10 tol.rep;
/// otherwise INCONCLUSIVE. Equal spectra prove nothing, so "conjugate" is never reported.
NonconjugacyReport nonconjugacy_certificate(const RepresentationTable& s1, const RepresentationTable& s2,
                                            const std::vector<Word>& words, const Tolerances& tol = {});

/// Seeded list of reduced words that involve both splitting factors (or the stable letter).
std::vector<Word> mixed_words(const SplittingData& split, int count, int max_length, std::uint64_t seed);

}  // namespace hyperlab
