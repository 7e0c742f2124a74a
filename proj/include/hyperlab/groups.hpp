#pragma once

#include "hyperlab/isometry.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

namespace hyperlab {

/// A freely reduced word. Letters are signed 1-based generator indices: +i is the i-th generator,
/// -i its inverse. Ordering is ShortLex with a1 < b1 < a2 < ... < a1^-1 < b1^-1 < ...
class Word {
public:
    Word() = default;
    /// Freely reduces the given letters.
    explicit Word(std::vector<int> letters);
    static Word letter(int l) { return Word(std::vector<int>{l}); }

    const std::vector<int>& letters() const { return letters_; }
    std::size_t size() const { return letters_.size(); }
    bool empty() const { return letters_.empty(); }
    int max_generator() const;

    Word inverse() const;
    Word operator*(const Word& rhs) const;
    Word power(int n) const;

    /// Generator names joined by spaces, inverses marked with "^-1"; "e" for the empty word.
    std::string to_string(const std::vector<std::string>& names) const;

    /// ShortLex comparison; needs the number of generators to rank inverse letters.
    static bool shortlex_less(const Word& a, const Word& b, int rank);
    bool operator==(const Word&) const = default;
    /// Plain lexicographic order on letters, for use as a map key.
    auto operator<=>(const Word& rhs) const { return letters_ <=> rhs.letters_; }

private:
    friend Word reduce(const std::vector<int>& letters);
    std::vector<int> letters_;
};

/// Free reduction of a raw letter sequence.
Word reduce(const std::vector<int>& letters);
/// [x, y] = x y x^-1 y^-1.
Word commutator(const Word& x, const Word& y);

enum class PresentationKind { free, surface };

struct GroupPresentation {
    PresentationKind kind = PresentationKind::free;
    int genus = 0;  ///< surface groups only
    std::vector<std::string> generators;
    std::vector<Word> relators;

    int rank() const { return static_cast<int>(generators.size()); }

    static GroupPresentation free_group(int rank);
    /// <a1, b1, ..., ag, bg | [a1,b1] ... [ag,bg]>, generator order a1, b1, a2, b2, ...
    static GroupPresentation surface(int genus);
};

struct BallPolicy {
    enum class Kind { exhaustive, sampled } kind = Kind::exhaustive;
    int per_length = 0;      ///< sampled: words per length
    std::uint64_t seed = 0;  ///< sampled: RNG seed

    static BallPolicy exhaustive() { return {}; }
    static BallPolicy sampled(int k, std::uint64_t seed) { return {Kind::sampled, k, seed}; }
};

struct CayleyBall {
    std::vector<Word> words;  ///< ShortLex order (exhaustive) or per-length sample order
    /// Surface groups are enumerated by free reduction only, so distinct words may represent the
    /// same element.
    bool duplicates_possible = false;
};

/// Upper bound on the number of words an exhaustive enumeration will materialize.
inline constexpr std::uint64_t kMaxBallWords = 8'000'000;

/// Number of freely reduced words of length <= radius over `rank` generators.
std::uint64_t reduced_word_count(int rank, int radius);

/// Words of length <= radius. Exhaustive enumeration refuses balls above kMaxBallWords ("ball too
/// large"); for genus 2 this admits radius 8 and rejects radius 9.
CayleyBall cayley_ball(const GroupPresentation& p, int radius, const BallPolicy& policy = {});

/// Where a table came from; `parameters` are echoed into reports.
struct Provenance {
    std::string kind;  ///< "fuchsian", "block_embedded", "rho_t", "bent", "conjugated", ...
    std::map<std::string, double> parameters;
};

/// Generator images of a representation, with a shared, thread-safe cache of evaluated words.
class RepresentationTable {
public:
    RepresentationTable(GroupPresentation presentation, std::vector<Isometry> images, Provenance provenance);

    const GroupPresentation& presentation() const { return presentation_; }
    const std::vector<Isometry>& images() const { return images_; }
    const Provenance& provenance() const { return provenance_; }
    int dim_spatial() const { return images_.front().dim_spatial(); }

    /// Image of a single signed letter.
    const Mat& letter_matrix(int letter) const;
    /// rho(w) as a left-to-right product, J-polar renormalized every 50 letters. Cached.
    Isometry evaluate(const Word& w) const;
    /// Uncached product without validation, for hot loops.
    Mat evaluate_matrix(const Word& w) const;

    /// max over relators r of max|rho(r) - I|.
    double relator_residual() const;
    /// Same table with every image replaced by g rho g^-1.
    RepresentationTable conjugated(const Isometry& g) const;
    /// Images placed in the top-left block of O(N,1), identity on the remaining coordinates.
    RepresentationTable block_embedded(int dim_spatial) const;
    /// New table with the same presentation and different generator images.
    RepresentationTable with_images(std::vector<Isometry> images, Provenance provenance) const;

private:
    struct Cache {
        std::shared_mutex mutex;
        std::map<Word, Mat> words;
    };

    GroupPresentation presentation_;
    std::vector<Isometry> images_;
    std::vector<Mat> inverses_;
    Provenance provenance_;
    std::shared_ptr<Cache> cache_;
};

/// Discrete faithful representation of the genus-g surface group into O+(2,1) from the side
/// pairings of the regular hyperbolic 4g-gon with all vertex angles pi/(2g). Sides 4i..4i+3 carry
/// the labels a, b, a^-1, b^-1 of handle i.
RepresentationTable fuchsian_surface(int genus);
inline RepresentationTable fuchsian_genus2() { return fuchsian_surface(2); }

enum class SplitKind { amalgam, hnn };

struct SplittingData {
    SplitKind kind = SplitKind::amalgam;
    std::vector<Word> a_generators;
    std::vector<Word> b_generators;  ///< amalgam only
    /// The element a bending parameter must centralize: c for the amalgam, f1(c) for the HNN case.
    Word c_generator;
    int stable_letter = 0;  ///< hnn only: 1-based generator index
    /// hnn only: (f1(c), f2(c)) with f1(c) = s f2(c) s^-1 in the group.
    std::pair<Word, Word> boundary_identifications;
};

/// A = <a1, b1>, B = <a2, b2, ..., ag, bg>, C = <[a1, b1]>.
SplittingData split_amalgam(int genus);
inline SplittingData split_amalgam_genus2() { return split_amalgam(2); }
/// Cut along a1 with stable letter s = b1: A = <a1, a2, b2>, f1(c) = [a2, b2] a1, f2(c) = a1.
SplittingData split_hnn_genus2();

/// max|rho(w1) - rho(w2)| for the identification a splitting asserts: c * ([a2,b2]...[ag,bg]) for an
/// amalgam, f1(c) vs s f2(c) s^-1 for an HNN extension.
double splitting_residual(const RepresentationTable& rho, const SplittingData& split);

/// Pairs (u, v) of nontrivial words, u in the A-ball and v in the B-ball of the given radius, with
/// |rho(u) - rho(v)| <= tol, together with the max commutator residual of those elements with c.
struct IntersectionReport {
    std::vector<std::pair<Word, Word>> shared;
    double max_commutator_with_c = 0.0;
    std::size_t a_words = 0;
    std::size_t b_words = 0;
};
IntersectionReport amalgam_intersection(const RepresentationTable& rho, const SplittingData& split, int radius,
                                        double tol = 1e-6);

/// Words over the given generator words of length <= radius, freely reduced in the letters of
/// the sub-generators (the identity excluded).
std::vector<Word> subgroup_ball(const std::vector<Word>& generators, int radius);

}  // namespace hyperlab
