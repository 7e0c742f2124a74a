#pragma once

#include "hyperlab/groups.hpp"
#include "hyperlab/minkowski.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace hyperlab {

/// One QI constraint: a word (or tree) distance and the corresponding distance in H^N.
struct QIPair {
    double word_length;
    double distance;
};

/// (1/K) L - C <= d <= K L + C for every fitted pair.
struct QIEstimate {
    double K = 1.0;
    double C = 0.0;
    int n_constraints = 0;
    double max_violation = 0.0;  ///< largest constraint excess at (K, C); <= 0 when feasible
    double delta_used = 0.0;     ///< Gromov delta of H^N, arccosh(sqrt 2)
};

double hyperbolic_delta();

/// Smallest K >= 1 whose additive defect C(K) = max over pairs of the two one-sided excesses
/// stays within c_budget; returns that K and C = C(K). Throws invalid_input on fewer than two
/// pairs or a non-positive word length.
QIEstimate qi_fit(const std::vector<QIPair>& pairs, double c_budget = 0.0);

/// C(K): the least C making every constraint hold at multiplicative constant K.
double qi_additive(const std::vector<QIPair>& pairs, double k);

/// Minimum over pairs of the slack of both inequalities at (K, C); negative means violated.
double qi_slack(const std::vector<QIPair>& pairs, double k, double c);

/// Streams every freely reduced word of length 1..radius with its matrix rho(w), in parallel
/// over the first letter. fn(first_letter_slot, length, matrix) is called from worker threads;
/// slots are 0..2*rank-1 in the order x1, x1^-1, x2, ... so callers can merge deterministically.
/// Throws invalid_input "ball too large" past kMaxStreamWords words.
inline constexpr std::uint64_t kMaxStreamWords = 400'000'000;
void stream_ball(const RepresentationTable& rho, int radius,
                 const std::function<void(std::size_t slot, int length, const Mat& m)>& fn);

/// (|w|, d(x0, rho(w) x0)) for every non-empty reduced word of length <= radius, grouped by
/// first letter and depth-first within a group. Word lengths are free-group lengths, an upper
/// bound on the surface group word metric.
std::vector<QIPair> orbit_pairs(const RepresentationTable& rho, const HPoint& x0, int radius);

/// #{w : |w| <= ball_radius, d(x0, rho(w) x0) <= R}, identity included, without storing the ball.
std::uint64_t discreteness_count(const RepresentationTable& rho, const HPoint& x0, double r, int ball_radius);

/// (p . q)_r = (d(p,r) + d(q,r) - d(p,q)) / 2.
double gromov_product(const HPoint& p, const HPoint& q, const HPoint& r);

/// Largest four-point defect min((x.z)_w, (y.z)_w) - (x.y)_w over the three pairings of the
/// first three points, based at w.
double four_point_defect(const HPoint& x, const HPoint& y, const HPoint& z, const HPoint& w);

struct StabilityTrial {
    double K = 0.0;
    double C = 0.0;
    double relator_residual = 0.0;
};

struct StabilityRow {
    double magnitude = 0.0;
    std::vector<StabilityTrial> trials;
    double max_relative_k_change = 0.0;
    double max_relative_c_change = 0.0;
};

struct StabilityReport {
    QIEstimate baseline;
    int ball_radius = 0;
    double c_budget = 0.0;
    std::vector<StabilityRow> rows;
};

/// Elliptic isometry exp(A) about the origin with A antisymmetric on the spatial block,
/// ||A||_F = magnitude, direction drawn from rng.
Isometry random_elliptic(int dim_spatial, double magnitude, std::mt19937_64& rng);

/// Perturbs every generator image g -> g exp(A) with a fresh elliptic of the given magnitude per
/// trial (trial i seeded from seed and i), refits (K, C) on the ball about the origin.
StabilityReport stability_probe(const RepresentationTable& rho, const std::vector<double>& magnitudes, int trials,
                                std::uint64_t seed, int ball_radius = 6, double c_budget = 3.0);

}  // namespace hyperlab
