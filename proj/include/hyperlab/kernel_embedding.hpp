#pragma once

#include "hyperlab/groups.hpp"
#include "hyperlab/isometry.hpp"
#include "hyperlab/minkowski.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace hyperlab {

enum class KernelKind { tree_lambda, cosh_power };
std::string_view to_string(KernelKind k);

/// kappa(d) = lambda^d (trees, lambda > 1) or cosh(d)^t (surfaces, 0 < t <= 1).
struct KernelSpec {
    KernelKind kind = KernelKind::tree_lambda;
    double parameter = 2.0;

    static KernelSpec tree(double lambda);
    static KernelSpec cosh_power(double t);

    /// Throws invalid_input when the parameter is outside its range.
    void validate() const;
    double operator()(double d) const;
};

struct GramMatrix {
    Mat entries;       ///< G_ij = -kappa(d_ij)
    Mat source_dists;  ///< the input distances
    KernelSpec kernel;
};

/// Checks that `dists` is a metric (symmetric, zero diagonal, triangle inequality up to
/// 1e-12 relative to the largest distance) and applies the kernel. The triangle inequality is
/// checked on all triples up to 200 points and on a fixed pseudo-random sample of 10^6 triples
/// beyond that.
GramMatrix gram_from_kernel(const Mat& dists, const KernelSpec& kernel);

struct Signature {
    int negative = 0;
    int positive = 0;
    int zero = 0;  ///< |eigenvalue| <= tau_sig
};
/// Eigenvalue signs of G with tau_sig = tol.signature * ||G||_2.
Signature kernel_signature(const GramMatrix& g, const Tolerances& tol = {});

/// Minkowski multidimensional scaling of a Gram matrix.
struct Embedding {
    KernelSpec kernel;
    Mat coords;                            ///< (N+1) x m, column i is the point v_i
    std::vector<HPoint> points;            ///< the columns snapped onto the hyperboloid
    double neg_eigenvalue = 0.0;           ///< the eigenvalue that supplies the time coordinate
    std::vector<double> kept_spectrum;     ///< positive eigenvalues used, descending
    std::vector<double> dropped_spectrum;  ///< positive eigenvalues above tau_sig cut by max_dim
    std::vector<double> null_spectrum;     ///< eigenvalues in (-tau_sig, tau_sig), ascending
    Mat eigenvectors;                      ///< m x (N+1): negative eigenvector, then kept positives
    double reconstruction_error = 0.0;     ///< max |B(v_i,v_j) - G_ij| / max(1, |G_ij|)
    double max_snap = 0.0;                 ///< max |Q(v_i) + 1| before snapping

    int dim_spatial() const { return static_cast<int>(coords.rows()) - 1; }
    std::size_t size() const { return static_cast<std::size_t>(coords.cols()); }
    bool truncated() const { return !dropped_spectrum.empty(); }
};

/// Eigendecomposes G and keeps the single negative eigenpair plus the largest `max_dim` positive
/// ones (all above tau_sig when max_dim < 0). Throws numerical "kernel not of hyperbolic type at
/// this configuration" unless exactly one eigenvalue is below -tau_sig, and "embedding
/// reconstruction failed" when an untruncated embedding misses tol.embed.
Embedding minkowski_embed(const GramMatrix& g, int max_dim = -1, const Tolerances& tol = {});

/// The isometry v_i -> v_perm(i) over the pairs (i, perm(i)) given. When the domain does not
/// span R^{N+1} the map is completed isometrically with the smallest rotation of the complement.
FitResult equivariant_operator(const Embedding& emb, const std::vector<std::pair<int, int>>& perm,
                               const Tolerances& tol = {});

enum class RhoTMode {
    galerkin,  ///< compress the exact action onto the embedded span, then J-polar
    suborbit,  ///< exact on the sub-orbit, completed isometrically toward the Galerkin operator
};
std::string_view to_string(RhoTMode m);

struct RhoTOptions {
    RhoTMode mode = RhoTMode::galerkin;
    int core_radius = 3;         ///< exhaustive ball radius of the orbit set
    int samples_per_length = 24; ///< sampled words per length above the core
    std::uint64_t seed = 1;
    int max_dim = -1;            ///< spatial truncation, < 0 keeps every eigenvalue above tau_sig
    Tolerances tol{};
};

struct RhoTDiagnostics {
    std::size_t orbit_points = 0;
    int dim_spatial = 0;
    double neg_eigenvalue = 0.0;
    std::size_t dropped_count = 0;
    double dropped_max = 0.0;
    std::size_t null_count = 0;
    std::vector<double> polar_defects;    ///< max|M^T J M - J| of each operator before J-polar
    std::vector<double> fit_residuals;    ///< max d(M v_u, v_{gamma u}) over the sub-orbit
    std::vector<double> base_lengths;     ///< translation lengths of the base generators
    std::vector<double> lengths;          ///< translation lengths of the fitted generators
    std::vector<double> length_ratios;    ///< lengths / base_lengths
    double relator_residual = 0.0;        ///< max|rho_t(r) - I|
    double relator_displacement = 0.0;    ///< d(v_e, rho_t(r) v_e)
    double rescaled_distortion = 0.0;     ///< max |d(v_i, v_j) - t d(x_i, x_j)| over the orbit set
};

struct RhoTResult {
    RepresentationTable table;
    RhoTDiagnostics diagnostics;
    std::vector<Word> orbit_words;
};

/// Orbit set used by rho_t_generators: the exhaustive ball of radius min(ball_radius, core), the
/// generator powers gamma^{+-p} for p <= ball_radius, and for each length above the core a seeded
/// sample of reduced words together with their left neighbours x w. Deduplicated by orbit point,
/// first occurrence kept; the identity comes first.
std::vector<Word> rho_t_orbit_words(const RepresentationTable& base, int ball_radius, const RhoTOptions& opts);

/// The cosh^t representation of a Fuchsian group, realized on the span of an embedded orbit of
/// o = (1, 0, 0).
RhoTResult rho_t_generators(const RepresentationTable& base, double t, int ball_radius, const RhoTOptions& opts = {});

/// a_n = (1/n) arccosh(cosh(nL)^t) for n = 1..n_max, evaluated in log scale.
std::vector<double> scaled_length_curve(double length, double t, int n_max);

/// f_t(g(o))(b) = (B(o,b) / B(g(o),b))^{t+1} at b = (1, cos theta, sin theta).
std::vector<double> boundary_kernel_sample(const Isometry& g, const HPoint& o, double t,
                                           const std::vector<double>& angles);

/// Hyperbolic distance matrix of a set of points.
Mat distance_matrix(const std::vector<HPoint>& points);

}  // namespace hyperlab
