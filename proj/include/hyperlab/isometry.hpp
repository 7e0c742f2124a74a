#pragma once

#include "hyperlab/common.hpp"
#include "hyperlab/minkowski.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <string_view>
#include <vector>

namespace hyperlab {

enum class IsometryClass { elliptic, parabolic, loxodromic };
std::string_view to_string(IsometryClass c);

/// An element of O+(N,1): M^T J M = J and M preserves the upper sheet. The matrix is immutable;
/// classification and translation length are computed once on first use and shared by copies.
class Isometry {
public:
    /// Validates M. Throws "not J-orthogonal" or "wrong sheet".
    static Isometry check(const Mat& m, const Tolerances& tol = {});
    static Isometry identity(int dim_spatial);
    /// Boost of the given length along the (e0, e1) plane.
    static Isometry boost(int dim_spatial, double length);
    /// Rotation by angle in the spatial (i, j) plane, 1 <= i, j <= N.
    static Isometry rotation(int dim_spatial, int i, int j, double angle);

    const Mat& matrix() const { return m_; }
    int dim_spatial() const { return static_cast<int>(m_.rows()) - 1; }
    const Tolerances& tolerances() const { return tol_; }
    /// max-entry norm of M^T J M - J recorded at validation.
    double residual() const { return residual_; }

    IsometryClass classification() const { return spectral().cls; }
    double spectral_radius() const { return spectral().radius; }
    double translation_length() const { return spectral().length; }

    Isometry operator*(const Isometry& rhs) const;
    Isometry inverse() const;
    Vec apply(const Vec& x) const { return m_ * x; }
    HPoint apply(const HPoint& x) const;

private:
    struct Spectral {
        std::once_flag once;
        IsometryClass cls = IsometryClass::elliptic;
        double radius = 1.0;
        double length = 0.0;
    };

    Isometry(Mat m, double residual, const Tolerances& tol)
        : m_(std::move(m)), residual_(residual), tol_(tol), cache_(std::make_shared<Spectral>()) {}
    const Spectral& spectral() const;

    Mat m_;
    double residual_;
    Tolerances tol_;
    std::shared_ptr<Spectral> cache_;
};

inline Isometry check_isometry(const Mat& m, const Tolerances& tol = {}) { return Isometry::check(m, tol); }
inline IsometryClass classify(const Isometry& m) { return m.classification(); }
inline double translation_length(const Isometry& m) { return m.translation_length(); }

/// Nearest J-orthogonal matrix via the Newton iteration X <- (X + J X^{-T} J) / 2 (the
/// generalized polar decomposition for the indefinite form). Used to remove drift. Matrices with
/// entries above 1e6 are returned unchanged: their J-orthogonality is limited by storage precision.
Mat j_polar(const Mat& m, int max_iterations = 100);

/// Adapted frame of a loxodromic isometry: M v+- = lambda^{+-1} v+-, and M acts on
/// E = (R v+ + R v-)^perp by the orthogonal matrix t in the J-orthonormal basis e_basis.
struct AxisFrame {
    Vec v_plus;
    Vec v_minus;
    Mat e_basis;  ///< (N+1) x (N-1), columns J-orthonormal and spacelike
    double lambda = 1.0;
    Mat t;        ///< (N-1) x (N-1) orthogonal

    /// Columns [v+, v-, E].
    Mat frame_matrix() const;
    /// Inverse of frame_matrix() computed from its J-Gram matrix.
    Mat frame_inverse() const;
    /// frame * diag(lambda, 1/lambda, inner) * frame^-1.
    Mat assemble(const Mat& inner) const;
    /// Point of the axis at signed arc-length s: (e^s v+ + e^-s v-)/sqrt(2).
    Vec axis_point(double s) const;
};

AxisFrame axis_frame(const Isometry& m);

enum class Completion {
    none,              ///< require the sources to span R^{N+1}
    minimal_rotation,  ///< extend isometrically, closest to the identity on the complement
    guided,            ///< extend isometrically, closest to the supplied hint operator
};

struct FitOptions {
    Completion completion = Completion::none;
    std::optional<Mat> hint;  ///< required for Completion::guided
    Tolerances tol{};
};

struct FitResult {
    Isometry isometry;
    double residual;  ///< max_i d(M s_i, t_i)
    int rank;         ///< rank of the source configuration
};

/// Indefinite Procrustes: the isometry carrying the columns of `sources` onto those of `targets`.
/// Columns are Minkowski vectors (points of H^N, possibly up to roundoff).
FitResult fit_isometry(const Mat& sources, const Mat& targets, const FitOptions& opts = {});
FitResult fit_isometry(const std::vector<HPoint>& sources, const std::vector<HPoint>& targets,
                       const FitOptions& opts = {});

}  // namespace hyperlab
