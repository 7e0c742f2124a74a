#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace hyperlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class ErrorKind {
    invalid_input,  ///< bad parameters or configuration (CLI exit 2)
    numerical,      ///< a numerical or mathematical precondition failed (CLI exit 3)
    acceptance,     ///< an acceptance criterion failed (CLI exit 4)
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

/// Numerical thresholds shared by all modules. Every field is surfaced in the CLI as --tol-*.
struct Tolerances {
    double point = 1e-10;        ///< |Q(x)+1| for HPoint, |Q(x)| for IdealPoint
    double renormalize = 1e-6;   ///< largest |Q(x)+1| an HPoint constructor will renormalize away
    double iso = 1e-8;           ///< max-entry residual of M^T J M - J
    double classify = 1e-7;      ///< spectral-radius and displacement threshold for classification
    double fit = 1e-6;           ///< relative Gram mismatch accepted by fit_isometry
    double embed = 1e-8;         ///< relative reconstruction error of an untruncated embedding
    double signature = 1e-9;     ///< eigenvalue cutoff relative to the spectral norm of a Gram matrix
    double rep = 1e-6;           ///< relator residual of a representation table
    double angle = 1e-9;         ///< rotation angles closer than this form one class
};

/// Scale used for relative max-entry comparisons of matrices with large entries.
inline double entry_scale(const Mat& m) { return std::max(1.0, m.cwiseAbs().maxCoeff()); }

}  // namespace hyperlab
