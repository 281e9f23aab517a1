#pragma once

#include "kbh/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kbh {

// A fixed-design regression instance y = X beta + noise.
struct DesignProblem {
    Vector y;
    Matrix x;
    // True when every column of x has unit Euclidean norm.
    bool normalized = false;
    // Original column norms when normalized; coefficients on the normalized
    // scale divide by these to return to the caller's units.
    Vector column_scale;
    std::vector<std::string> names;

    Index n() const { return x.rows(); }
    Index d() const { return x.cols(); }
};

// Validates shapes and full column rank. Throws DimensionError/RankError.
void validate(const DesignProblem& problem);

// Scales every column of the design to unit norm and records the scale.
// A zero column raises RankError naming the column.
DesignProblem normalize_columns(DesignProblem problem);

// Converts coefficients estimated on normalized columns back to input units.
Vector unnormalize_coefficients(const DesignProblem& problem, const Vector& beta);

struct KnockoffBundle {
    Matrix x;
    Matrix sigma;
    Vector s;
    Matrix x_tilde;
    Matrix u_tilde;
    std::uint64_t seed = 0;

    Index n() const { return x.rows(); }
    Index d() const { return x.cols(); }
};

struct KnockoffDiagnostics {
    double gram_residual = 0.0;         // max |X~'X~ - Sigma|
    double cross_residual = 0.0;        // max |X~'X - (Sigma - D)|
    double orthogonality_residual = 0.0;// max |(X + X~)'(X - X~)|
    bool pass = false;
};

inline constexpr double kKnockoffTolerance = 1e-8;
inline constexpr double kRankTolerance = 1e-10;

// Sigma = X'X. Throws RankError when sigma_min(X) <= 1e-10 sigma_max(X).
Matrix gram_matrix(const Matrix& x);

// Equi-correlated D = s I with s = min(2 lambda_min(Sigma) (1 - margin), 1).
// margin = 0 is the textbook rule, which leaves 2 Sigma - D singular whenever
// lambda_min <= 1/2; a positive margin keeps it positive definite.
// Requires unit diagonal (normalized columns).
Vector equicorrelated_s(const Matrix& sigma, double margin = 0.0);

// Symmetric PSD square root via eigendecomposition. Eigenvalues in
// [-1e-8 scale, 0) are clamped to zero, more negative ones throw NumericalError.
Matrix psd_sqrt(const Matrix& m);

// n x d orthonormal basis orthogonal to the column space of x, built by
// Householder QR of [x | G] with G a seeded Gaussian block.
Matrix complement_basis(const Matrix& x, std::uint64_t seed);

// X~ = X Sigma^-1 (Sigma - D) + U~ (2D - D Sigma^-1 D)^{1/2}.
KnockoffBundle construct_knockoff(const Matrix& x, const Vector& s, std::uint64_t seed);

KnockoffDiagnostics verify_knockoff(const Matrix& x, const Matrix& x_tilde, const Vector& s,
                                    double tolerance = kKnockoffTolerance);

// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& symmetric);

}  // namespace kbh
