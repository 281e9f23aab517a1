#include "kbh/knockoff.hpp"

#include "kbh/error.hpp"
#include "kbh/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kbh {

namespace {

std::string column_label(const DesignProblem& problem, Index j) {
    if (static_cast<std::size_t>(j) < problem.names.size()) return problem.names[j];
    return "column " + std::to_string(j + 1);
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

void validate(const DesignProblem& problem) {
    if (problem.n() < 1 || problem.d() < 1)
        throw DimensionError("design must have at least one row and one column");
    if (problem.y.size() != problem.n())
        throw DimensionError("response length " + std::to_string(problem.y.size()) +
                             " does not match design rows " + std::to_string(problem.n()));
    if (problem.n() < problem.d())
        throw DimensionError("design has fewer rows (" + std::to_string(problem.n()) +
                             ") than columns (" + std::to_string(problem.d()) + ")");
    if (!problem.names.empty() && problem.names.size() != static_cast<std::size_t>(problem.d()))
        throw DimensionError("variable names do not match design columns");
    if (problem.normalized) {
        for (Index j = 0; j < problem.d(); ++j) {
            if (std::abs(problem.x.col(j).norm() - 1.0) > 1e-10)
                throw DimensionError("normalized flag set but " + column_label(problem, j) +
                                     " does not have unit norm");
        }
    }
    gram_matrix(problem.x);
}

DesignProblem normalize_columns(DesignProblem problem) {
    problem.column_scale.resize(problem.d());
    for (Index j = 0; j < problem.d(); ++j) {
        const double norm = problem.x.col(j).norm();
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw RankError(column_label(problem, j) + " has zero or non-finite norm");
        problem.x.col(j) /= norm;
        problem.column_scale[j] = norm;
    }
    problem.normalized = true;
    return problem;
}

Vector unnormalize_coefficients(const DesignProblem& problem, const Vector& beta) {
    if (!problem.normalized) return beta;
    return beta.cwiseQuotient(problem.column_scale);
}

Matrix gram_matrix(const Matrix& x) {
    if (x.rows() < x.cols())
        throw RankError("design with " + std::to_string(x.rows()) + " rows cannot have rank " +
                        std::to_string(x.cols()));
    const Eigen::BDCSVD<Matrix> svd(x);
    const Vector& sv = svd.singularValues();
    if (sv.size() == 0 || !(sv.minCoeff() > kRankTolerance * sv.maxCoeff()))
        throw RankError("design is rank deficient (smallest singular value " +
                        std::to_string(sv.size() ? sv.minCoeff() : 0.0) + ")");
    Matrix sigma = x.transpose() * x;
    return symmetrize(sigma);
}

double min_eigenvalue(const Matrix& symmetric) {
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetric, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
    return eig.eigenvalues()[0];
}

Vector equicorrelated_s(const Matrix& sigma, double margin) {
    if (sigma.rows() != sigma.cols() || sigma.rows() == 0)
        throw DimensionError("Gram matrix must be square and non-empty");
    if (!(margin >= 0.0 && margin < 1.0)) throw ParameterError("s margin must lie in [0, 1)");
    if ((sigma.diagonal().array() - 1.0).abs().maxCoeff() > 1e-6)
        throw DimensionError("equi-correlated knockoffs require a normalized design (unit diagonal Gram)");
    const double lambda_min = min_eigenvalue(sigma);
    const double s = std::max(std::min(2.0 * lambda_min * (1.0 - margin), 1.0), 1e-10);
    return Vector::Constant(sigma.rows(), s);
}

Matrix psd_sqrt(const Matrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("psd_sqrt needs a square matrix");
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(m));
    if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
    Vector values = eig.eigenvalues();
    const double scale = std::max(1.0, std::abs(values.maxCoeff()));
    if (values.minCoeff() < -1e-8 * scale)
        throw NumericalError("matrix is not positive semidefinite (eigenvalue " +
                             std::to_string(values.minCoeff()) + ")");
    values = values.cwiseMax(0.0).cwiseSqrt();
    const Matrix& v = eig.eigenvectors();
    return symmetrize(v * values.asDiagonal() * v.transpose());
}

Matrix complement_basis(const Matrix& x, std::uint64_t seed) {
    const Index n = x.rows();
    const Index d = x.cols();
    if (n < 2 * d)
        throw DimensionError("knockoff construction needs n >= 2d (n = " + std::to_string(n) +
                             ", d = " + std::to_string(d) + ")");
    Rng rng(seed);
    Matrix augmented(n, 2 * d);
    augmented.leftCols(d) = x;
    augmented.rightCols(d) = rng.normal_matrix(n, d);

    const Eigen::HouseholderQR<Matrix> qr(augmented);
    const Matrix thin_q = qr.householderQ() * Matrix::Identity(n, 2 * d);
    Matrix u = thin_q.rightCols(d);

    // One re-orthogonalisation pass against span(X) tightens U'X to rounding level.
    const Matrix q_x = thin_q.leftCols(d);
    u -= q_x * (q_x.transpose() * u);
    const Eigen::HouseholderQR<Matrix> requr(u);
    Matrix u_orth = requr.householderQ() * Matrix::Identity(n, d);
    return u_orth;
}

KnockoffBundle construct_knockoff(const Matrix& x, const Vector& s, std::uint64_t seed) {
    const Index d = x.cols();
    if (s.size() != d) throw DimensionError("s must have one entry per design column");
    if (!(s.minCoeff() > 0.0)) throw ParameterError("s must be strictly positive");

    KnockoffBundle bundle;
    bundle.x = x;
    bundle.sigma = gram_matrix(x);
    bundle.s = s;
    bundle.seed = seed;

    const Matrix two_sigma_minus_d = 2.0 * bundle.sigma - Matrix(s.asDiagonal());
    const double lambda_min = min_eigenvalue(two_sigma_minus_d);
    if (!(lambda_min > 1e-10))
        throw NumericalError("2 Sigma - D is not positive definite (smallest eigenvalue " +
                             std::to_string(lambda_min) +
                             "); the design is too collinear for this s, use a positive s margin");

    bundle.u_tilde = complement_basis(x, seed);

    const Eigen::LLT<Matrix> sigma_llt(bundle.sigma);
    if (sigma_llt.info() != Eigen::Success) throw NumericalError("Gram matrix is not positive definite");
    const Matrix sigma_inv_d = sigma_llt.solve(Matrix(s.asDiagonal()));  // Sigma^-1 D
    const Matrix inner = symmetrize(2.0 * Matrix(s.asDiagonal()) - s.asDiagonal() * sigma_inv_d);
    const Matrix c = psd_sqrt(inner);

    bundle.x_tilde = x - x * sigma_inv_d + bundle.u_tilde * c;
    return bundle;
}

KnockoffDiagnostics verify_knockoff(const Matrix& x, const Matrix& x_tilde, const Vector& s,
                                    double tolerance) {
    if (x.rows() != x_tilde.rows() || x.cols() != x_tilde.cols() || s.size() != x.cols())
        throw DimensionError("knockoff diagnostics need matching shapes");
    const Matrix sigma = x.transpose() * x;
    KnockoffDiagnostics out;
    out.gram_residual = (x_tilde.transpose() * x_tilde - sigma).cwiseAbs().maxCoeff();
    out.cross_residual =
        (x_tilde.transpose() * x - (sigma - Matrix(s.asDiagonal()))).cwiseAbs().maxCoeff();
    out.orthogonality_residual = ((x + x_tilde).transpose() * (x - x_tilde)).cwiseAbs().maxCoeff();
    out.pass = out.gram_residual <= tolerance && out.cross_residual <= tolerance &&
               out.orthogonality_residual <= tolerance;
    return out;
}

}  // namespace kbh
