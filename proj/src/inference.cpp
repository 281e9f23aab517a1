#include "kbh/inference.hpp"

#include "kbh/error.hpp"
#include "kbh/special_functions.hpp"

#include <cmath>
#include <string>

namespace kbh {

double OlsFit::tau2() const {
    if (dof <= 0)
        throw DimensionError("residual variance undefined when n = d (no residual degrees of freedom)");
    return rss / dof;
}

OlsFit ols_fit(const DesignProblem& problem) {
    if (problem.y.size() != problem.n()) throw DimensionError("response length does not match design");
    gram_matrix(problem.x);  // rank check
    const Eigen::HouseholderQR<Matrix> qr(problem.x);
    OlsFit fit;
    fit.beta = qr.solve(problem.y);
    fit.rss = (problem.y - problem.x * fit.beta).squaredNorm();
    fit.dof = static_cast<int>(problem.n() - problem.d());
    return fit;
}

EstimateSet knockoff_estimates(const KnockoffBundle& bundle, const Vector& y,
                               std::optional<double> tau2_known) {
    const Index n = bundle.n();
    const Index d = bundle.d();
    if (y.size() != n) throw DimensionError("response length does not match design");
    if (tau2_known && !(*tau2_known > 0.0)) throw ParameterError("known noise variance must be positive");

    const Matrix d_mat = bundle.s.asDiagonal();
    const Eigen::LLT<Matrix> two_sigma_minus_d(2.0 * bundle.sigma - d_mat);
    if (two_sigma_minus_d.info() != Eigen::Success)
        throw NumericalError("2 Sigma - D is numerically singular");
    if (!(bundle.s.minCoeff() > 0.0)) throw NumericalError("D is singular");

    EstimateSet est;
    est.tau2_known = tau2_known;
    est.beta1 = two_sigma_minus_d.solve((bundle.x + bundle.x_tilde).transpose() * y);
    est.beta2 = ((bundle.x - bundle.x_tilde).transpose() * y).cwiseQuotient(bundle.s);
    est.beta_ols = Eigen::LLT<Matrix>(bundle.sigma).solve(bundle.x.transpose() * y);

    est.dof = static_cast<int>(n - 2 * d);
    if (est.dof > 0) {
        Matrix augmented(n, 2 * d);
        augmented << bundle.x, bundle.x_tilde;
        const Eigen::HouseholderQR<Matrix> qr(augmented);
        const Vector residual = y - augmented * qr.solve(y);
        est.tau2_hat = residual.squaredNorm() / est.dof;
    }
    return est;
}

PValuePair t_statistics(const EstimateSet& est, const KnockoffBundle& bundle) {
    const Index d = bundle.d();
    PValuePair out;
    double tau2 = 0.0;
    if (est.tau2_known) {
        tau2 = *est.tau2_known;
        out.dof = kInfiniteDof;
    } else {
        if (est.dof <= 0)
            throw DimensionError("n = 2d leaves no residual degrees of freedom; supply a known noise variance");
        if (!(est.tau2_hat > 0.0))
            throw NumericalError("estimated noise variance is zero (exact fit); supply a known noise variance");
        tau2 = est.tau2_hat;
        out.dof = est.dof;
    }
    const double scale = 1.0 / std::sqrt(2.0 * tau2);

    const Matrix d_mat = bundle.s.asDiagonal();
    const Matrix inv = Eigen::LLT<Matrix>(2.0 * bundle.sigma - d_mat).solve(Matrix::Identity(d, d));
    out.t1 = scale * est.beta1.cwiseQuotient(inv.diagonal().cwiseSqrt());
    out.t2 = scale * est.beta2.cwiseProduct(bundle.s.cwiseSqrt());
    return out;
}

PValuePair pvalue_pair(const EstimateSet& est, const KnockoffBundle& bundle) {
    PValuePair out = t_statistics(est, bundle);
    const Index d = out.t1.size();
    out.p1.resize(d);
    out.p2.resize(d);
    for (Index j = 0; j < d; ++j) {
        out.p1[j] = two_sided_p(out.t1[j], out.dof);
        out.p2[j] = two_sided_p(out.t2[j], out.dof);
    }
    return out;
}

}  // namespace kbh
