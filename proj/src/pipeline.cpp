#include "kbh/pipeline.hpp"

#include "kbh/error.hpp"
#include "kbh/rng.hpp"

#include <cmath>
#include <string>

namespace kbh {

void validate(const AnalysisOptions& options) {
    if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
    if (!(options.eta > 0.0 && options.eta < 1.0)) throw ParameterError("eta must lie in (0, 1)");
    if (options.lambda && !(*options.lambda > options.alpha && *options.lambda < 1.0))
        throw ParameterError("lambda must lie in (alpha, 1)");
    if (options.methods.empty()) throw ParameterError("at least one method is required");
    if (options.tau2_known && !(*options.tau2_known > 0.0 && std::isfinite(*options.tau2_known)))
        throw ParameterError("tau2 must be positive");
    if (!(options.s_margin >= 0.0 && options.s_margin < 1.0))
        throw ParameterError("s margin must lie in [0, 1)");
    if (options.lasso.grid_size < 2) throw ParameterError("lasso grid size must be at least 2");
    if (!(options.lasso.grid_ratio > 0.0 && options.lasso.grid_ratio < 1.0))
        throw ParameterError("lasso grid ratio must lie in (0, 1)");
}

DesignCase classify(Index n, Index d) {
    if (n <= d)
        throw DimensionError("need more observations than variables (n = " + std::to_string(n) +
                             ", d = " + std::to_string(d) + ")");
    return n >= 2 * d ? DesignCase::I : DesignCase::II;
}

DesignProblem augment_case2(const DesignProblem& problem, double tau2, std::uint64_t seed) {
    const Index n = problem.n();
    const Index d = problem.d();
    if (!(d < n && n <= 2 * d))
        throw DimensionError("response augmentation applies only when d < n <= 2d (n = " +
                             std::to_string(n) + ", d = " + std::to_string(d) + ")");
    if (!(tau2 > 0.0)) throw ParameterError("augmentation variance must be positive");
    const Index extra = 2 * d - n;

    DesignProblem out = problem;
    out.x.conservativeResize(2 * d, d);
    out.x.bottomRows(extra).setZero();
    out.y.conservativeResize(2 * d);
    Rng rng(seed);
    out.y.tail(extra) = std::sqrt(tau2) * rng.normal_vector(extra);
    return out;
}

std::vector<std::string> rank_deficient_columns(const DesignProblem& problem) {
    Eigen::ColPivHouseholderQR<Matrix> qr(problem.x);
    qr.setThreshold(kRankTolerance);
    std::vector<std::string> out;
    const auto& perm = qr.colsPermutation().indices();
    for (Index k = qr.rank(); k < problem.d(); ++k) {
        const Index j = perm[k];
        out.push_back(static_cast<std::size_t>(j) < problem.names.size()
                          ? problem.names[j]
                          : "column " + std::to_string(j + 1));
    }
    return out;
}

Analysis analyze(const DesignProblem& input, const AnalysisOptions& options) {
    validate(options);
    if (input.y.size() != input.n()) throw DimensionError("response length does not match design rows");

    Analysis out;
    out.n_original = input.n();
    out.design_case = classify(input.n(), input.d());

    DesignProblem problem = options.normalize ? normalize_columns(input) : input;
    try {
        validate(problem);
    } catch (const RankError& e) {
        std::string cols;
        for (const auto& c : rank_deficient_columns(problem)) cols += (cols.empty() ? "" : ", ") + c;
        throw RankError(std::string(e.what()) + (cols.empty() ? "" : "; dependent columns: " + cols));
    }

    std::optional<double> tau2 = options.tau2_known;
    if (out.design_case == DesignCase::II) {
        if (!tau2) tau2 = ols_fit(problem).tau2();
        if (!(*tau2 > 0.0)) throw NumericalError("OLS residual variance is zero; supply tau2");
        out.augmentation_tau2 = tau2;
        problem = augment_case2(problem, *tau2, derive_seed(options.seed, Stream::CaseTwoResponse));
    }

    Vector s;
    if (options.s_override) {
        s = *options.s_override;
        if (s.size() == 1) s = Vector::Constant(problem.d(), s[0]);
        if (s.size() != problem.d()) throw ParameterError("s override must have 1 or d entries");
    } else {
        s = equicorrelated_s(gram_matrix(problem.x), options.s_margin);
    }

    out.bundle = construct_knockoff(problem.x, s, derive_seed(options.seed, Stream::ComplementBasis));
    out.diagnostics = verify_knockoff(out.bundle.x, out.bundle.x_tilde, out.bundle.s);
    out.estimates = knockoff_estimates(out.bundle, problem.y, tau2);
    out.pvalues = pvalue_pair(out.estimates, out.bundle);

    for (Procedure p : options.methods) {
        switch (p) {
            case Procedure::BH:
                out.results.push_back(bh(out.pvalues.p2, options.alpha));
                break;
            case Procedure::BonferroniBH:
                out.results.push_back(
                    bonferroni_bh(out.pvalues.p1, out.pvalues.p2, options.alpha, options.lambda));
                break;
            case Procedure::AdaptiveBonferroniBH:
                out.results.push_back(adaptive_bonferroni_bh(out.pvalues.p1, out.pvalues.p2,
                                                             options.alpha, options.eta,
                                                             options.lambda));
                break;
            case Procedure::KnockoffFilter:
            case Procedure::KnockoffFilterPlus:
                if (!out.w)
                    out.w = w_statistics(out.bundle.x, out.bundle.x_tilde, problem.y, options.lasso);
                out.results.push_back(
                    knockoff_select(out.w->w, options.alpha, p == Procedure::KnockoffFilterPlus));
                break;
        }
    }
    out.problem = std::move(problem);
    return out;
}

}  // namespace kbh
