#pragma once

#include "kbh/inference.hpp"
#include "kbh/knockoff.hpp"
#include "kbh/knockoff_filter.hpp"
#include "kbh/lasso.hpp"
#include "kbh/selection.hpp"
#include "kbh/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace kbh {

// Pipelines shrink the equi-correlated s by this fraction below 2 lambda_min so
// that 2 Sigma - D stays invertible on correlated designs.
inline constexpr double kDefaultSMargin = 0.1;

struct AnalysisOptions {
    double alpha = 0.1;
    double eta = 0.5;
    std::optional<double> lambda;  // screening threshold, default sqrt(alpha)
    std::vector<Procedure> methods = {Procedure::BH, Procedure::BonferroniBH,
                                      Procedure::AdaptiveBonferroniBH,
                                      Procedure::KnockoffFilterPlus};
    std::optional<double> tau2_known;
    std::uint64_t seed = 0;
    bool normalize = true;
    double s_margin = kDefaultSMargin;
    std::optional<Vector> s_override;
    LassoPathOptions lasso;
};

// Throws ParameterError on out-of-range settings.
void validate(const AnalysisOptions& options);

enum class DesignCase { I, II };

struct Analysis {
    DesignCase design_case = DesignCase::I;
    Index n_original = 0;
    DesignProblem problem;  // normalized (if requested) and, in case II, augmented
    std::optional<double> augmentation_tau2;
    KnockoffBundle bundle;
    KnockoffDiagnostics diagnostics;
    EstimateSet estimates;
    PValuePair pvalues;
    std::optional<WStatistics> w;
    std::vector<SelectionResult> results;
};

// Appends 2d - n zero design rows and 2d - n independent N(0, tau2) responses.
// Requires d < n <= 2d.
DesignProblem augment_case2(const DesignProblem& problem, double tau2, std::uint64_t seed);

DesignCase classify(Index n, Index d);

// Knockoffs, paired estimates, p-values and every requested procedure on one
// dataset. Deterministic in (problem, options).
Analysis analyze(const DesignProblem& problem, const AnalysisOptions& options);

// Names the columns that make the design rank deficient, for error messages.
std::vector<std::string> rank_deficient_columns(const DesignProblem& problem);

}  // namespace kbh
