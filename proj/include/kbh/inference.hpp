#pragma once

#include "kbh/knockoff.hpp"
#include "kbh/types.hpp"

#include <optional>

namespace kbh {

struct OlsFit {
    Vector beta;
    double rss = 0.0;
    int dof = 0;  // n - d

    // RSS / (n - d). Throws DimensionError when n = d.
    double tau2() const;
};

OlsFit ols_fit(const DesignProblem& problem);

// Paired estimators from the augmented (X, X~) regression.
struct EstimateSet {
    Vector beta_ols;
    Vector beta1;  // (2 Sigma - D)^-1 (X + X~)'Y
    Vector beta2;  // D^-1 (X - X~)'Y
    double tau2_hat = 0.0;  // RSS of Y on (X, X~) over n - 2d; 0 when n = 2d
    int dof = 0;            // n - 2d
    std::optional<double> tau2_known;
};

EstimateSet knockoff_estimates(const KnockoffBundle& bundle, const Vector& y,
                               std::optional<double> tau2_known = std::nullopt);

struct PValuePair {
    Vector t1;  // screening statistics
    Vector t2;  // testing statistics
    Vector p1;
    Vector p2;
    Dof dof;
};

// Standardised statistics only (p-value fields left empty). Uses the known
// variance when the estimate set carries one, otherwise tau2_hat with n - 2d dof.
PValuePair t_statistics(const EstimateSet& est, const KnockoffBundle& bundle);

PValuePair pvalue_pair(const EstimateSet& est, const KnockoffBundle& bundle);

}  // namespace kbh
