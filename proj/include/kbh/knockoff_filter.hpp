#pragma once

#include "kbh/lasso.hpp"
#include "kbh/selection.hpp"
#include "kbh/types.hpp"

namespace kbh {

struct WStatistics {
    Vector z;
    Vector z_tilde;
    Vector w;
};

struct EntryStats {
    Vector z;
    Vector z_tilde;
    double max_kkt_residual = 0.0;
};

// Lasso entry penalties on the column-bound design (X, X~); the first half of
// the columns are the originals, the second half their knockoffs.
EntryStats lasso_entry_stats(const Matrix& x_aug, const Vector& y,
                             const LassoPathOptions& options = {});

// W_j = max(Z_j, Z~_j) * (+1 if Z_j > Z~_j else -1).
Vector w_from_z(const Vector& z, const Vector& z_tilde);

WStatistics w_statistics(const Matrix& x, const Matrix& x_tilde, const Vector& y,
                         const LassoPathOptions& options = {});

// Data-dependent knockoff threshold; plus adds one to the numerator.
// Returns +inf when no candidate t qualifies.
double knockoff_threshold(const Vector& w, double alpha, bool plus);

// Rejects {j : W_j >= T}.
SelectionResult knockoff_select(const Vector& w, double alpha, bool plus);

}  // namespace kbh
