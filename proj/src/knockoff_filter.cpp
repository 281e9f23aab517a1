#include "kbh/knockoff_filter.hpp"

#include "kbh/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace kbh {

EntryStats lasso_entry_stats(const Matrix& x_aug, const Vector& y, const LassoPathOptions& options) {
    if (x_aug.cols() % 2 != 0) throw DimensionError("augmented design must have an even column count");
    const Index d = x_aug.cols() / 2;
    const LassoPath path = lasso_path(x_aug, y, options);
    const Vector entry = entry_penalties(path, options.zero_threshold);
    EntryStats out;
    out.z = entry.head(d);
    out.z_tilde = entry.tail(d);
    out.max_kkt_residual = *std::max_element(path.kkt_residuals.begin(), path.kkt_residuals.end());
    return out;
}

Vector w_from_z(const Vector& z, const Vector& z_tilde) {
    if (z.size() != z_tilde.size()) throw DimensionError("Z and Z~ differ in length");
    Vector w(z.size());
    for (Index j = 0; j < z.size(); ++j) {
        const double m = std::max(z[j], z_tilde[j]);
        w[j] = z[j] > z_tilde[j] ? m : -m;
    }
    return w;
}

WStatistics w_statistics(const Matrix& x, const Matrix& x_tilde, const Vector& y,
                         const LassoPathOptions& options) {
    Matrix augmented(x.rows(), 2 * x.cols());
    augmented << x, x_tilde;
    const EntryStats entry = lasso_entry_stats(augmented, y, options);
    return {entry.z, entry.z_tilde, w_from_z(entry.z, entry.z_tilde)};
}

double knockoff_threshold(const Vector& w, double alpha, bool plus) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
    std::vector<double> candidates;
    for (Index j = 0; j < w.size(); ++j)
        if (w[j] != 0.0) candidates.push_back(std::abs(w[j]));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    for (double t : candidates) {
        const double negatives = static_cast<double>((w.array() <= -t).count());
        const double positives = static_cast<double>((w.array() >= t).count());
        const double ratio = ((plus ? 1.0 : 0.0) + negatives) / std::max(positives, 1.0);
        if (ratio <= alpha) return t;
    }
    return std::numeric_limits<double>::infinity();
}

SelectionResult knockoff_select(const Vector& w, double alpha, bool plus) {
    const double t = knockoff_threshold(w, alpha, plus);
    SelectionResult out;
    out.procedure = plus ? Procedure::KnockoffFilterPlus : Procedure::KnockoffFilter;
    out.level = alpha;
    out.threshold = t;
    out.audit.reserve(w.size());
    for (Index j = 0; j < w.size(); ++j) {
        const bool rejected = w[j] >= t;
        out.audit.push_back({j, w[j], t, rejected});
        if (rejected) out.rejected.push_back(j);
    }
    out.r_count = static_cast<Index>(out.rejected.size());
    return out;
}

}  // namespace kbh
