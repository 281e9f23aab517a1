#include "kbh/selection.hpp"

#include "kbh/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kbh {

namespace {

void check_unit_interval(double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) throw ParameterError(std::string(name) + " must lie in (0, 1)");
}

void check_pvalues(const Vector& p, const char* name) {
    for (Index j = 0; j < p.size(); ++j)
        if (!(p[j] >= 0.0 && p[j] <= 1.0))
            throw ParameterError(std::string(name) + " contains a value outside [0, 1]");
}

// Step-up over arbitrary nonnegative values with thresholds i * level / d.
// Values may exceed 1 (scaled p-values); they are compared as-is.
SelectionResult step_up(const Vector& values, double level, Procedure procedure) {
    const Index d = values.size();
    std::vector<Index> order(d);
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return values[a] < values[b]; });

    Index r = 0;
    for (Index i = d; i >= 1; --i) {
        if (values[order[i - 1]] <= static_cast<double>(i) * level / static_cast<double>(d)) {
            r = i;
            break;
        }
    }

    SelectionResult out;
    out.procedure = procedure;
    out.level = level;
    const double cutoff = r > 0 ? values[order[r - 1]] : -1.0;
    const double pass_threshold = static_cast<double>(r) * level / static_cast<double>(d);
    const double fail_threshold = static_cast<double>(r + 1) * level / static_cast<double>(d);
    out.threshold = r > 0 ? pass_threshold : fail_threshold;
    out.audit.reserve(d);
    for (Index j = 0; j < d; ++j) {
        const bool rejected = r > 0 && values[j] <= cutoff;
        out.audit.push_back({j, values[j], rejected ? pass_threshold : fail_threshold, rejected});
        if (rejected) out.rejected.push_back(j);
    }
    out.r_count = static_cast<Index>(out.rejected.size());
    return out;
}

double resolve_lambda(double alpha, std::optional<double> lambda) {
    check_unit_interval(alpha, "alpha");
    const double lam = lambda.value_or(std::sqrt(alpha));
    // lambda <= alpha would push the testing level alpha / lambda to 1 or more,
    // letting unscreened hypotheses (P~ = 1) be rejected.
    if (!(lam > alpha && lam < 1.0)) throw ParameterError("lambda must lie in (alpha, 1)");
    return lam;
}

SelectionResult screened_step_up(const Vector& p1, const Vector& p2, double alpha,
                                 std::optional<double> lambda, double pi0, Procedure procedure) {
    if (p1.size() != p2.size()) throw DimensionError("p-value vectors differ in length");
    check_pvalues(p1, "p1");
    check_pvalues(p2, "p2");
    const double lam = resolve_lambda(alpha, lambda);
    const ScreenedPValues screened = screen(p1, p2, lam, pi0);
    SelectionResult out = step_up(screened.p_tilde, alpha / lam, procedure);
    out.lambda = lam;
    return out;
}

}  // namespace

std::string_view procedure_token(Procedure p) {
    switch (p) {
        case Procedure::BH: return "bh";
        case Procedure::BonferroniBH: return "bbh";
        case Procedure::AdaptiveBonferroniBH: return "abbh";
        case Procedure::KnockoffFilter: return "knockoff";
        case Procedure::KnockoffFilterPlus: return "knockoff-plus";
    }
    return "unknown";
}

std::string_view procedure_label(Procedure p) {
    switch (p) {
        case Procedure::BH: return "BH";
        case Procedure::BonferroniBH: return "BonferroniBH";
        case Procedure::AdaptiveBonferroniBH: return "AdaptiveBonferroniBH";
        case Procedure::KnockoffFilter: return "KnockoffFilter";
        case Procedure::KnockoffFilterPlus: return "KnockoffFilterPlus";
    }
    return "Unknown";
}

std::optional<Procedure> parse_procedure(std::string_view token) {
    for (Procedure p : {Procedure::BH, Procedure::BonferroniBH, Procedure::AdaptiveBonferroniBH,
                        Procedure::KnockoffFilter, Procedure::KnockoffFilterPlus})
        if (procedure_token(p) == token) return p;
    return std::nullopt;
}

SelectionResult bh(const Vector& p, double level) {
    check_unit_interval(level, "level");
    check_pvalues(p, "p");
    return step_up(p, level, Procedure::BH);
}

double storey_pi0(const Vector& p, double eta) {
    check_unit_interval(eta, "eta");
    const double d = static_cast<double>(p.size());
    if (p.size() == 0) throw DimensionError("storey_pi0 needs at least one p-value");
    const double below = static_cast<double>((p.array() <= eta).count());
    return (d - below + 1.0) / (d * (1.0 - eta));
}

ScreenedPValues screen(const Vector& p1, const Vector& p2, double lambda, double scale) {
    ScreenedPValues out;
    out.lambda = lambda;
    out.p_tilde.resize(p1.size());
    out.screened_in.resize(p1.size());
    for (Index j = 0; j < p1.size(); ++j) {
        const bool in = p1[j] <= lambda;
        out.screened_in[j] = in;
        out.p_tilde[j] = in ? scale * p2[j] : 1.0;
    }
    return out;
}

SelectionResult bonferroni_bh(const Vector& p1, const Vector& p2, double alpha,
                              std::optional<double> lambda) {
    return screened_step_up(p1, p2, alpha, lambda, 1.0, Procedure::BonferroniBH);
}

SelectionResult adaptive_bonferroni_bh(const Vector& p1, const Vector& p2, double alpha, double eta,
                                       std::optional<double> lambda) {
    check_pvalues(p2, "p2");
    const double pi0 = storey_pi0(p2, eta);
    return adaptive_bonferroni_bh_with_pi0(p1, p2, alpha, pi0, lambda);
}

SelectionResult adaptive_bonferroni_bh_with_pi0(const Vector& p1, const Vector& p2, double alpha,
                                                double pi0, std::optional<double> lambda) {
    if (!(pi0 > 0.0) || !std::isfinite(pi0)) throw ParameterError("pi0 must be positive and finite");
    SelectionResult out =
        screened_step_up(p1, p2, alpha, lambda, pi0, Procedure::AdaptiveBonferroniBH);
    out.pi0_hat = pi0;
    return out;
}

}  // namespace kbh
