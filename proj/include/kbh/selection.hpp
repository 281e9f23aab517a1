#pragma once

#include "kbh/types.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kbh {

enum class Procedure {
    BH,
    BonferroniBH,
    AdaptiveBonferroniBH,
    KnockoffFilter,      // threshold T* (no +1 in the numerator)
    KnockoffFilterPlus,  // threshold T
};

// CLI token for a procedure: bh, bbh, abbh, knockoff, knockoff-plus.
std::string_view procedure_token(Procedure p);
std::string_view procedure_label(Procedure p);
std::optional<Procedure> parse_procedure(std::string_view token);

struct AuditEntry {
    Index index = 0;       // 0-based column index
    double value = 0.0;    // deciding p-value (or W statistic)
    double threshold = 0.0;
    bool rejected = false;
};

// For p-value procedures a hypothesis is rejected iff value <= threshold; for
// the knockoff filter iff value >= threshold.
struct SelectionResult {
    Procedure procedure = Procedure::BH;
    std::vector<Index> rejected;  // sorted, 0-based
    Index r_count = 0;
    std::vector<AuditEntry> audit;
    std::optional<double> pi0_hat;
    // Step-up level (alpha for BH, alpha / lambda for the screened procedures)
    // or the knockoff threshold.
    double level = 0.0;
    std::optional<double> lambda;
    double threshold = 0.0;
};

struct ScreenedPValues {
    Vector p_tilde;
    std::vector<bool> screened_in;
    double lambda = 0.0;
};

// Benjamini-Hochberg step-up at the given level.
SelectionResult bh(const Vector& p, double level);

// (d - #{p_j <= eta} + 1) / (d (1 - eta)); deliberately not capped at 1.
double storey_pi0(const Vector& p, double eta);

// P~_j = scale * p2_j when p1_j <= lambda, 1 otherwise.
ScreenedPValues screen(const Vector& p1, const Vector& p2, double lambda, double scale = 1.0);

// Screening at lambda (default sqrt(alpha)) followed by step-up at alpha / lambda.
SelectionResult bonferroni_bh(const Vector& p1, const Vector& p2, double alpha,
                              std::optional<double> lambda = std::nullopt);

SelectionResult adaptive_bonferroni_bh(const Vector& p1, const Vector& p2, double alpha,
                                       double eta = 0.5,
                                       std::optional<double> lambda = std::nullopt);

// Adaptive procedure with a caller-supplied pi0 in place of the Storey estimate.
SelectionResult adaptive_bonferroni_bh_with_pi0(const Vector& p1, const Vector& p2, double alpha,
                                                double pi0,
                                                std::optional<double> lambda = std::nullopt);

}  // namespace kbh
