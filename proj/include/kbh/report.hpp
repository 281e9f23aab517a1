#pragma once

#include "kbh/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace kbh {

inline constexpr int kReportSchemaVersion = 1;

enum class ReportFormat { Json, Csv };

struct RunConfig {
    std::string input;
    std::string response = "y";
    AnalysisOptions options;
    ReportFormat format = ReportFormat::Json;
};

struct SelectionReport {
    std::string input;
    std::string response;
    AnalysisOptions options;
    Analysis analysis;
};

// Reads the dataset named by config.input and analyses it.
SelectionReport select(const RunConfig& config);
SelectionReport select(const DesignProblem& problem, const RunConfig& config);

nlohmann::json report_json(const SelectionReport& report);
// One row per variable: estimates, statistics, p-values, W, and a 0/1 column per method.
std::string report_csv(const SelectionReport& report);
std::string render(const SelectionReport& report, ReportFormat format);

struct KnockoffOutput {
    DesignProblem problem;  // as used for construction (normalized / padded)
    KnockoffBundle bundle;
    KnockoffDiagnostics diagnostics;
    Index padded_rows = 0;
};

// Knockoff copy of a dataset's design. Designs with d < n < 2d are padded with
// zero rows as in the selection pipeline.
KnockoffOutput knockoff_for(const DesignProblem& problem, const AnalysisOptions& options);
nlohmann::json knockoff_diagnostics_json(const KnockoffOutput& out);

// Invariant diagnostics on a dataset: rank, case, knockoff identities,
// complement basis orthogonality. "pass" is the conjunction of all checks.
nlohmann::json check_dataset(const DesignProblem& problem, const AnalysisOptions& options);

}  // namespace kbh
