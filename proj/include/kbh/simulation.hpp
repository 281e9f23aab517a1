#pragma once

#include "kbh/lasso.hpp"
#include "kbh/pipeline.hpp"
#include "kbh/selection.hpp"
#include "kbh/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace kbh {

enum class SignalPlacement { First, Random };

struct ScenarioConfig {
    Index n = 100;
    Index d = 20;
    Index k = 4;
    double amplitude = 6.0;
    double alpha = 0.1;
    double eta = 0.5;
    double rho = 0.5;
    int reps = 500;
    std::uint64_t seed = 0;
    std::vector<Procedure> methods = {Procedure::BH, Procedure::BonferroniBH,
                                      Procedure::AdaptiveBonferroniBH,
                                      Procedure::KnockoffFilterPlus};
    // Noise variance known to the analyst; also the variance used to draw noise.
    // Without it the noise is standard normal and estimated.
    std::optional<double> tau2_known;
    std::optional<double> lambda;
    SignalPlacement placement = SignalPlacement::First;
    double s_margin = kDefaultSMargin;
    LassoPathOptions lasso;
};

void validate(const ScenarioConfig& config);

// Rows are independent stationary AR(1) sequences across the columns with unit
// marginal variance and lag-one correlation rho.
Matrix generate_design(Index n, Index d, double rho, std::uint64_t seed);

// beta with the first k entries equal to amplitude.
Vector plant_signal(Index d, Index k, double amplitude);

// Indices carrying signal for the scenario (first k, or a seeded random subset).
std::vector<Index> signal_indices(const ScenarioConfig& config);

struct MethodOutcome {
    Procedure procedure = Procedure::BH;
    Index false_discoveries = 0;  // V
    Index rejections = 0;         // R
    Index true_discoveries = 0;
};

struct ReplicationOutcome {
    bool failed = false;
    std::string error;
    std::vector<MethodOutcome> methods;
};

// Dataset and pipeline seed of replication rep; exposed so that dumped data can
// be re-analysed outside the harness with identical results.
DesignProblem replication_dataset(const ScenarioConfig& config, int rep);
std::uint64_t replication_pipeline_seed(const ScenarioConfig& config, int rep);
AnalysisOptions replication_options(const ScenarioConfig& config, int rep);

ReplicationOutcome run_replication(const ScenarioConfig& config, int rep);

// Reference implementation: replications in index order on the calling thread.
std::vector<ReplicationOutcome> run_replications_serial(const ScenarioConfig& config);

// OpenMP fan-out over replications. threads <= 0 uses the OpenMP default.
// Output is identical to run_replications_serial for any thread count.
std::vector<ReplicationOutcome> run_replications(const ScenarioConfig& config, int threads);

struct MethodSummary {
    Procedure procedure = Procedure::BH;
    double fdr_hat = 0.0;
    double mc_stderr_fdr = 0.0;
    std::optional<double> power_hat;  // absent when k = 0
    double mean_rejections = 0.0;
};

struct ScenarioSummary {
    ScenarioConfig config;
    std::vector<MethodSummary> methods;
    int successful_reps = 0;
    int failed_reps = 0;
    double pi0_true = 1.0;

    const MethodSummary& at(Procedure p) const;
};

// Throws Error when every replication failed.
ScenarioSummary summarize(const ScenarioConfig& config, const std::vector<ReplicationOutcome>& outcomes);

ScenarioSummary run_scenario(const ScenarioConfig& config, int threads = 0);

std::string summary_csv_header();
std::string summary_csv_rows(const ScenarioSummary& summary);

}  // namespace kbh
