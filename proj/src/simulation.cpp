#include "kbh/simulation.hpp"

#include "kbh/csv.hpp"
#include "kbh/error.hpp"
#include "kbh/rng.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace kbh {

namespace {

std::uint64_t replication_seed(const ScenarioConfig& config, int rep) {
    return derive_seed(config.seed, static_cast<std::uint64_t>(rep) + 1000);
}

}  // namespace

void validate(const ScenarioConfig& config) {
    if (config.n < 1 || config.d < 1) throw ParameterError("n and d must be positive");
    if (config.k < 0 || config.k > config.d) throw ParameterError("k must lie in [0, d]");
    classify(config.n, config.d);
    if (!(config.rho > -1.0 && config.rho < 1.0)) throw ParameterError("rho must lie in (-1, 1)");
    if (config.reps < 1) throw ParameterError("reps must be at least 1");
    if (!std::isfinite(config.amplitude)) throw ParameterError("amplitude must be finite");
    AnalysisOptions options;
    options.alpha = config.alpha;
    options.eta = config.eta;
    options.lambda = config.lambda;
    options.methods = config.methods;
    options.tau2_known = config.tau2_known;
    options.s_margin = config.s_margin;
    options.lasso = config.lasso;
    validate(options);
}

Matrix generate_design(Index n, Index d, double rho, std::uint64_t seed) {
    if (!(rho > -1.0 && rho < 1.0)) throw ParameterError("rho must lie in (-1, 1)");
    Rng rng(seed);
    const double innovation_scale = std::sqrt(1.0 - rho * rho);
    Matrix x(n, d);
    for (Index i = 0; i < n; ++i) {
        double prev = rng.normal();
        x(i, 0) = prev;
        for (Index j = 1; j < d; ++j) {
            prev = rho * prev + innovation_scale * rng.normal();
            x(i, j) = prev;
        }
    }
    return x;
}

Vector plant_signal(Index d, Index k, double amplitude) {
    if (k < 0 || k > d) throw ParameterError("k must lie in [0, d]");
    Vector beta = Vector::Zero(d);
    beta.head(k).setConstant(amplitude);
    return beta;
}

std::vector<Index> signal_indices(const ScenarioConfig& config) {
    std::vector<Index> idx(config.d);
    std::iota(idx.begin(), idx.end(), Index{0});
    if (config.placement == SignalPlacement::Random) {
        Rng rng(derive_seed(config.seed, Stream::Design));
        std::shuffle(idx.begin(), idx.end(), rng.engine());
    }
    idx.resize(config.k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

DesignProblem replication_dataset(const ScenarioConfig& config, int rep) {
    const std::uint64_t seed = replication_seed(config, rep);
    DesignProblem problem;
    problem.x = generate_design(config.n, config.d, config.rho, derive_seed(seed, Stream::Design));

    Vector beta = Vector::Zero(config.d);
    for (Index j : signal_indices(config)) beta[j] = config.amplitude;

    const double noise_sd = config.tau2_known ? std::sqrt(*config.tau2_known) : 1.0;
    Rng noise(derive_seed(seed, Stream::Noise));
    problem.y = problem.x * beta + noise_sd * noise.normal_vector(config.n);
    problem.names.reserve(config.d);
    for (Index j = 0; j < config.d; ++j) problem.names.push_back("x" + std::to_string(j + 1));
    return problem;
}

std::uint64_t replication_pipeline_seed(const ScenarioConfig& config, int rep) {
    return derive_seed(replication_seed(config, rep), Stream::Pipeline);
}

AnalysisOptions replication_options(const ScenarioConfig& config, int rep) {
    AnalysisOptions options;
    options.alpha = config.alpha;
    options.eta = config.eta;
    options.lambda = config.lambda;
    options.methods = config.methods;
    options.tau2_known = config.tau2_known;
    options.seed = replication_pipeline_seed(config, rep);
    options.normalize = true;
    options.s_margin = config.s_margin;
    options.lasso = config.lasso;
    return options;
}

ReplicationOutcome run_replication(const ScenarioConfig& config, int rep) {
    ReplicationOutcome out;
    try {
        const DesignProblem problem = replication_dataset(config, rep);
        const Analysis analysis = analyze(problem, replication_options(config, rep));
        std::vector<bool> is_signal(config.d, false);
        for (Index j : signal_indices(config)) is_signal[j] = true;
        for (const SelectionResult& result : analysis.results) {
            MethodOutcome m;
            m.procedure = result.procedure;
            m.rejections = result.r_count;
            for (Index j : result.rejected) {
                if (is_signal[j]) ++m.true_discoveries;
                else ++m.false_discoveries;
            }
            out.methods.push_back(m);
        }
    } catch (const Error& e) {
        out.failed = true;
        out.error = e.what();
        out.methods.clear();
    }
    return out;
}

std::vector<ReplicationOutcome> run_replications_serial(const ScenarioConfig& config) {
    validate(config);
    std::vector<ReplicationOutcome> outcomes(config.reps);
    for (int r = 0; r < config.reps; ++r) outcomes[r] = run_replication(config, r);
    return outcomes;
}

std::vector<ReplicationOutcome> run_replications(const ScenarioConfig& config, int threads) {
    validate(config);
    std::vector<ReplicationOutcome> outcomes(config.reps);
    const int team = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(team)
    for (int r = 0; r < config.reps; ++r) outcomes[r] = run_replication(config, r);
    return outcomes;
}

const MethodSummary& ScenarioSummary::at(Procedure p) const {
    for (const auto& m : methods)
        if (m.procedure == p) return m;
    throw ParameterError("method " + std::string(procedure_token(p)) + " not part of this scenario");
}

ScenarioSummary summarize(const ScenarioConfig& config, const std::vector<ReplicationOutcome>& outcomes) {
    ScenarioSummary summary;
    summary.config = config;
    summary.pi0_true = config.d > 0 ? 1.0 - static_cast<double>(config.k) / config.d : 1.0;
    for (const auto& o : outcomes) (o.failed ? summary.failed_reps : summary.successful_reps)++;
    if (summary.successful_reps == 0)
        throw Error("all " + std::to_string(outcomes.size()) + " replications failed" +
                    (outcomes.empty() ? std::string() : ": " + outcomes.front().error));

    const double reps = summary.successful_reps;
    for (std::size_t m = 0; m < config.methods.size(); ++m) {
        MethodSummary s;
        s.procedure = config.methods[m];
        double fdp_sum = 0.0, fdp_sq = 0.0, power_sum = 0.0, rej_sum = 0.0;
        for (const auto& o : outcomes) {
            if (o.failed) continue;
            const MethodOutcome& mo = o.methods.at(m);
            const double fdp = static_cast<double>(mo.false_discoveries) /
                               static_cast<double>(std::max<Index>(mo.rejections, 1));
            fdp_sum += fdp;
            fdp_sq += fdp * fdp;
            rej_sum += static_cast<double>(mo.rejections);
            if (config.k > 0) power_sum += static_cast<double>(mo.true_discoveries) / config.k;
        }
        s.fdr_hat = fdp_sum / reps;
        s.mean_rejections = rej_sum / reps;
        if (reps > 1) {
            const double var = std::max(0.0, (fdp_sq - reps * s.fdr_hat * s.fdr_hat) / (reps - 1.0));
            s.mc_stderr_fdr = std::sqrt(var / reps);
        }
        if (config.k > 0) s.power_hat = power_sum / reps;
        summary.methods.push_back(s);
    }
    return summary;
}

ScenarioSummary run_scenario(const ScenarioConfig& config, int threads) {
    return summarize(config, run_replications(config, threads));
}

std::string summary_csv_header() {
    return "n,d,k,amplitude,alpha,eta,rho,tau2,reps,seed,method,fdr_hat,mc_stderr_fdr,power_hat,"
           "mean_rejections,failed_reps";
}

std::string summary_csv_rows(const ScenarioSummary& summary) {
    const ScenarioConfig& c = summary.config;
    std::ostringstream out;
    for (const MethodSummary& m : summary.methods) {
        out << c.n << ',' << c.d << ',' << c.k << ',' << format_double(c.amplitude) << ','
            << format_double(c.alpha) << ',' << format_double(c.eta) << ','
            << format_double(c.rho) << ',' << (c.tau2_known ? format_double(*c.tau2_known) : "")
            << ',' << c.reps << ',' << c.seed << ',' << procedure_token(m.procedure) << ','
            << format_double(m.fdr_hat) << ',' << format_double(m.mc_stderr_fdr) << ','
            << (m.power_hat ? format_double(*m.power_hat) : "") << ','
            << format_double(m.mean_rejections) << ',' << summary.failed_reps << '\n';
    }
    return out.str();
}

}  // namespace kbh
