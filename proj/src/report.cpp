#include "kbh/report.hpp"

#include "kbh/csv.hpp"
#include "kbh/error.hpp"
#include "kbh/rng.hpp"

#include <cmath>
#include <sstream>

namespace kbh {

namespace {

using nlohmann::json;

json number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

json vector_json(const Vector& v) {
    json out = json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(number(v[i]));
    return out;
}

std::string name_of(const DesignProblem& problem, Index j) {
    if (static_cast<std::size_t>(j) < problem.names.size()) return problem.names[j];
    return "x" + std::to_string(j + 1);
}

json diagnostics_json(const KnockoffDiagnostics& diag) {
    return {{"gram_residual", diag.gram_residual},
            {"cross_residual", diag.cross_residual},
            {"orthogonality_residual", diag.orthogonality_residual},
            {"tolerance", kKnockoffTolerance},
            {"pass", diag.pass}};
}

bool is_knockoff(Procedure p) {
    return p == Procedure::KnockoffFilter || p == Procedure::KnockoffFilterPlus;
}

}  // namespace

SelectionReport select(const RunConfig& config) {
    const DesignProblem problem = design_from_table(read_csv(config.input), config.response);
    return select(problem, config);
}

SelectionReport select(const DesignProblem& problem, const RunConfig& config) {
    SelectionReport report;
    report.input = config.input;
    report.response = config.response;
    report.options = config.options;
    report.analysis = analyze(problem, config.options);
    return report;
}

json report_json(const SelectionReport& report) {
    const Analysis& a = report.analysis;
    const AnalysisOptions& o = report.options;
    const DesignProblem& problem = a.problem;
    const Index d = problem.d();

    json settings = {{"alpha", o.alpha},
                     {"eta", o.eta},
                     {"lambda", o.lambda ? json(*o.lambda) : json(std::sqrt(o.alpha))},
                     {"seed", o.seed},
                     {"normalize", o.normalize},
                     {"s_margin", o.s_margin},
                     {"tau2", o.tau2_known ? json(*o.tau2_known) : json(nullptr)},
                     {"lasso_grid_size", o.lasso.grid_size},
                     {"lasso_grid_ratio", o.lasso.grid_ratio}};
    json methods_list = json::array();
    for (Procedure p : o.methods) methods_list.push_back(procedure_token(p));
    settings["methods"] = methods_list;

    const double tau2_used = a.estimates.tau2_known ? *a.estimates.tau2_known : a.estimates.tau2_hat;
    json noise = {{"dof", a.pvalues.dof ? json(*a.pvalues.dof) : json(nullptr)},
                  {"tau2_hat", a.estimates.dof > 0 ? json(a.estimates.tau2_hat) : json(nullptr)},
                  {"tau2_used", tau2_used},
                  {"known_variance", a.estimates.tau2_known.has_value()},
                  {"augmentation_tau2",
                   a.augmentation_tau2 ? json(*a.augmentation_tau2) : json(nullptr)}};

    const Vector beta_ols = unnormalize_coefficients(problem, a.estimates.beta_ols);
    const Vector beta1 = unnormalize_coefficients(problem, a.estimates.beta1);
    const Vector beta2 = unnormalize_coefficients(problem, a.estimates.beta2);

    json variables = json::array();
    for (Index j = 0; j < d; ++j) {
        json v = {{"index", j + 1},
                  {"name", name_of(problem, j)},
                  {"column_scale", problem.normalized ? problem.column_scale[j] : 1.0},
                  {"beta_ols", number(beta_ols[j])},
                  {"beta1", number(beta1[j])},
                  {"beta2", number(beta2[j])},
                  {"t1", number(a.pvalues.t1[j])},
                  {"t2", number(a.pvalues.t2[j])},
                  {"p1", number(a.pvalues.p1[j])},
                  {"p2", number(a.pvalues.p2[j])}};
        if (a.w) {
            v["z"] = number(a.w->z[j]);
            v["z_tilde"] = number(a.w->z_tilde[j]);
            v["w"] = number(a.w->w[j]);
        }
        variables.push_back(std::move(v));
    }

    json methods = json::array();
    for (const SelectionResult& r : a.results) {
        json selected = json::array();
        json selected_idx = json::array();
        for (Index j : r.rejected) {
            selected.push_back(name_of(problem, j));
            selected_idx.push_back(j + 1);
        }
        json audit = json::array();
        for (const AuditEntry& e : r.audit)
            audit.push_back({{"index", e.index + 1},
                             {"value", number(e.value)},
                             {"threshold", number(e.threshold)},
                             {"rejected", e.rejected}});
        json m = {{"procedure", procedure_label(r.procedure)},
                  {"method", procedure_token(r.procedure)},
                  {"rule", is_knockoff(r.procedure) ? "reject when value >= threshold"
                                                    : "reject when value <= threshold"},
                  {"level", r.level},
                  {"threshold", number(r.threshold)},
                  {"r_count", r.r_count},
                  {"selected", selected},
                  {"selected_indices", selected_idx},
                  {"audit", audit}};
        if (r.lambda) m["lambda"] = *r.lambda;
        if (r.pi0_hat) m["pi0_hat"] = *r.pi0_hat;
        methods.push_back(std::move(m));
    }

    return {{"schema_version", kReportSchemaVersion},
            {"input", report.input},
            {"response", report.response},
            {"case", a.design_case == DesignCase::I ? "I" : "II"},
            {"n", a.n_original},
            {"n_analyzed", problem.n()},
            {"d", d},
            {"settings", settings},
            {"knockoff",
             {{"s", vector_json(a.bundle.s)},
              {"complement_seed", a.bundle.seed},
              {"diagnostics", diagnostics_json(a.diagnostics)}}},
            {"noise", noise},
            {"variables", variables},
            {"methods", methods}};
}

std::string report_csv(const SelectionReport& report) {
    const Analysis& a = report.analysis;
    const DesignProblem& problem = a.problem;
    const Vector beta_ols = unnormalize_coefficients(problem, a.estimates.beta_ols);
    const Vector beta1 = unnormalize_coefficients(problem, a.estimates.beta1);
    const Vector beta2 = unnormalize_coefficients(problem, a.estimates.beta2);

    std::ostringstream out;
    out << "index,name,beta_ols,beta1,beta2,t1,t2,p1,p2";
    if (a.w) out << ",z,z_tilde,w";
    for (const SelectionResult& r : a.results) out << ',' << procedure_token(r.procedure);
    out << '\n';
    for (Index j = 0; j < problem.d(); ++j) {
        out << j + 1 << ',' << name_of(problem, j) << ',' << format_double(beta_ols[j]) << ','
            << format_double(beta1[j]) << ',' << format_double(beta2[j]) << ','
            << format_double(a.pvalues.t1[j]) << ',' << format_double(a.pvalues.t2[j]) << ','
            << format_double(a.pvalues.p1[j]) << ',' << format_double(a.pvalues.p2[j]);
        if (a.w)
            out << ',' << format_double(a.w->z[j]) << ',' << format_double(a.w->z_tilde[j]) << ','
                << format_double(a.w->w[j]);
        for (const SelectionResult& r : a.results) out << ',' << (r.audit[j].rejected ? 1 : 0);
        out << '\n';
    }
    return out.str();
}

std::string render(const SelectionReport& report, ReportFormat format) {
    if (format == ReportFormat::Csv) return report_csv(report);
    return report_json(report).dump(2) + "\n";
}

KnockoffOutput knockoff_for(const DesignProblem& input, const AnalysisOptions& options) {
    validate(options);
    const DesignCase design_case = classify(input.n(), input.d());
    KnockoffOutput out;
    out.problem = options.normalize ? normalize_columns(input) : input;
    validate(out.problem);
    if (design_case == DesignCase::II) {
        out.padded_rows = 2 * input.d() - input.n();
        out.problem.x.conservativeResize(2 * input.d(), input.d());
        out.problem.x.bottomRows(out.padded_rows).setZero();
        out.problem.y.conservativeResize(2 * input.d());
        out.problem.y.tail(out.padded_rows).setZero();
    }
    Vector s;
    if (options.s_override) {
        s = *options.s_override;
        if (s.size() == 1) s = Vector::Constant(out.problem.d(), s[0]);
        if (s.size() != out.problem.d()) throw ParameterError("s override must have 1 or d entries");
    } else {
        s = equicorrelated_s(gram_matrix(out.problem.x), options.s_margin);
    }
    out.bundle = construct_knockoff(out.problem.x, s, derive_seed(options.seed, Stream::ComplementBasis));
    out.diagnostics = verify_knockoff(out.bundle.x, out.bundle.x_tilde, out.bundle.s);
    return out;
}

json knockoff_diagnostics_json(const KnockoffOutput& out) {
    const Index d = out.bundle.d();
    return {{"schema_version", kReportSchemaVersion},
            {"n", out.bundle.n()},
            {"d", d},
            {"padded_rows", out.padded_rows},
            {"normalized", out.problem.normalized},
            {"s", vector_json(out.bundle.s)},
            {"complement_seed", out.bundle.seed},
            {"lambda_min_two_sigma_minus_d",
             min_eigenvalue(2.0 * out.bundle.sigma - Matrix(out.bundle.s.asDiagonal()))},
            {"diagnostics", diagnostics_json(out.diagnostics)}};
}

json check_dataset(const DesignProblem& input, const AnalysisOptions& options) {
    json checks = json::array();
    bool all = true;
    auto add = [&](const std::string& name, json value, bool pass, const std::string& note = {}) {
        json c = {{"check", name}, {"value", std::move(value)}, {"pass", pass}};
        if (!note.empty()) c["note"] = note;
        checks.push_back(std::move(c));
        all = all && pass;
    };

    const Index n = input.n();
    const Index d = input.d();
    add("dimensions", {{"n", n}, {"d", d}}, n > d,
        n > d ? (n >= 2 * d ? "case I (n >= 2d)" : "case II (d < n < 2d), response augmentation")
              : "need n > d");
    if (n <= d) return {{"schema_version", kReportSchemaVersion}, {"checks", checks}, {"pass", false}};

    DesignProblem problem = input;
    try {
        if (options.normalize) problem = normalize_columns(input);
    } catch (const Error& e) {
        add("normalization", nullptr, false, e.what());
        return {{"schema_version", kReportSchemaVersion}, {"checks", checks}, {"pass", false}};
    }

    const Eigen::BDCSVD<Matrix> svd(problem.x);
    const Vector& sv = svd.singularValues();
    const double ratio = sv.minCoeff() / sv.maxCoeff();
    const bool full_rank = ratio > kRankTolerance;
    std::string rank_note;
    if (!full_rank)
        for (const auto& c : rank_deficient_columns(problem)) rank_note += (rank_note.empty() ? "dependent: " : ", ") + c;
    add("full_column_rank", ratio, full_rank, rank_note);
    if (!full_rank) return {{"schema_version", kReportSchemaVersion}, {"checks", checks}, {"pass", false}};

    try {
        const KnockoffOutput ko = knockoff_for(input, options);
        const Matrix& sigma = ko.bundle.sigma;
        add("lambda_min_sigma", min_eigenvalue(sigma), true);
        const double lmin = min_eigenvalue(2.0 * sigma - Matrix(ko.bundle.s.asDiagonal()));
        add("two_sigma_minus_d_positive_definite", lmin, lmin > 1e-10);
        const Matrix& u = ko.bundle.u_tilde;
        const double ortho = (u.transpose() * u - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
        const double perp = (u.transpose() * ko.problem.x).cwiseAbs().maxCoeff();
        add("complement_orthonormal", ortho, ortho <= 1e-10);
        add("complement_orthogonal_to_design", perp, perp <= 1e-10);
        add("knockoff_gram_identity", ko.diagnostics.gram_residual,
            ko.diagnostics.gram_residual <= kKnockoffTolerance);
        add("knockoff_cross_identity", ko.diagnostics.cross_residual,
            ko.diagnostics.cross_residual <= kKnockoffTolerance);
        add("knockoff_sum_difference_orthogonality", ko.diagnostics.orthogonality_residual,
            ko.diagnostics.orthogonality_residual <= kKnockoffTolerance);
        const int dof = static_cast<int>(ko.problem.n() - 2 * d);
        add("residual_dof", dof, dof > 0 || options.tau2_known.has_value() || n < 2 * d,
            dof > 0 ? "" : "no residual degrees of freedom; a known tau2 (or case II augmentation) is used");
    } catch (const Error& e) {
        add("knockoff_construction", nullptr, false, e.what());
    }
    return {{"schema_version", kReportSchemaVersion}, {"checks", checks}, {"pass", all}};
}

}  // namespace kbh
