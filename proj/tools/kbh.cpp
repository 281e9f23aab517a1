// kbh: knockoff-assisted FDR-controlling variable selection.
#include "kbh/csv.hpp"
#include "kbh/error.hpp"
#include "kbh/report.hpp"
#include "kbh/scenario_config.hpp"
#include "kbh/simulation.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kUsage = 2,
    kInvalidParameter = 3,
    kParse = 4,
    kIo = 5,
    kDimension = 6,
    kNumerical = 7,
};

constexpr const char* kExitCodeHelp =
    "Exit codes:\n"
    "  0  success\n"
    "  1  internal error\n"
    "  2  usage error (unknown flag, missing required option)\n"
    "  3  invalid parameter value (alpha, eta, lambda, tau2, methods, ...)\n"
    "  4  malformed input file (CSV or scenario config)\n"
    "  5  I/O failure\n"
    "  6  dimension or rank problem in the design\n"
    "  7  numerical failure, or diagnostics that did not pass\n";

struct CommonFlags {
    std::string input;
    std::string response = "y";
    double alpha = 0.1;
    double eta = 0.5;
    std::optional<double> lambda;
    std::optional<double> tau2;
    std::uint64_t seed = 0;
    std::string methods = "bh,bbh,abbh,knockoff-plus";
    std::string output;
    std::string format = "json";
    bool normalize = true;
    double s_margin = kbh::kDefaultSMargin;
    std::string s_override;
    int grid_size = 100;
    double grid_ratio = 0.01;
};

void add_analysis_flags(CLI::App& cmd, CommonFlags& f, bool with_methods) {
    cmd.add_option("--input", f.input, "Dataset CSV (header row, numeric columns)")->required();
    cmd.add_option("--response", f.response, "Response column name")->capture_default_str();
    cmd.add_option("--seed", f.seed, "Seed for the knockoff basis and case II augmentation")->required();
    cmd.add_option("--tau2", f.tau2, "Known noise variance (switches to normal p-values)");
    cmd.add_flag("--normalize,!--no-normalize", f.normalize, "Scale design columns to unit norm")
        ->capture_default_str();
    cmd.add_option("--s-margin", f.s_margin, "Shrink equi-correlated s below 2*lambda_min by this fraction")
        ->capture_default_str();
    cmd.add_option("--s", f.s_override, "Override s: one value or d comma-separated values");
    cmd.add_option("--output", f.output, "Output path (default stdout)");
    if (with_methods) {
        cmd.add_option("--alpha", f.alpha, "Target FDR level")->capture_default_str();
        cmd.add_option("--eta", f.eta, "Storey pi0 tuning level")->capture_default_str();
        cmd.add_option("--lambda", f.lambda, "Screening threshold (default sqrt(alpha))");
        cmd.add_option("--methods", f.methods, "Comma list of bh,bbh,abbh,knockoff,knockoff-plus")
            ->capture_default_str();
        cmd.add_option("--format", f.format, "Report format")
            ->check(CLI::IsMember({"json", "csv"}))
            ->capture_default_str();
        cmd.add_option("--grid-size", f.grid_size, "Lasso penalty grid size")->capture_default_str();
        cmd.add_option("--grid-ratio", f.grid_ratio, "Smallest/largest lasso penalty")->capture_default_str();
    }
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

kbh::AnalysisOptions to_options(const CommonFlags& f) {
    kbh::AnalysisOptions o;
    o.alpha = f.alpha;
    o.eta = f.eta;
    o.lambda = f.lambda;
    o.tau2_known = f.tau2;
    o.seed = f.seed;
    o.normalize = f.normalize;
    o.s_margin = f.s_margin;
    o.lasso.grid_size = f.grid_size;
    o.lasso.grid_ratio = f.grid_ratio;
    o.methods.clear();
    for (const auto& token : split_commas(f.methods)) {
        const auto p = kbh::parse_procedure(token);
        if (!p) throw kbh::ParameterError("unknown method '" + token + "'");
        o.methods.push_back(*p);
    }
    if (!f.s_override.empty()) {
        const auto parts = split_commas(f.s_override);
        kbh::Vector s(static_cast<kbh::Index>(parts.size()));
        for (std::size_t i = 0; i < parts.size(); ++i) {
            try {
                s[static_cast<kbh::Index>(i)] = std::stod(parts[i]);
            } catch (const std::exception&) {
                throw kbh::ParameterError("--s expects numbers, got '" + parts[i] + "'");
            }
        }
        o.s_override = s;
    }
    kbh::validate(o);
    return o;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw kbh::IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw kbh::IoError("failed writing '" + path + "'");
}

kbh::DesignProblem load_dataset(const CommonFlags& f, bool response_optional) {
    const kbh::NumericTable table = kbh::read_csv(f.input);
    bool has_response = false;
    for (const auto& h : table.header) has_response = has_response || h == f.response;
    if (!has_response && response_optional) {
        kbh::DesignProblem p;
        p.x = table.values;
        p.y = kbh::Vector::Zero(table.values.rows());
        p.names = table.header;
        return p;
    }
    return kbh::design_from_table(table, f.response);
}

int cmd_select(const CommonFlags& f) {
    kbh::RunConfig config;
    config.input = f.input;
    config.response = f.response;
    config.options = to_options(f);
    config.format = f.format == "csv" ? kbh::ReportFormat::Csv : kbh::ReportFormat::Json;
    const kbh::SelectionReport report = kbh::select(config);
    emit(f.output, kbh::render(report, config.format));
    return kOk;
}

int cmd_knockoff(const CommonFlags& f, const std::string& diagnostics_path) {
    const kbh::DesignProblem problem = load_dataset(f, true);
    const kbh::KnockoffOutput out = kbh::knockoff_for(problem, to_options(f));
    std::vector<std::string> header;
    for (const auto& name : out.problem.names) header.push_back(name + "_knockoff");
    std::ostringstream csv;
    kbh::write_csv(csv, header, out.bundle.x_tilde);
    emit(f.output, csv.str());
    const std::string diag = kbh::knockoff_diagnostics_json(out).dump(2) + "\n";
    if (diagnostics_path.empty()) std::cerr << diag;
    else emit(diagnostics_path, diag);
    return out.diagnostics.pass ? kOk : kNumerical;
}

int cmd_check(const CommonFlags& f) {
    const kbh::DesignProblem problem = load_dataset(f, true);
    const nlohmann::json result = kbh::check_dataset(problem, to_options(f));
    emit(f.output, result.dump(2) + "\n");
    return result.at("pass").get<bool>() ? kOk : kNumerical;
}

int cmd_simulate(const std::string& config_path, std::uint64_t seed, int threads,
                 const std::string& output, const std::string& dump_dir) {
    if (threads < 0) throw kbh::ParameterError("--threads must be non-negative");
    const auto grid = kbh::read_scenario_grid(config_path, seed);
    std::ostringstream csv;
    csv << kbh::summary_csv_header() << '\n';
    for (const auto& scenario : grid) csv << kbh::summary_csv_rows(kbh::run_scenario(scenario, threads));

    if (!dump_dir.empty()) {
        namespace fs = std::filesystem;
        std::error_code ec;
        fs::create_directories(dump_dir, ec);
        if (ec) throw kbh::IoError("cannot create '" + dump_dir + "': " + ec.message());
        std::ostringstream manifest;
        manifest << "scenario,rep,file,select_seed,tau2\n";
        for (std::size_t i = 0; i < grid.size(); ++i) {
            for (int r = 0; r < grid[i].reps; ++r) {
                const std::string name =
                    "scenario" + std::to_string(i + 1) + "_rep" + std::to_string(r + 1) + ".csv";
                std::ostringstream data;
                kbh::write_dataset(data, kbh::replication_dataset(grid[i], r));
                emit((fs::path(dump_dir) / name).string(), data.str());
                manifest << i + 1 << ',' << r + 1 << ',' << name << ','
                         << kbh::replication_pipeline_seed(grid[i], r) << ','
                         << (grid[i].tau2_known ? kbh::format_double(*grid[i].tau2_known) : "")
                         << '\n';
            }
        }
        emit((fs::path(dump_dir) / "manifest.csv").string(), manifest.str());
    }
    emit(output, csv.str());
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Knockoff-assisted FDR-controlling variable selection for linear regression"};
    app.footer(kExitCodeHelp);
    app.require_subcommand(1);

    CommonFlags select_flags;
    auto* select_cmd = app.add_subcommand("select", "Run selection procedures on a dataset");
    add_analysis_flags(*select_cmd, select_flags, true);

    CommonFlags knockoff_flags;
    std::string diagnostics_path;
    auto* knockoff_cmd =
        app.add_subcommand("knockoff", "Write the knockoff copy of a dataset's design as CSV");
    add_analysis_flags(*knockoff_cmd, knockoff_flags, false);
    knockoff_cmd->add_option("--diagnostics", diagnostics_path, "Diagnostics JSON path (default stderr)");

    CommonFlags check_flags;
    auto* check_cmd = app.add_subcommand("check", "Run invariant diagnostics on a dataset");
    add_analysis_flags(*check_cmd, check_flags, false);

    std::string sim_config, sim_output, dump_dir;
    std::uint64_t sim_seed = 0;
    int threads = 0;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo FDR and power over a scenario grid");
    sim_cmd->add_option("--config", sim_config, "Scenario grid file (key = value lines)")->required();
    sim_cmd->add_option("--seed", sim_seed, "Master seed")->required();
    sim_cmd->add_option("--threads", threads, "Worker threads (0 = OpenMP default)")->capture_default_str();
    sim_cmd->add_option("--output", sim_output, "CSV output path (default stdout)");
    sim_cmd->add_option("--dump-data", dump_dir, "Directory to write every replication dataset");

    for (auto* cmd : {select_cmd, knockoff_cmd, check_cmd, sim_cmd}) cmd->footer(kExitCodeHelp);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*select_cmd) return cmd_select(select_flags);
        if (*knockoff_cmd) return cmd_knockoff(knockoff_flags, diagnostics_path);
        if (*check_cmd) return cmd_check(check_flags);
        if (*sim_cmd) return cmd_simulate(sim_config, sim_seed, threads, sim_output, dump_dir);
    } catch (const kbh::ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalidParameter;
    } catch (const kbh::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kParse;
    } catch (const kbh::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const kbh::DimensionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDimension;
    } catch (const kbh::RankError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDimension;
    } catch (const kbh::NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kInternal;
}
