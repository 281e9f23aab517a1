#include "doctest.h"
#include "oracles.hpp"

#include "kbh/csv.hpp"
#include "kbh/report.hpp"
#include "kbh/simulation.hpp"

#include <nlohmann/json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace fs = std::filesystem;
using namespace kbh;

namespace {

struct Workdir {
    fs::path path;
    Workdir() {
        path = fs::temp_directory_path() / ("kbh_cli_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~Workdir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Run kbh_cli(const Workdir& dir, const std::string& args) {
    const std::string out = dir / "stdout.txt";
    const std::string err = dir / "stderr.txt";
    const std::string cmd = std::string(KBH_CLI_PATH) + " " + args + " >" + out + " 2>" + err;
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream(path, std::ios::binary) << text;
}

void write_problem(const std::string& path, const DesignProblem& p) {
    std::ofstream out(path);
    write_dataset(out, p);
}

DesignProblem dataset(Index n, Index d, std::uint64_t seed) {
    ScenarioConfig c;
    c.n = n;
    c.d = d;
    c.k = std::min<Index>(3, d);
    c.seed = seed;
    return replication_dataset(c, 0);
}

}  // namespace

TEST_CASE("simulate matches the frozen golden summary") {
    Workdir dir;
    const std::string golden = std::string(KBH_GOLDEN_DIR);
    const Run r = kbh_cli(dir, "simulate --config " + golden + "/simulate_small.toml --seed 7");
    REQUIRE(r.code == 0);
    CHECK(r.out == slurp(golden + "/simulate_small_seed7.csv"));
}

TEST_CASE("simulate output does not depend on the thread count") {
    Workdir dir;
    write_text(dir / "grid.toml", "n = [40, 60]\nd = 12\nk = [0, 3]\nreps = 20\nrho = 0.2\n");
    const Run one = kbh_cli(dir, "simulate --config " + (dir / "grid.toml") + " --seed 3 --threads 1");
    REQUIRE(one.code == 0);
    for (const char* t : {"2", "4", "0"}) {
        CAPTURE(t);
        const Run many = kbh_cli(dir, "simulate --config " + (dir / "grid.toml") + " --seed 3 --threads " + t);
        CHECK(many.out == one.out);
    }
    CHECK(kbh_cli(dir, "simulate --config " + (dir / "grid.toml") + " --seed 4").out != one.out);
}

TEST_CASE("select is reproducible and honours its flags") {
    Workdir dir;
    write_problem(dir / "data.csv", dataset(80, 10, 11));
    const Run a = kbh_cli(dir, "select --input " + (dir / "data.csv") + " --seed 5");
    REQUIRE(a.code == 0);
    const Run b = kbh_cli(dir, "select --input " + (dir / "data.csv") + " --seed 5 --output " + (dir / "r.json"));
    REQUIRE(b.code == 0);
    CHECK(slurp(dir / "r.json") == a.out);

    const auto report = nlohmann::json::parse(a.out);
    CHECK(report.at("d") == 10);
    CHECK(report.at("methods").size() == 4);

    const Run csv = kbh_cli(dir, "select --input " + (dir / "data.csv") +
                                     " --seed 5 --format csv --methods bbh,knockoff --alpha 0.2");
    REQUIRE(csv.code == 0);
    CHECK(std::count(csv.out.begin(), csv.out.end(), '\n') == 11);
    CHECK(csv.out.find("bbh") != std::string::npos);
}

TEST_CASE("dumped replications re-analyse to the harness decisions") {
    Workdir dir;
    write_text(dir / "grid.toml", "n = 50\nd = 10\nk = 2\namplitude = 1\nreps = 3\n");
    const Run sim = kbh_cli(dir, "simulate --config " + (dir / "grid.toml") + " --seed 9 --dump-data " +
                                     (dir / "dump"));
    REQUIRE(sim.code == 0);
    std::istringstream manifest(slurp(dir / "dump/manifest.csv"));
    std::string line;
    std::getline(manifest, line);
    CHECK(line == "scenario,rep,file,select_seed,tau2");

    ScenarioConfig c;
    c.n = 50;
    c.d = 10;
    c.k = 2;
    c.amplitude = 1;
    c.reps = 3;
    c.seed = 9;
    int rep = 0;
    while (std::getline(manifest, line)) {
        std::vector<std::string> f;
        std::stringstream s(line);
        for (std::string x; std::getline(s, x, ',');) f.push_back(x);
        REQUIRE(f.size() >= 4);
        const Run sel = kbh_cli(dir, "select --input " + (dir / ("dump/" + f[2])) + " --seed " + f[3]);
        REQUIRE(sel.code == 0);
        const auto json = nlohmann::json::parse(sel.out);
        const Analysis a = analyze(replication_dataset(c, rep), replication_options(c, rep));
        for (std::size_t m = 0; m < a.results.size(); ++m) {
            std::vector<Index> selected;
            for (const auto& i : json.at("methods").at(m).at("selected_indices")) selected.push_back(i.get<Index>() - 1);
            CHECK(selected == a.results[m].rejected);
        }
        ++rep;
    }
    CHECK(rep == 3);
}

TEST_CASE("knockoff command on an orthonormal design") {
    Workdir dir;
    std::mt19937_64 rng(5);
    DesignProblem p;
    const Matrix g = oracle::random_normalized_design(40, 6, rng);
    p.x = Eigen::HouseholderQR<Matrix>(g).householderQ() * Matrix::Identity(40, 6);
    p.y = Vector::Ones(40);
    write_problem(dir / "orth.csv", p);
    const Run r = kbh_cli(dir, "knockoff --input " + (dir / "orth.csv") + " --seed 1 --diagnostics " +
                                   (dir / "diag.json"));
    REQUIRE(r.code == 0);
    const auto diag = nlohmann::json::parse(slurp(dir / "diag.json"));
    CHECK(diag.at("diagnostics").at("pass") == true);
    // Orthonormal columns give s = 1 for every variable.
    for (const auto& s : diag.at("s")) CHECK(s.get<double>() == doctest::Approx(1.0));
    std::istringstream in(r.out);
    const NumericTable t = parse_csv(in);
    CHECK(t.header.front() == "x1_knockoff");
    CHECK(t.values.rows() == 40);
    CHECK(t.values.cols() == 6);
    const Matrix cross = t.values.transpose() * p.x;
    CHECK(cross.cwiseAbs().maxCoeff() <= 1e-8);

    CHECK(kbh_cli(dir, "check --input " + (dir / "orth.csv") + " --seed 1").code == 0);
}

TEST_CASE("exit codes") {
    Workdir dir;
    write_problem(dir / "data.csv", dataset(60, 8, 2));
    const std::string in = " --input " + (dir / "data.csv");

    CHECK(kbh_cli(dir, "select" + in + " --seed 1 --alpha 1.5").code == 3);
    CHECK(kbh_cli(dir, "select" + in + " --seed 1 --methods bh,nope").code == 3);
    CHECK(kbh_cli(dir, "select" + in + " --seed 1 --lambda 0.05").code == 3);
    CHECK(kbh_cli(dir, "select" + in).code == 2);
    CHECK(kbh_cli(dir, "select" + in + " --seed 1 --bogus").code == 2);
    CHECK(kbh_cli(dir, "").code == 2);
    CHECK(kbh_cli(dir, "select --input " + (dir / "missing.csv") + " --seed 1").code == 5);

    write_text(dir / "bad.csv", "a,b,y\n1,2,3\n4,oops,6\n");
    const Run parse = kbh_cli(dir, "select --input " + (dir / "bad.csv") + " --seed 1");
    CHECK(parse.code == 4);
    CHECK(parse.err.find("line 3") != std::string::npos);
    CHECK(kbh_cli(dir, "select" + in + " --seed 1 --response nope").code == 4);

    DesignProblem wide;
    wide.x = Matrix::Random(5, 8);
    wide.y = Vector::Random(5);
    write_problem(dir / "wide.csv", wide);
    CHECK(kbh_cli(dir, "select --input " + (dir / "wide.csv") + " --seed 1").code == 6);

    DesignProblem dup = dataset(40, 5, 4);
    dup.x.col(4) = dup.x.col(0);
    write_problem(dir / "dup.csv", dup);
    CHECK(kbh_cli(dir, "select --input " + (dir / "dup.csv") + " --seed 1").code == 6);
    CHECK(kbh_cli(dir, "check --input " + (dir / "dup.csv") + " --seed 1").code == 7);

    write_text(dir / "grid.toml", "n = 40\nd = 5\nseed = 3\n");
    CHECK(kbh_cli(dir, "simulate --config " + (dir / "grid.toml") + " --seed 1").code == 4);
    CHECK(kbh_cli(dir, "simulate --config " + (dir / "nope.toml") + " --seed 1").code == 5);
    write_text(dir / "grid.toml", "n = 40\nd = 5\nalpha = 2\n");
    CHECK(kbh_cli(dir, "simulate --config " + (dir / "grid.toml") + " --seed 1").code == 3);
}
