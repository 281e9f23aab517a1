#include "doctest.h"
#include "oracles.hpp"

#include "kbh/error.hpp"
#include "kbh/simulation.hpp"

#include <cmath>

using namespace kbh;

namespace {

bool same_outcomes(const std::vector<ReplicationOutcome>& a, const std::vector<ReplicationOutcome>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t r = 0; r < a.size(); ++r) {
        if (a[r].failed != b[r].failed || a[r].methods.size() != b[r].methods.size()) return false;
        for (std::size_t m = 0; m < a[r].methods.size(); ++m) {
            const auto& x = a[r].methods[m];
            const auto& y = b[r].methods[m];
            if (x.procedure != y.procedure || x.rejections != y.rejections ||
                x.false_discoveries != y.false_discoveries || x.true_discoveries != y.true_discoveries)
                return false;
        }
    }
    return true;
}

ReplicationOutcome outcome(Index v, Index r, Index td) {
    ReplicationOutcome o;
    o.methods.push_back({Procedure::BH, v, r, td});
    return o;
}

}  // namespace

TEST_CASE("AR(1) designs have the requested correlation") {
    const Index n = 10000;
    const Matrix iid = generate_design(n, 4, 0.0, 1);
    for (Index a = 0; a < 4; ++a)
        for (Index b = a + 1; b < 4; ++b)
            CHECK(std::abs(oracle::sample_correlation(iid.col(a), iid.col(b))) <= 4.0 / std::sqrt(n));

    const Matrix ar = generate_design(n, 6, 0.5, 2);
    for (Index j = 0; j < 6; ++j) {
        const double var = (ar.col(j).array() - ar.col(j).mean()).square().sum() / (n - 1);
        CHECK(var == doctest::Approx(1.0).epsilon(0.05));
    }
    for (Index j = 0; j + 1 < 6; ++j)
        CHECK(oracle::sample_correlation(ar.col(j), ar.col(j + 1)) == doctest::Approx(0.5).epsilon(0.06));
    for (Index j = 0; j + 2 < 6; ++j)
        CHECK(std::abs(oracle::sample_correlation(ar.col(j), ar.col(j + 2)) - 0.25) <= 0.03);

    CHECK(generate_design(50, 5, 0.3, 9) == generate_design(50, 5, 0.3, 9));
    CHECK(generate_design(50, 5, 0.3, 9) != generate_design(50, 5, 0.3, 10));
    CHECK_THROWS_AS(generate_design(50, 5, 1.0, 9), ParameterError);
}

TEST_CASE("plant_signal and signal placement") {
    const Vector b = plant_signal(5, 2, 3.5);
    CHECK(b[0] == 3.5);
    CHECK(b[1] == 3.5);
    CHECK(b.tail(3).isZero());
    CHECK(plant_signal(4, 0, 2.0).isZero());
    CHECK_THROWS_AS(plant_signal(4, 5, 1.0), ParameterError);

    ScenarioConfig c;
    c.d = 20;
    c.k = 5;
    c.placement = SignalPlacement::Random;
    c.seed = 77;
    const auto idx = signal_indices(c);
    CHECK(idx.size() == 5);
    CHECK(std::is_sorted(idx.begin(), idx.end()));
    CHECK(idx == signal_indices(c));
    c.placement = SignalPlacement::First;
    CHECK(signal_indices(c) == std::vector<Index>{0, 1, 2, 3, 4});
}

TEST_CASE("replication datasets") {
    ScenarioConfig c;
    c.n = 40;
    c.d = 8;
    c.k = 2;
    c.seed = 5;
    const DesignProblem a = replication_dataset(c, 3);
    CHECK(a.x.rows() == 40);
    CHECK(a.names.front() == "x1");
    CHECK(a.names.back() == "x8");
    const DesignProblem again = replication_dataset(c, 3);
    CHECK(a.y == again.y);
    CHECK(a.y != replication_dataset(c, 4).y);
    CHECK(replication_pipeline_seed(c, 3) != replication_pipeline_seed(c, 4));
}

TEST_CASE("no signal means every rejection is false") {
    ScenarioConfig c;
    c.n = 60;
    c.d = 12;
    c.k = 0;
    c.amplitude = 0.0;
    c.alpha = 0.3;
    c.reps = 40;
    c.seed = 11;
    for (const auto& o : run_replications_serial(c)) {
        REQUIRE_FALSE(o.failed);
        for (const auto& m : o.methods) {
            CHECK(m.false_discoveries == m.rejections);
            CHECK(m.true_discoveries == 0);
        }
    }
}

TEST_CASE("very strong signals are found") {
    ScenarioConfig c;
    c.n = 100;
    c.d = 10;
    c.k = 2;
    c.amplitude = 50.0;
    c.rho = 0.0;
    c.reps = 100;
    c.seed = 12;
    c.methods = {Procedure::BonferroniBH};
    int both = 0;
    for (const auto& o : run_replications_serial(c)) {
        REQUIRE_FALSE(o.failed);
        if (o.methods[0].true_discoveries == 2) ++both;
    }
    CHECK(both >= 95);
}

TEST_CASE("outcomes are identical for every thread count") {
    ScenarioConfig c;
    c.n = 50;
    c.d = 10;
    c.k = 3;
    c.reps = 24;
    c.seed = 2024;
    const auto serial = run_replications_serial(c);
    for (int threads : {1, 2, 3, 8}) {
        CAPTURE(threads);
        CHECK(same_outcomes(serial, run_replications(c, threads)));
    }
    CHECK(summary_csv_rows(summarize(c, serial)) == summary_csv_rows(run_scenario(c, 4)));
}

TEST_CASE("outcome counts are consistent") {
    ScenarioConfig c;
    c.n = 45;
    c.d = 15;
    c.k = 4;
    c.reps = 30;
    c.seed = 99;
    c.placement = SignalPlacement::Random;
    for (const auto& o : run_replications_serial(c)) {
        REQUIRE_FALSE(o.failed);
        REQUIRE(o.methods.size() == c.methods.size());
        for (const auto& m : o.methods) {
            CHECK(m.false_discoveries >= 0);
            CHECK(m.false_discoveries <= m.rejections);
            CHECK(m.rejections <= c.d);
            CHECK(m.true_discoveries + m.false_discoveries == m.rejections);
            CHECK(m.true_discoveries <= c.k);
        }
    }
}

TEST_CASE("summarize") {
    ScenarioConfig c;
    c.d = 10;
    c.k = 2;
    c.methods = {Procedure::BH};

    const ScenarioSummary one = summarize(c, {outcome(1, 2, 1)});
    CHECK(one.at(Procedure::BH).fdr_hat == 0.5);
    CHECK(*one.at(Procedure::BH).power_hat == 0.5);
    CHECK(one.at(Procedure::BH).mc_stderr_fdr == 0.0);
    CHECK(one.pi0_true == doctest::Approx(0.8));

    // FDP values 0, 0.5, 1 and a zero-rejection rep counted as 0.
    const ScenarioSummary four =
        summarize(c, {outcome(0, 1, 1), outcome(1, 2, 1), outcome(3, 3, 0), outcome(0, 0, 0)});
    const MethodSummary& m = four.at(Procedure::BH);
    CHECK(m.fdr_hat == doctest::Approx(0.375));
    const double var = (0.375 * 0.375 + 0.125 * 0.125 + 0.625 * 0.625 + 0.375 * 0.375) / 3.0;
    CHECK(m.mc_stderr_fdr == doctest::Approx(std::sqrt(var / 4.0)));
    CHECK(*m.power_hat == doctest::Approx(0.25));
    CHECK(m.mean_rejections == doctest::Approx(1.5));

    ReplicationOutcome bad;
    bad.failed = true;
    bad.error = "boom";
    const ScenarioSummary partial = summarize(c, {outcome(0, 1, 1), bad});
    CHECK(partial.failed_reps == 1);
    CHECK(partial.successful_reps == 1);
    CHECK_THROWS_AS(summarize(c, {bad, bad}), Error);

    c.k = 0;
    CHECK_FALSE(summarize(c, {outcome(1, 1, 0)}).at(Procedure::BH).power_hat.has_value());
}

TEST_CASE("failing replications are reported, not thrown") {
    // n = 2d with an unknown noise level leaves no degrees of freedom.
    ScenarioConfig c;
    c.n = 20;
    c.d = 10;
    c.k = 1;
    c.reps = 3;
    c.seed = 1;
    const auto outcomes = run_replications_serial(c);
    for (const auto& o : outcomes) {
        CHECK(o.failed);
        CHECK_FALSE(o.error.empty());
    }
    CHECK_THROWS_AS(run_scenario(c, 2), Error);

    c.tau2_known = 1.0;
    CHECK(run_scenario(c, 2).failed_reps == 0);
}

TEST_CASE("scenario validation") {
    ScenarioConfig c;
    CHECK_NOTHROW(validate(c));
    auto bad = [&](auto mutate) {
        ScenarioConfig x = c;
        mutate(x);
        return x;
    };
    CHECK_THROWS_AS(validate(bad([](auto& x) { x.k = x.d + 1; })), ParameterError);
    CHECK_THROWS_AS(validate(bad([](auto& x) { x.reps = 0; })), ParameterError);
    CHECK_THROWS_AS(validate(bad([](auto& x) { x.alpha = 1.0; })), ParameterError);
    CHECK_THROWS_AS(validate(bad([](auto& x) { x.rho = -1.0; })), ParameterError);
    CHECK_THROWS_AS(validate(bad([](auto& x) { x.n = x.d; })), DimensionError);
    CHECK_THROWS_AS(validate(bad([](auto& x) { x.tau2_known = 0.0; })), ParameterError);
}

TEST_CASE("summary CSV layout") {
    ScenarioConfig c;
    c.n = 30;
    c.d = 6;
    c.k = 1;
    c.reps = 5;
    c.seed = 3;
    c.methods = {Procedure::BH, Procedure::KnockoffFilterPlus};
    const std::string rows = summary_csv_rows(run_scenario(c, 1));
    CHECK(std::count(rows.begin(), rows.end(), '\n') == 2);
    CHECK(rows.rfind("30,6,1,6,0.1,0.5,0.5,,5,3,bh,", 0) == 0);
    CHECK(rows.find("\n30,6,1,6,0.1,0.5,0.5,,5,3,knockoff-plus,") != std::string::npos);
    const std::string header = summary_csv_header();
    CHECK(std::count(header.begin(), header.end(), ',') == 15);
}
