#include "doctest.h"
#include "oracles.hpp"

#include "kbh/error.hpp"
#include "kbh/knockoff.hpp"
#include "kbh/knockoff_filter.hpp"
#include "kbh/lasso.hpp"
#include "kbh/simulation.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace kbh;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Index>(v.size()));
    Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

Matrix orthonormal_columns(Index n, Index p, std::mt19937_64& rng) {
    const Matrix g = oracle::random_normalized_design(n, p, rng);
    return Eigen::HouseholderQR<Matrix>(g).householderQ() * Matrix::Identity(n, p);
}

}  // namespace

TEST_CASE("w_from_z") {
    CHECK(w_from_z(vec({3, 1}), vec({1, 2})) == vec({3, -2}));
    CHECK(w_from_z(vec({5}), vec({5}))[0] == -5.0);
    CHECK(w_from_z(Vector::Zero(3), Vector::Zero(3)).isZero());
    CHECK_THROWS_AS(w_from_z(Vector::Zero(2), Vector::Zero(3)), DimensionError);
}

TEST_CASE("knockoff_select examples") {
    const Vector w = vec({3, -1, 2, -2, 5});
    CHECK(knockoff_threshold(w, 0.5, true) == 3.0);
    const SelectionResult r = knockoff_select(w, 0.5, true);
    CHECK(r.rejected == std::vector<Index>{0, 4});
    CHECK(r.procedure == Procedure::KnockoffFilterPlus);

    const SelectionResult none = knockoff_select(vec({-1, -2, 0, -4}), 0.3, true);
    CHECK(std::isinf(none.threshold));
    CHECK(none.r_count == 0);

    const SelectionResult all = knockoff_select(vec({5, 4, 3, 2, 1}), 0.2, false);
    CHECK(all.threshold == 1.0);
    CHECK(all.r_count == 5);
    // With the +1 offset: (1 + 0) / 5 = 0.2 at t = 1 also qualifies.
    CHECK(knockoff_threshold(vec({5, 4, 3, 2, 1}), 0.2, true) == 1.0);
    CHECK(std::isinf(knockoff_threshold(vec({5, 4, 3, 2, 1}), 0.19, true)));
}

TEST_CASE("knockoff thresholds match exhaustive scans") {
    std::mt19937_64 rng(303);
    std::uniform_int_distribution<int> pick_d(1, 10);
    std::uniform_int_distribution<int> grid(-6, 6);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> pick_alpha(0.05, 0.6);
    for (int trial = 0; trial < 10000; ++trial) {
        const int d = pick_d(rng);
        const bool coarse = trial % 2 == 0;
        std::vector<double> w(d);
        for (auto& v : w) v = coarse ? grid(rng) : z(rng) + 0.5;
        const double alpha = pick_alpha(rng);
        const Vector wv = Eigen::Map<const Vector>(w.data(), d);
        for (bool plus : {true, false}) {
            const double expected = oracle::knockoff_threshold_brute_force(w, alpha, plus);
            const SelectionResult r = knockoff_select(wv, alpha, plus);
            REQUIRE(r.threshold == expected);
            for (const auto& e : r.audit) CHECK(e.rejected == (e.value >= expected));
        }
        CHECK(knockoff_threshold(wv, alpha, true) >= knockoff_threshold(wv, alpha, false));
        // Flipping every sign of a nonpositive vector leaves nothing to select.
        const Vector neg = -wv.cwiseAbs();
        CHECK(knockoff_select(neg, alpha, false).r_count == 0);
    }
}

TEST_CASE("lasso entry penalties on orthonormal designs") {
    std::mt19937_64 rng(404);
    std::normal_distribution<double> z;
    LassoPathOptions options;
    const double step = std::pow(options.grid_ratio, 1.0 / (options.grid_size - 1));
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = 60, p = 10;
        const Matrix x = orthonormal_columns(n, p, rng);
        Vector y(n);
        for (Index i = 0; i < n; ++i) y[i] = z(rng);
        y += x.col(trial % p) * 3.0;
        const EntryStats stats = lasso_entry_stats(x, y, options);
        const Vector entry = (x.transpose() * y).cwiseAbs() / static_cast<double>(n);
        const double lambda_min = entry.maxCoeff() * options.grid_ratio;
        Vector z_all(p);
        z_all << stats.z, stats.z_tilde;
        for (Index j = 0; j < p; ++j) {
            CAPTURE(j);
            CHECK(z_all[j] <= entry[j] * (1 + 1e-12));
            if (entry[j] > lambda_min) CHECK(z_all[j] >= entry[j] * step * (1 - 1e-9));
            else CHECK(z_all[j] == 0.0);
        }
        CHECK(stats.max_kkt_residual <= 1e-6);
    }
}

TEST_CASE("lasso path boundary cases") {
    std::mt19937_64 rng(8);
    const Matrix x = oracle::random_normalized_design(30, 6, rng);

    const LassoPath zero = lasso_path(x, Vector::Zero(30));
    CHECK(entry_penalties(zero).isZero());

    Vector y(30);
    std::normal_distribution<double> z;
    for (Index i = 0; i < 30; ++i) y[i] = z(rng);
    const LassoPath path = lasso_path(x, y);
    CHECK(path.lambdas.front() == doctest::Approx((x.transpose() * y).cwiseAbs().maxCoeff() / 30.0));
    CHECK(path.coefficients.front().isZero());
    CHECK(path.lambdas.back() == doctest::Approx(0.01 * path.lambdas.front()));
    for (std::size_t k = 0; k < path.lambdas.size(); ++k) {
        CHECK(path.kkt_residuals[k] <= 1e-6);
        CHECK(lasso_kkt_residual(x, y, path.coefficients[k], path.lambdas[k]) <= 1e-6);
    }

    CHECK_THROWS_AS(lasso_path(x, y, {.grid_size = 1}), ParameterError);
    CHECK_THROWS_AS(lasso_path(x, y, {.grid_ratio = 1.5}), ParameterError);
    LassoPathOptions starved;
    starved.max_sweeps = 1;
    CHECK_THROWS_AS(lasso_path(x, y, starved), ConvergenceError);
}

TEST_CASE("lasso KKT conditions on correlated knockoff designs") {
    DesignProblem p;
    p.x = generate_design(100, 20, 0.5, 42);
    Vector beta = Vector::Zero(20);
    beta.head(4).setConstant(6.0);
    std::mt19937_64 rng(43);
    std::normal_distribution<double> z;
    p.y = p.x * beta;
    for (Index i = 0; i < 100; ++i) p.y[i] += z(rng);
    p = normalize_columns(p);
    const KnockoffBundle b = construct_knockoff(p.x, equicorrelated_s(gram_matrix(p.x), 0.1), 44);
    Matrix aug(100, 40);
    aug << b.x, b.x_tilde;
    const LassoPath path = lasso_path(aug, p.y);
    for (double r : path.kkt_residuals) CHECK(r <= 1e-6);

    const WStatistics w = w_statistics(b.x, b.x_tilde, p.y);
    CHECK((w.z.array() >= 0).all());
    CHECK((w.z_tilde.array() >= 0).all());
    CHECK(w.w == w_from_z(w.z, w.z_tilde));
    // Strong signals enter before their knockoffs.
    for (Index j = 0; j < 4; ++j) CHECK(w.w[j] > 0);
}
