#pragma once

#include "kbh/types.hpp"

#include <vector>

namespace kbh {

struct LassoPathOptions {
    int grid_size = 100;
    double grid_ratio = 0.01;
    int max_sweeps = 100000;
    double tolerance = 1e-9;      // max coordinate update at convergence
    double zero_threshold = 1e-12;
};

// Pathwise coordinate descent for (1/2n)||y - X b||^2 + lambda ||b||_1 on a
// log-spaced grid from lambda_max = max_j |x_j'y| / n down to
// grid_ratio * lambda_max, warm-starting each grid point from the previous one.
struct LassoPath {
    std::vector<double> lambdas;       // decreasing
    std::vector<Vector> coefficients;  // one per grid point
    std::vector<double> kkt_residuals; // max KKT violation per grid point
    std::vector<int> sweeps;
};

LassoPath lasso_path(const Matrix& x, const Vector& y, const LassoPathOptions& options = {});

// Max violation of the lasso optimality conditions at (b, lambda):
// x_j'r/n = lambda sign(b_j) on the support, |x_j'r/n| <= lambda elsewhere.
double lasso_kkt_residual(const Matrix& x, const Vector& y, const Vector& b, double lambda);

// Entry penalty per column: the largest grid lambda at which the coefficient
// is nonzero, 0 if it never enters.
Vector entry_penalties(const LassoPath& path, double zero_threshold = 1e-12);

}  // namespace kbh
