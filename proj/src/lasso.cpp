#include "kbh/lasso.hpp"

#include "kbh/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kbh {

namespace {

double soft_threshold(double z, double gamma) {
    if (z > gamma) return z - gamma;
    if (z < -gamma) return z + gamma;
    return 0.0;
}

}  // namespace

double lasso_kkt_residual(const Matrix& x, const Vector& y, const Vector& b, double lambda) {
    const double n = static_cast<double>(x.rows());
    const Vector grad = x.transpose() * (y - x * b) / n;
    double worst = 0.0;
    for (Index j = 0; j < b.size(); ++j) {
        const double v = b[j] != 0.0 ? std::abs(grad[j] - lambda * (b[j] > 0 ? 1.0 : -1.0))
                                     : std::max(0.0, std::abs(grad[j]) - lambda);
        worst = std::max(worst, v);
    }
    return worst;
}

LassoPath lasso_path(const Matrix& x, const Vector& y, const LassoPathOptions& options) {
    if (options.grid_size < 2) throw ParameterError("lasso grid size must be at least 2");
    if (!(options.grid_ratio > 0.0 && options.grid_ratio < 1.0))
        throw ParameterError("lasso grid ratio must lie in (0, 1)");
    if (y.size() != x.rows()) throw DimensionError("response length does not match design");

    const Index p = x.cols();
    const double n = static_cast<double>(x.rows());
    // Covariance updates: the working gradient g = X'(y - Xb)/n is maintained
    // through the Gram matrix, which is cheap for the 2d-column knockoff design.
    const Matrix gram = x.transpose() * x / n;
    const Vector corr = x.transpose() * y / n;

    LassoPath path;
    const double lambda_max = corr.cwiseAbs().maxCoeff();
    path.lambdas.resize(options.grid_size);
    for (int k = 0; k < options.grid_size; ++k) {
        const double frac = static_cast<double>(k) / (options.grid_size - 1);
        path.lambdas[k] = lambda_max * std::pow(options.grid_ratio, frac);
    }

    Vector b = Vector::Zero(p);
    Vector grad = corr;
    for (double lambda : path.lambdas) {
        int sweep = 0;
        if (lambda_max > 0.0) {
            for (;; ++sweep) {
                if (sweep >= options.max_sweeps)
                    throw ConvergenceError("coordinate descent did not converge at lambda = " +
                                           std::to_string(lambda));
                double max_update = 0.0;
                for (Index j = 0; j < p; ++j) {
                    const double gjj = gram(j, j);
                    if (gjj <= 0.0) continue;
                    const double updated = soft_threshold(grad[j] + gjj * b[j], lambda) / gjj;
                    const double delta = updated - b[j];
                    if (delta != 0.0) {
                        grad -= delta * gram.col(j);
                        b[j] = updated;
                        max_update = std::max(max_update, std::abs(delta));
                    }
                }
                if (max_update < options.tolerance) break;
            }
        }
        path.coefficients.push_back(b);
        path.sweeps.push_back(sweep);
        path.kkt_residuals.push_back(lasso_kkt_residual(x, y, b, lambda));
    }
    return path;
}

Vector entry_penalties(const LassoPath& path, double zero_threshold) {
    if (path.coefficients.empty()) return {};
    const Index p = path.coefficients.front().size();
    Vector z = Vector::Zero(p);
    for (Index j = 0; j < p; ++j) {
        for (std::size_t k = 0; k < path.lambdas.size(); ++k) {
            if (std::abs(path.coefficients[k][j]) > zero_threshold) {
                z[j] = path.lambdas[k];
                break;
            }
        }
    }
    return z;
}

}  // namespace kbh
