#include "kbh/special_functions.hpp"

#include "kbh/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace kbh {

namespace {

constexpr int kMaxIterations = 10000;
constexpr double kEpsilon = 1e-16;
constexpr double kTiny = 1e-300;

double beta_continued_fraction(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEpsilon) return h;
    }
    throw ConvergenceError("incomplete beta continued fraction did not converge (a = " +
                           std::to_string(a) + ", b = " + std::to_string(b) +
                           ", x = " + std::to_string(x) + ")");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw ParameterError("incomplete beta needs a, b > 0");
    if (!(x >= 0.0 && x <= 1.0)) throw ParameterError("incomplete beta needs x in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double two_sided_p(double t, Dof dof) {
    if (std::isnan(t)) throw ParameterError("t statistic is NaN");
    const double abs_t = std::abs(t);
    if (!dof) return std::min(1.0, 2.0 * normal_sf(abs_t));
    if (*dof < 1) throw ParameterError("degrees of freedom must be at least 1");
    if (abs_t == 0.0) return 1.0;
    if (std::isinf(abs_t)) return 0.0;
    const double nu = static_cast<double>(*dof);
    // P(|T| > t) = I_{nu/(nu+t^2)}(nu/2, 1/2). For small t the complementary
    // argument t^2/(nu+t^2) avoids cancellation in nu/(nu+t^2).
    const double t2 = abs_t * abs_t;
    const double x = nu / (nu + t2);
    if (x > 0.5) return 1.0 - regularized_incomplete_beta(0.5, 0.5 * nu, t2 / (nu + t2));
    return regularized_incomplete_beta(0.5 * nu, 0.5, x);
}

}  // namespace kbh
