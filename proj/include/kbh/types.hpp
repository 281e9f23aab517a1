#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>

namespace kbh {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Residual degrees of freedom for t reference distributions. An empty value
// means the noise variance is known and the reference is standard normal.
using Dof = std::optional<int>;

inline constexpr Dof kInfiniteDof = std::nullopt;

}  // namespace kbh
