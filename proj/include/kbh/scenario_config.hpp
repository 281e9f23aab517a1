#pragma once

#include "kbh/simulation.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace kbh {

// Scenario grids for `kbh simulate`. TOML-style `key = value` lines; a value
// is a scalar or a bracketed list. The grid is the Cartesian product of all
// list-valued keys, expanded in a fixed key order so row order is stable:
//
//   n = [100, 200]
//   d = 20
//   k = [0, 4]
//   amplitude = [6, 8, 10]
//   alpha = 0.1
//   methods = ["bh", "bbh", "abbh", "knockoff-plus"]
//
// Keys: n, d, k, amplitude, alpha, eta, rho, reps, tau2, lambda, s_margin,
// methods, placement ("first" | "random"), grid_size, grid_ratio.
// `#` starts a comment. The master seed comes from the command line.
std::vector<ScenarioConfig> parse_scenario_grid(std::istream& in, std::uint64_t seed);
std::vector<ScenarioConfig> read_scenario_grid(const std::string& path, std::uint64_t seed);

}  // namespace kbh
