#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fleetpoa/network.hpp"
#include "fleetpoa/profiles.hpp"

namespace fleetpoa {

// Exhaustive grid searches for tiny single-OD instances. They share no code
// with the iterative solvers beyond evaluating the cost functions.

inline constexpr std::size_t kOracleMaxGrid = 2001;
inline constexpr std::size_t kOracleMaxPoints = 50'000'000;

struct OracleEquilibrium {
  LoadProfile f;
  FlowProfile z;
  /// Largest improvement either class could obtain by deviating on its own grid.
  double certificate = 0.0;
};

/// Grid point of Z^S x Z^C minimizing the larger of the two players' best-deviation gains.
OracleEquilibrium brute_force_equilibrium(const Network& net, const IncidenceStructure& inc,
                                          std::span<const OdSpec> ods, std::size_t grid_n);

struct OracleOptimum {
  std::vector<double> F;
  double T = 0.0;
};

/// Grid minimum of the total delay over aggregate path flows.
OracleOptimum brute_force_optimum(const Network& net, const IncidenceStructure& inc,
                                  double total_demand, std::size_t grid_n);

}  // namespace fleetpoa
