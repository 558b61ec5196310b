#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fleetpoa/errors.hpp"
#include "fleetpoa/network.hpp"

namespace fleetpoa {

struct OptimumOptions {
  double tol = 1e-9;               ///< relative duality-gap target
  std::size_t max_iters = 200000;
  double line_search_tol = 1e-12;  ///< bisection bracket width
};

struct SystemOptimum {
  std::vector<double> F_omega;      ///< optimal aggregate link load
  std::vector<double> path_flow;    ///< one path-flow representative of F_omega
  double T_min = 0.0;
  double duality_gap = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

class OptimumNotConverged : public Error {
 public:
  OptimumNotConverged(const std::string& what, SystemOptimum last)
      : Error(what), last_(std::move(last)) {}
  const SystemOptimum& last() const noexcept { return last_; }

 private:
  SystemOptimum last_;
};

/// Minimizes the total delay over aggregate feasible loads (both classes pooled).
///
/// Conditional gradient with pairwise steps: mass moves from the costliest used
/// path to the cheapest path of the same OD pair under the linearized cost
/// d_l(F_l) + F_l d_l'(F_l), with an exact bisection line search. The usual
/// Frank-Wolfe duality gap certifies the result.
SystemOptimum solve_system_optimum(const Network& net, const IncidenceStructure& inc,
                                   std::span<const OdSpec> ods, const OptimumOptions& opts = {});
SystemOptimum solve_system_optimum(const Network& net, const IncidenceStructure& inc,
                                   const OptimumOptions& opts = {});

/// Ratio of equilibrium to optimal total delay; 1 when the optimum is degenerate (zero demand).
double price_of_anarchy(double T_equilibrium, double T_min);

}  // namespace fleetpoa
