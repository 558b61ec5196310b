#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fleetpoa/calculus.hpp"
#include "fleetpoa/equilibrium.hpp"
#include "fleetpoa/network.hpp"
#include "fleetpoa/sysopt.hpp"

namespace fleetpoa {

/// Index sets (sorted) of paths and links carrying flow above the threshold.
struct SupportSets {
  std::vector<std::size_t> paths_S;
  std::vector<std::size_t> paths_C;
  std::vector<std::size_t> links_S;
  std::vector<std::size_t> links_C;

  /// Class-C paths are a subset of class-S paths.
  bool fleet_within_selfish() const;
  bool operator==(const SupportSets&) const = default;
};

/// Supports at threshold eps * demand.
SupportSets compute_supports(const FlowProfile& z, const LoadProfile& f, double eps, double demand);

struct SweepRecord {
  double alpha = 0.0;
  double poa = 1.0;
  double total_delay = 0.0;
  double theta = 0.0;
  double mu = 0.0;
  LoadProfile f_star;
  FlowProfile z_star;
  SupportSets supports;
  bool converged = false;
  double wardrop_residual = 0.0;
  double vi_gap = 0.0;
  std::size_t iterations = 0;
};

struct SweepOptions {
  double tol = kDefaultSolverTolerance;
  std::size_t max_iters = kDefaultMaxIterations;
  /// Start each solve from the previous fleet share's flow; forces a sequential sweep.
  bool warm_start = true;
  /// Solve grid points concurrently (only honoured when warm_start is off).
  bool parallel = false;
};

struct Sweep {
  double demand = 0.0;
  ConditionsReport conditions;
  SystemOptimum optimum;
  std::vector<SweepRecord> records;
};

/// n evenly spaced fleet shares from 0 to 1 inclusive.
std::vector<double> uniform_alpha_grid(std::size_t n);

/// Solves the equilibrium at each fleet share of the grid and records PoA, loads and supports.
/// Requires a single OD pair; non-converged solves are recorded, not thrown.
Sweep sweep_alpha(const Network& net, const IncidenceStructure& inc, std::span<const double> grid,
                  const SweepOptions& opts = {});

/// Flow at fleet share alpha obtained by handing fleet flow of the alpha_tilde
/// equilibrium back to the selfish class, in proportion (alpha_tilde - alpha) / alpha_tilde.
FlowProfile construct_scaled_equilibrium(const EquilibriumResult& at_alpha_tilde, double alpha_tilde,
                                         double alpha);
FlowProfile construct_scaled_equilibrium(const FlowProfile& z_at_alpha_tilde, double alpha_tilde,
                                         double alpha);

struct CriticalShareOptions {
  double tol = 1e-6;          ///< allowed PoA deviation on the flat range
  double resolution = 1e-4;   ///< bisection bracket width for the refined share
  SweepOptions solver;
};

struct CriticalShareReport {
  double alpha_tilde = 0.0;           ///< refined critical share
  double alpha_tilde_grid = 0.0;      ///< largest grid alpha with inclusion at and below it
  double alpha_tilde_upper = 0.0;     ///< upper end of the final bisection bracket
  double alpha_inclusion_pointwise = 0.0;  ///< largest grid alpha with inclusion at that alpha
  bool poa_flat_ok = false;
  double poa_flat_deviation = 0.0;
  double flat_load_deviation = 0.0;   ///< max |F_l(alpha) - F_l(0)| over the flat range
  double construction_residual = 0.0; ///< worst Wardrop residual of the scaled candidates
  double construction_load_error = 0.0;  ///< worst |candidate load - solver load|
  std::vector<double> flat_alphas;
  FlowProfile z_at_alpha_tilde;
};

CriticalShareReport detect_critical_share(const Network& net, const IncidenceStructure& inc,
                                          const Sweep& sweep, const CriticalShareOptions& opts = {});

/// One monotonicity property: worst violation beyond zero and where it happened.
struct MonotoneCheck {
  bool ok = true;
  double max_violation = 0.0;
  double alpha = 0.0;   ///< left end of the witnessing pair
  std::string where;
};

struct MonotonicityReport {
  bool parallel = false;
  bool exploratory = false;  ///< observations recorded, nothing asserted
  double slack = 0.0;
  MonotoneCheck poa_nonincreasing;
  MonotoneCheck theta_nonincreasing;
  MonotoneCheck mu_nondecreasing;
  MonotoneCheck fS_link_nonincreasing;
  MonotoneCheck fC_link_nondecreasing;
  MonotoneCheck zS_path_nonincreasing;
  MonotoneCheck zC_path_nondecreasing;
  bool support_nesting_ok = true;
  bool shared_support_ok = true;  ///< links_S and links_C intersect for alpha in (0, 1)
  std::vector<std::pair<double, double>> breakpoints;  ///< (lo, hi] grid brackets

  bool all_ok() const;
};

struct MonotonicityOptions {
  double slack = 10.0 * kDefaultSolverTolerance;
  bool exploratory = false;
};

/// Checks the parallel-network monotonicity properties along a sweep.
/// Non-parallel networks throw AssumptionViolated unless opts.exploratory is set.
MonotonicityReport monotonicity_report(const Sweep& sweep, const Network& net,
                                       const MonotonicityOptions& opts = {});

struct LipschitzReport {
  double max_ratio = 0.0;
  double bound_k = 0.0;
  bool ok = false;
};

/// Largest ||f*(a2) - f*(a1)|| / |a2 - a1| over consecutive records against Q sqrt(2L) D / c.
LipschitzReport empirical_lipschitz(std::span<const SweepRecord> records,
                                    const ConditionsReport& conditions, std::size_t link_count,
                                    double demand);

}  // namespace fleetpoa
