#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fleetpoa/calculus.hpp"
#include "fleetpoa/errors.hpp"
#include "fleetpoa/network.hpp"
#include "fleetpoa/profiles.hpp"

namespace fleetpoa {

inline constexpr double kSupportThreshold = 1e-6;  ///< used-path threshold, times demand
inline constexpr double kFeasibilityTolerance = 1e-10;
inline constexpr double kDefaultSolverTolerance = 1e-8;
inline constexpr std::size_t kDefaultMaxIterations = 200000;

struct EquilibriumResult {
  FlowProfile z_star;
  LoadProfile f_star;
  double theta = 0.0;  ///< minimum path delay (first OD pair)
  double mu = 0.0;     ///< minimum path marginal delay (first OD pair)
  std::vector<double> theta_by_od;
  std::vector<double> mu_by_od;
  double wardrop_residual = 0.0;
  double vi_gap = 0.0;
  double fixed_point_residual = 0.0;  ///< |z - P(z - step G(z))|_inf / step
  double step = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

class NotConverged : public Error {
 public:
  NotConverged(const std::string& what, EquilibriumResult last)
      : Error(what), last_(std::move(last)) {}
  const EquilibriumResult& last() const noexcept { return last_; }

 private:
  EquilibriumResult last_;
};

struct SolverOptions {
  double tol = kDefaultSolverTolerance;
  std::size_t max_iters = kDefaultMaxIterations;
  /// Extragradient step; defaults to 0.9 / (Q ||A||^2).
  std::optional<double> step;
  /// Passing conditions report; required unless allow_unverified is set.
  std::optional<ConditionsReport> conditions;
  bool allow_unverified = false;
  /// Starting flow; projected onto the feasible set before use. Uniform split otherwise.
  std::optional<FlowProfile> initial;
};

/// Euclidean projection of y = (yS, yC) onto the feasible flow set.
FlowProfile project_feasible(const IncidenceStructure& inc, std::span<const OdSpec> ods,
                             const FlowProfile& y);

/// Projection of y onto {x >= 0, sum x = total}.
void project_simplex(std::span<double> y, double total);

/// Uniform split of each class-OD demand over its paths.
FlowProfile uniform_flow(const IncidenceStructure& inc, std::span<const OdSpec> ods);

/// Worst excess delay (class S) or marginal delay (class C) of a used path over the best path.
double wardrop_residual(const Network& net, const IncidenceStructure& inc,
                        std::span<const OdSpec> ods, const FlowProfile& z);
double wardrop_residual(const Network& net, const IncidenceStructure& inc, const FlowProfile& z);

struct GapTerms {
  double gap = 0.0;
  double inner = 0.0;  ///< f^T H(f)
};

/// max over feasible loads phi of (f - phi)^T H(f), for f induced by z.
GapTerms vi_gap_terms(const Network& net, const IncidenceStructure& inc,
                      std::span<const OdSpec> ods, const FlowProfile& z);
double vi_gap(const Network& net, const IncidenceStructure& inc, std::span<const OdSpec> ods,
              const FlowProfile& z);

/// Min path delay and min path marginal delay per OD pair.
struct PathMinima {
  std::vector<double> theta;
  std::vector<double> mu;
};
PathMinima path_minima(const Network& net, const IncidenceStructure& inc, const LoadProfile& f);

/// Solves for the equilibrium with the extragradient method in path-flow space.
EquilibriumResult solve_equilibrium(const Network& net, const IncidenceStructure& inc,
                                    std::span<const OdSpec> ods, const SolverOptions& opts = {});
EquilibriumResult solve_equilibrium(const Network& net, const IncidenceStructure& inc,
                                    const SolverOptions& opts = {});

}  // namespace fleetpoa
