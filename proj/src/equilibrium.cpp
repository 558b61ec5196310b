#include "fleetpoa/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace fleetpoa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_shape(const IncidenceStructure& inc, std::span<const OdSpec> ods,
                   const FlowProfile& z) {
  if (z.zS.size() != inc.path_count() || z.zC.size() != inc.path_count()) {
    throw DimensionMismatch("flow profile does not match the number of paths");
  }
  if (ods.size() != inc.od_count()) throw DimensionMismatch("OD list does not match incidence");
}

double demand_scale(std::span<const OdSpec> ods) {
  double total = 0.0;
  for (const auto& od : ods) total += od.demand;
  return total;
}

void require_feasible(const IncidenceStructure& inc, std::span<const OdSpec> ods,
                      const FlowProfile& z) {
  const double residual = feasibility_residual(inc, ods, z);
  if (residual > kFeasibilityTolerance * std::max(1.0, demand_scale(ods))) {
    throw InvalidArgument("flow is infeasible (residual " + std::to_string(residual) + ")");
  }
}

/// Path delays and path marginal delays of a flow.
struct PathCosts {
  LoadProfile f;
  std::vector<double> delay;
  std::vector<double> marginal;
};

PathCosts evaluate(const Network& net, const IncidenceStructure& inc, const FlowProfile& z) {
  PathCosts out;
  out.f = inc.loads(z);
  // Projection can leave -0.0 or rounding dust; loads of a feasible flow are >= 0.
  for (auto& x : out.f.fS) x = std::max(0.0, x);
  for (auto& x : out.f.fC) x = std::max(0.0, x);
  out.delay = inc.path_costs(link_delays(net, out.f));
  out.marginal = inc.path_costs(link_marginal_delays(net, out.f));
  return out;
}

struct Certificate {
  double residual = 0.0;
  double gap = 0.0;
  double inner = 0.0;
};

Certificate certify(const IncidenceStructure& inc, std::span<const OdSpec> ods,
                    const FlowProfile& z, const PathCosts& costs) {
  Certificate cert;
  for (std::size_t k = 0; k < ods.size(); ++k) {
    const std::size_t lo = inc.od_begin(k), hi = inc.od_end(k);
    if (lo == hi) continue;
    const double eps = kSupportThreshold * ods[k].demand;
    double min_d = kInf, min_m = kInf;
    for (std::size_t p = lo; p < hi; ++p) {
      min_d = std::min(min_d, costs.delay[p]);
      min_m = std::min(min_m, costs.marginal[p]);
    }
    for (std::size_t p = lo; p < hi; ++p) {
      if (z.zS[p] > eps) cert.residual = std::max(cert.residual, costs.delay[p] - min_d);
      if (z.zC[p] > eps) cert.residual = std::max(cert.residual, costs.marginal[p] - min_m);
      cert.inner += z.zS[p] * costs.delay[p] + z.zC[p] * costs.marginal[p];
    }
    cert.gap -= ods[k].selfish_demand() * min_d + ods[k].fleet_demand() * min_m;
  }
  cert.gap += cert.inner;
  cert.gap = std::max(0.0, cert.gap);
  return cert;
}

void fill_minima(const IncidenceStructure& inc, std::span<const OdSpec> ods, const PathCosts& costs,
                 EquilibriumResult& result) {
  result.theta_by_od.assign(ods.size(), 0.0);
  result.mu_by_od.assign(ods.size(), 0.0);
  for (std::size_t k = 0; k < ods.size(); ++k) {
    double min_d = kInf, min_m = kInf;
    for (std::size_t p = inc.od_begin(k); p < inc.od_end(k); ++p) {
      min_d = std::min(min_d, costs.delay[p]);
      min_m = std::min(min_m, costs.marginal[p]);
    }
    result.theta_by_od[k] = min_d;
    result.mu_by_od[k] = min_m;
  }
  result.theta = result.theta_by_od.empty() ? 0.0 : result.theta_by_od.front();
  result.mu = result.mu_by_od.empty() ? 0.0 : result.mu_by_od.front();
}

}  // namespace

void project_simplex(std::span<double> y, double total) {
  if (y.empty()) return;
  if (!(total > 0.0)) {
    std::fill(y.begin(), y.end(), 0.0);
    return;
  }
  std::vector<double> u(y.begin(), y.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double threshold = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double t = (cumulative - total) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) threshold = t;
  }
  for (auto& x : y) x = std::max(0.0, x - threshold);
}

FlowProfile project_feasible(const IncidenceStructure& inc, std::span<const OdSpec> ods,
                             const FlowProfile& y) {
  require_shape(inc, ods, y);
  FlowProfile z = y;
  for (std::size_t k = 0; k < ods.size(); ++k) {
    const std::size_t lo = inc.od_begin(k), n = inc.od_end(k) - lo;
    project_simplex(std::span<double>(z.zS).subspan(lo, n), ods[k].selfish_demand());
    project_simplex(std::span<double>(z.zC).subspan(lo, n), ods[k].fleet_demand());
  }
  return z;
}

FlowProfile uniform_flow(const IncidenceStructure& inc, std::span<const OdSpec> ods) {
  if (ods.size() != inc.od_count()) throw DimensionMismatch("OD list does not match incidence");
  FlowProfile z(inc.path_count());
  for (std::size_t k = 0; k < ods.size(); ++k) {
    const std::size_t lo = inc.od_begin(k), hi = inc.od_end(k);
    if (lo == hi) continue;
    const double n = static_cast<double>(hi - lo);
    for (std::size_t p = lo; p < hi; ++p) {
      z.zS[p] = ods[k].selfish_demand() / n;
      z.zC[p] = ods[k].fleet_demand() / n;
    }
  }
  return z;
}

double wardrop_residual(const Network& net, const IncidenceStructure& inc,
                        std::span<const OdSpec> ods, const FlowProfile& z) {
  require_shape(inc, ods, z);
  require_feasible(inc, ods, z);
  return certify(inc, ods, z, evaluate(net, inc, z)).residual;
}

double wardrop_residual(const Network& net, const IncidenceStructure& inc, const FlowProfile& z) {
  return wardrop_residual(net, inc, net.od_pairs, z);
}

GapTerms vi_gap_terms(const Network& net, const IncidenceStructure& inc,
                      std::span<const OdSpec> ods, const FlowProfile& z) {
  require_shape(inc, ods, z);
  require_feasible(inc, ods, z);
  const Certificate cert = certify(inc, ods, z, evaluate(net, inc, z));
  return GapTerms{cert.gap, cert.inner};
}

double vi_gap(const Network& net, const IncidenceStructure& inc, std::span<const OdSpec> ods,
              const FlowProfile& z) {
  return vi_gap_terms(net, inc, ods, z).gap;
}

PathMinima path_minima(const Network& net, const IncidenceStructure& inc, const LoadProfile& f) {
  const auto delay = inc.path_costs(link_delays(net, f));
  const auto marginal = inc.path_costs(link_marginal_delays(net, f));
  PathMinima out{std::vector<double>(inc.od_count(), kInf), std::vector<double>(inc.od_count(), kInf)};
  for (std::size_t k = 0; k < inc.od_count(); ++k) {
    for (std::size_t p = inc.od_begin(k); p < inc.od_end(k); ++p) {
      out.theta[k] = std::min(out.theta[k], delay[p]);
      out.mu[k] = std::min(out.mu[k], marginal[p]);
    }
  }
  return out;
}

EquilibriumResult solve_equilibrium(const Network& net, const IncidenceStructure& inc,
                                    std::span<const OdSpec> ods, const SolverOptions& opts) {
  if (ods.size() != inc.od_count()) throw DimensionMismatch("OD list does not match incidence");
  if (!opts.allow_unverified) {
    if (!opts.conditions) {
      throw ConditionsUnverified("equilibrium solve requires a conditions report (or an override)");
    }
    if (!opts.conditions->ok()) {
      throw ConditionsUnverified("conditions check failed; equilibrium uniqueness is not certified");
    }
  }
  if (!(opts.tol > 0.0)) throw InvalidArgument("solver tolerance must be positive");

  const double demand = demand_scale(ods);
  EquilibriumResult result;

  double step = 0.0;
  if (opts.step) {
    step = *opts.step;
  } else if (demand > 0.0) {
    const double Q = opts.conditions ? opts.conditions->Q : check_conditions(net, demand).Q;
    step = 0.9 / (Q * inc.spectral_norm_squared());
  }
  if (demand > 0.0 && !(step > 0.0 && std::isfinite(step))) {
    throw InvalidArgument("extragradient step must be positive");
  }
  result.step = step;

  FlowProfile z = opts.initial ? project_feasible(inc, ods, *opts.initial) : uniform_flow(inc, ods);

  const std::size_t P = inc.path_count();
  auto descend = [&](const FlowProfile& base, const PathCosts& costs) {
    FlowProfile out(P);
    for (std::size_t p = 0; p < P; ++p) {
      out.zS[p] = base.zS[p] - step * costs.delay[p];
      out.zC[p] = base.zC[p] - step * costs.marginal[p];
    }
    return project_feasible(inc, ods, out);
  };

  // Fixed-point residual |z - P(z - step G(z))| / step, in cost units. It also sees
  // flow below the support threshold that the Wardrop residual ignores.
  auto natural = [&](const FlowProfile& at, const FlowProfile& pred) {
    if (!(step > 0.0)) return 0.0;
    double r = 0.0;
    for (std::size_t p = 0; p < P; ++p) {
      r = std::max({r, std::abs(at.zS[p] - pred.zS[p]), std::abs(at.zC[p] - pred.zC[p])});
    }
    return r / step;
  };

  PathCosts costs = evaluate(net, inc, z);
  Certificate cert = certify(inc, ods, z, costs);
  FlowProfile y = descend(z, costs);
  double fixed_point = natural(z, y);
  std::size_t it = 0;
  auto done = [&] {
    return cert.residual <= opts.tol && cert.gap <= opts.tol * (1.0 + cert.inner) &&
           fixed_point <= opts.tol;
  };
  while (!done() && it < opts.max_iters) {
    z = descend(z, evaluate(net, inc, y));
    costs = evaluate(net, inc, z);
    cert = certify(inc, ods, z, costs);
    y = descend(z, costs);
    fixed_point = natural(z, y);
    ++it;
  }

  result.z_star = z;
  result.f_star = costs.f;
  result.wardrop_residual = cert.residual;
  result.vi_gap = cert.gap;
  result.fixed_point_residual = fixed_point;
  result.iterations = it;
  result.converged = done();
  fill_minima(inc, ods, costs, result);
  if (!result.converged) {
    throw NotConverged("extragradient did not converge in " + std::to_string(it) +
                           " iterations (wardrop residual " + std::to_string(cert.residual) +
                           ", vi gap " + std::to_string(cert.gap) + ")",
                       std::move(result));
  }
  return result;
}

EquilibriumResult solve_equilibrium(const Network& net, const IncidenceStructure& inc,
                                    const SolverOptions& opts) {
  return solve_equilibrium(net, inc, net.od_pairs, opts);
}

}  // namespace fleetpoa
