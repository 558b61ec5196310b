#include "fleetpoa/sysopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fleetpoa/calculus.hpp"

namespace fleetpoa {

namespace {

double linearized_cost(const DelayPoly& d, double F) { return d.value(F) + F * d.first_derivative(F); }

struct GapState {
  double gap = 0.0;
  double total = 0.0;
};

GapState duality_gap(const Network& net, const IncidenceStructure& inc,
                     std::span<const OdSpec> ods, const std::vector<double>& x,
                     const std::vector<double>& F) {
  std::vector<double> c(net.link_count());
  GapState out;
  for (std::size_t l = 0; l < c.size(); ++l) {
    c[l] = linearized_cost(net.links[l].delay, F[l]);
    out.total += F[l] * net.links[l].delay.value(F[l]);
  }
  const auto pc = inc.path_costs(c);
  for (std::size_t k = 0; k < ods.size(); ++k) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t p = inc.od_begin(k); p < inc.od_end(k); ++p) {
      best = std::min(best, pc[p]);
      out.gap += x[p] * pc[p];
    }
    if (inc.od_begin(k) != inc.od_end(k)) out.gap -= ods[k].demand * best;
  }
  out.gap = std::max(0.0, out.gap);
  return out;
}

}  // namespace

SystemOptimum solve_system_optimum(const Network& net, const IncidenceStructure& inc,
                                   std::span<const OdSpec> ods, const OptimumOptions& opts) {
  if (ods.size() != inc.od_count()) throw DimensionMismatch("OD list does not match incidence");
  const std::size_t L = net.link_count();
  std::vector<double> x(inc.path_count(), 0.0);

  // All-or-nothing start on the cheapest empty-network path.
  {
    std::vector<double> c0(L);
    for (std::size_t l = 0; l < L; ++l) c0[l] = linearized_cost(net.links[l].delay, 0.0);
    const auto pc = inc.path_costs(c0);
    for (std::size_t k = 0; k < ods.size(); ++k) {
      const std::size_t lo = inc.od_begin(k), hi = inc.od_end(k);
      if (lo == hi) continue;
      const auto best = std::min_element(pc.begin() + lo, pc.begin() + hi) - pc.begin();
      x[best] = ods[k].demand;
    }
  }
  std::vector<double> F = inc.link_loads(x);

  SystemOptimum result;
  GapState state = duality_gap(net, inc, ods, x, F);
  std::size_t it = 0;
  auto done = [&] { return state.gap <= opts.tol * (1.0 + state.total); };

  while (!done() && it < opts.max_iters) {
    for (std::size_t k = 0; k < ods.size(); ++k) {
      const std::size_t lo = inc.od_begin(k), hi = inc.od_end(k);
      if (hi - lo < 2) continue;
      std::vector<double> c(L);
      for (std::size_t l = 0; l < L; ++l) c[l] = linearized_cost(net.links[l].delay, F[l]);
      const auto pc = inc.path_costs(c);

      std::size_t toward = lo, away = hi;
      for (std::size_t p = lo; p < hi; ++p) {
        if (pc[p] < pc[toward]) toward = p;
        if (x[p] > 0.0 && (away == hi || pc[p] > pc[away])) away = p;
      }
      if (away == hi || away == toward) continue;

      std::vector<double> delta(L, 0.0);
      for (std::size_t l : inc.path(toward).links) delta[l] += 1.0;
      for (std::size_t l : inc.path(away).links) delta[l] -= 1.0;
      auto slope = [&](double s) {
        double g = 0.0;
        for (std::size_t l = 0; l < L; ++l) {
          if (delta[l] != 0.0) {
            g += delta[l] * linearized_cost(net.links[l].delay, std::max(0.0, F[l] + s * delta[l]));
          }
        }
        return g;
      };

      const double s_max = x[away];
      double s = s_max;
      if (slope(s_max) > 0.0) {
        double a = 0.0, b = s_max;
        while (b - a > opts.line_search_tol) {
          const double mid = 0.5 * (a + b);
          if (mid <= a || mid >= b) break;
          (slope(mid) > 0.0 ? b : a) = mid;
        }
        s = 0.5 * (a + b);
      }
      if (s <= 0.0) continue;
      x[toward] += s;
      x[away] = (s >= s_max) ? 0.0 : x[away] - s;
      for (std::size_t l = 0; l < L; ++l) F[l] = std::max(0.0, F[l] + s * delta[l]);
    }
    // Rebuild from path flows to stop drift in the incremental link loads.
    F = inc.link_loads(x);
    state = duality_gap(net, inc, ods, x, F);
    ++it;
  }

  result.F_omega = F;
  result.path_flow = x;
  result.T_min = state.total;
  result.duality_gap = state.gap;
  result.iterations = it;
  result.converged = done();
  if (!result.converged) {
    throw OptimumNotConverged("system optimum did not converge in " + std::to_string(it) +
                                  " iterations (gap " + std::to_string(state.gap) + ")",
                              std::move(result));
  }
  return result;
}

SystemOptimum solve_system_optimum(const Network& net, const IncidenceStructure& inc,
                                   const OptimumOptions& opts) {
  return solve_system_optimum(net, inc, net.od_pairs, opts);
}

double price_of_anarchy(double T_equilibrium, double T_min) {
  if (!(T_min > 0.0)) return 1.0;
  return T_equilibrium / T_min;
}

}  // namespace fleetpoa
