#include "fleetpoa/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "fleetpoa/errors.hpp"

namespace fleetpoa {

namespace {

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

/// Number of compositions of `steps` into `parts` non-negative parts.
double simplex_grid_size(std::size_t parts, std::size_t steps) {
  return parts == 0 ? 1.0 : binomial(steps + parts - 1, parts - 1);
}

/// All points of {x >= 0, sum x = total} on a uniform grid with `steps` increments,
/// in lexicographic order of the integer compositions.
std::vector<std::vector<double>> simplex_grid(std::size_t parts, std::size_t steps, double total) {
  std::vector<std::vector<double>> out;
  if (!(total > 0.0)) {
    out.emplace_back(parts, 0.0);
    return out;
  }
  std::vector<std::size_t> counts(parts, 0);
  std::function<void(std::size_t, std::size_t)> fill = [&](std::size_t i, std::size_t left) {
    if (i + 1 == parts) {
      counts[i] = left;
      std::vector<double> point(parts);
      for (std::size_t j = 0; j < parts; ++j) {
        point[j] = total * static_cast<double>(counts[j]) / static_cast<double>(steps);
      }
      out.push_back(std::move(point));
      return;
    }
    for (std::size_t c = 0; c <= left; ++c) {
      counts[i] = c;
      fill(i + 1, left - c);
    }
  };
  fill(0, steps);
  return out;
}

void require_single_od(const IncidenceStructure& inc, std::span<const OdSpec> ods) {
  if (ods.size() != 1 || inc.od_count() != 1) {
    throw InvalidArgument("brute-force oracles handle a single OD pair");
  }
}

}  // namespace

OracleEquilibrium brute_force_equilibrium(const Network& net, const IncidenceStructure& inc,
                                          std::span<const OdSpec> ods, std::size_t grid_n) {
  require_single_od(inc, ods);
  const std::size_t P = inc.path_count();
  if (P > 3) throw DimensionTooLarge("equilibrium oracle supports at most 3 paths");
  if (grid_n < 2 || grid_n > kOracleMaxGrid) {
    throw DimensionTooLarge("equilibrium oracle grid must have 2.." + std::to_string(kOracleMaxGrid) +
                            " points per dimension");
  }
  const std::size_t steps = grid_n - 1;
  const double dS = ods[0].selfish_demand(), dC = ods[0].fleet_demand();
  const double nS = dS > 0.0 ? simplex_grid_size(P, steps) : 1.0;
  const double nC = dC > 0.0 ? simplex_grid_size(P, steps) : 1.0;
  if (nS * nC > static_cast<double>(kOracleMaxPoints)) {
    throw DimensionTooLarge("equilibrium oracle grid has too many points");
  }

  const auto gridS = simplex_grid(P, steps, dS);
  const auto gridC = simplex_grid(P, steps, dC);
  std::vector<std::vector<double>> loadS, loadC;
  for (const auto& z : gridS) loadS.push_back(inc.link_loads(z));
  for (const auto& z : gridC) loadC.push_back(inc.link_loads(z));

  const std::size_t L = net.link_count();
  struct Costs {
    double selfish, fleet;
  };
  // Same quantities as class_costs, evaluated without allocating per grid point.
  auto costs = [&](std::size_t i, std::size_t j) {
    Costs u{0.0, 0.0};
    for (std::size_t l = 0; l < L; ++l) {
      const auto& d = net.links[l].delay;
      const double fs = std::max(0.0, loadS[i][l]), fc = std::max(0.0, loadC[j][l]);
      u.selfish += d.integral(fc, fc + fs);
      u.fleet += fc * d.value(fs + fc);
    }
    return u;
  };

  // Each player's best response value against every opponent grid point.
  std::vector<double> bestS(gridC.size(), std::numeric_limits<double>::infinity());
  std::vector<double> bestC(gridS.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < gridS.size(); ++i) {
    for (std::size_t j = 0; j < gridC.size(); ++j) {
      const auto u = costs(i, j);
      bestS[j] = std::min(bestS[j], u.selfish);
      bestC[i] = std::min(bestC[i], u.fleet);
    }
  }

  double best = std::numeric_limits<double>::infinity();
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < gridS.size(); ++i) {
    for (std::size_t j = 0; j < gridC.size(); ++j) {
      const auto u = costs(i, j);
      const double gain = std::max(u.selfish - bestS[j], u.fleet - bestC[i]);
      if (gain < best) {
        best = gain;
        bi = i;
        bj = j;
      }
    }
  }

  OracleEquilibrium out;
  out.z = FlowProfile(gridS[bi], gridC[bj]);
  out.f = LoadProfile(loadS[bi], loadC[bj]);
  out.certificate = std::max(0.0, best);
  return out;
}

OracleOptimum brute_force_optimum(const Network& net, const IncidenceStructure& inc,
                                  double total_demand, std::size_t grid_n) {
  if (inc.od_count() != 1) throw InvalidArgument("brute-force oracles handle a single OD pair");
  const std::size_t P = inc.path_count();
  if (P > 4) throw DimensionTooLarge("optimum oracle supports at most 4 paths");
  if (grid_n < 2) throw DimensionTooLarge("optimum oracle grid needs at least 2 points");
  const std::size_t steps = grid_n - 1;
  if (total_demand > 0.0 && simplex_grid_size(P, steps) > static_cast<double>(kOracleMaxPoints)) {
    throw DimensionTooLarge("optimum oracle grid has too many points");
  }

  OracleOptimum out;
  out.T = std::numeric_limits<double>::infinity();
  for (const auto& z : simplex_grid(P, steps, total_demand)) {
    const auto F = inc.link_loads(z);
    double T = 0.0;
    for (std::size_t l = 0; l < F.size(); ++l) T += F[l] * net.links[l].delay.value(F[l]);
    if (T < out.T) {
      out.T = T;
      out.F = F;
    }
  }
  return out;
}

}  // namespace fleetpoa
