#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "fleetpoa/calculus.hpp"
#include "fleetpoa/sysopt.hpp"

using namespace fleetpoa;
using fleetpoa::test::fixture;
using fleetpoa::test::two_link;

TEST_CASE("system optimum of the two-link network") {
  // Stationarity 2 F1 = 1 + 2 F2 with F1 + F2 = D.
  for (double D : {1.0, 2.0}) {
    const Network net = two_link(D);
    const auto inc = enumerate_paths(net);
    const auto opt = solve_system_optimum(net, inc);
    const double F1 = (2.0 * D + 1.0) / 4.0, F2 = D - F1;
    CHECK(opt.converged);
    CHECK(opt.F_omega[0] == doctest::Approx(F1).epsilon(1e-7));
    CHECK(opt.F_omega[1] == doctest::Approx(F2).epsilon(1e-7));
    CHECK(opt.T_min == doctest::Approx(F1 * F1 + F2 * (1.0 + F2)).epsilon(1e-10));
    CHECK(opt.duality_gap <= 1e-9 * (1.0 + opt.T_min));
  }
}

TEST_CASE("a single link has no routing choice") {
  const Network net = fixture("single_link.json");
  const auto inc = enumerate_paths(net);
  const auto opt = solve_system_optimum(net, inc);
  const double D = net.total_demand();
  CHECK(opt.F_omega[0] == doctest::Approx(D));
  CHECK(opt.T_min == doctest::Approx(D * net.links[0].delay.value(D)));
}

TEST_CASE("the optimum ignores how demand is split between classes") {
  const Network net = fixture("braided7.json");
  const auto inc = enumerate_paths(net);
  const auto a = solve_system_optimum(net, inc, net.with_fleet_share(0.0).od_pairs);
  const auto b = solve_system_optimum(net, inc, net.with_fleet_share(0.7).od_pairs);
  CHECK(a.T_min == doctest::Approx(b.T_min).epsilon(1e-12));
}

TEST_CASE("optimum satisfies the marginal-cost optimality conditions") {
  for (const char* name : {"parallel3_flat.json", "diamond.json", "braided7.json"}) {
    const Network net = fixture(name);
    const auto inc = enumerate_paths(net);
    const auto opt = solve_system_optimum(net, inc);
    std::vector<double> marginal(net.link_count());
    for (std::size_t l = 0; l < net.link_count(); ++l) {
      const auto& d = net.links[l].delay;
      marginal[l] = d.value(opt.F_omega[l]) + opt.F_omega[l] * d.first_derivative(opt.F_omega[l]);
    }
    const auto cost = inc.path_costs(marginal);
    const double best = *std::min_element(cost.begin(), cost.end());
    for (std::size_t p = 0; p < inc.path_count(); ++p) {
      INFO(name << " path " << p);
      if (opt.path_flow[p] > 1e-6 * net.total_demand()) CHECK(cost[p] - best <= 1e-6);
    }
    CHECK(opt.T_min == doctest::Approx(total_delay(net, opt.F_omega)).epsilon(1e-12));
  }
}

TEST_CASE("per-link total delay is convex on sampled midpoints") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const DelayPoly d{{2.0 * u(rng), 0.1 + 1.9 * u(rng), 0.5 * u(rng), 0.1 * u(rng)}};
    const double x = 8.0 * u(rng), y = 8.0 * u(rng), m = 0.5 * (x + y);
    auto g = [&](double t) { return t * d.value(t); };
    CHECK(g(m) <= 0.5 * (g(x) + g(y)) + 1e-12);
  }
}

TEST_CASE("price_of_anarchy") {
  CHECK(price_of_anarchy(3.0, 2.875) == doctest::Approx(24.0 / 23.0));
  CHECK(price_of_anarchy(1.0, 0.875) == doctest::Approx(8.0 / 7.0));
  CHECK(price_of_anarchy(0.0, 0.0) == 1.0);
}

TEST_CASE("optimum solver reports non-convergence") {
  const Network net = fixture("braided7.json");
  const auto inc = enumerate_paths(net);
  OptimumOptions opts;
  opts.max_iters = 1;
  opts.tol = 1e-15;
  CHECK_THROWS_AS(solve_system_optimum(net, inc, opts), OptimumNotConverged);
}
