#include "fleetpoa/generate.hpp"

#include <random>
#include <string>

#include "fleetpoa/calculus.hpp"
#include "fleetpoa/errors.hpp"
#include "fleetpoa/io.hpp"

namespace fleetpoa {

Network gen_random_parallel(std::uint64_t seed, std::size_t n_links, double demand) {
  if (n_links < 2) throw InvalidArgument("a random parallel network needs at least 2 links");
  if (!(demand > 0.0)) throw InvalidArgument("demand must be positive");

  std::mt19937_64 rng(seed);
  auto uniform = [&rng](double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    // Rounded so the written file reproduces the network exactly.
    return round12(lo + (hi - lo) * u);
  };

  for (;;) {
    Network net;
    net.name = "random-parallel-s" + std::to_string(seed) + "-n" + std::to_string(n_links);
    net.nodes = {"o", "d"};
    for (std::size_t l = 0; l < n_links; ++l) {
      Link link{"l" + std::to_string(l + 1), "o", "d", {}};
      link.delay.coeffs[0] = uniform(0.0, 2.0);
      link.delay.coeffs[1] = uniform(0.1, 2.0);
      link.delay.coeffs[2] = uniform(0.0, 0.5);
      link.delay.coeffs[3] = uniform(0.0, 0.1);
      net.links.push_back(std::move(link));
    }
    net.od_pairs.push_back(OdSpec{"o", "d", demand, 0.0});
    if (validate_network(net).empty() && check_conditions(net, demand).ok()) return net;
  }
}

}  // namespace fleetpoa
