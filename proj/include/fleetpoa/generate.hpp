#pragma once

#include <cstddef>
#include <cstdint>

#include "fleetpoa/network.hpp"

namespace fleetpoa {

/// Random parallel network o -> d with links l1..ln and delay coefficients drawn
/// uniformly from a0 in [0,2], a1 in [0.1,2], a2 in [0,0.5], a3 in [0,0.1].
///
/// Draws come from std::mt19937_64 seeded with `seed`, mapped to [0,1) by taking the
/// top 53 bits, so the output is identical on every platform. The fleet share is 0.
Network gen_random_parallel(std::uint64_t seed, std::size_t n_links, double demand);

}  // namespace fleetpoa
