#pragma once

#include <string>

#include "fleetpoa/io.hpp"
#include "fleetpoa/network.hpp"

namespace fleetpoa::test {

inline std::string fixture_path(const std::string& name) {
  return std::string(FLEETPOA_FIXTURES) + "/" + name;
}

inline Network fixture(const std::string& name) { return parse_network_file(fixture_path(name)); }

/// Two parallel links d1(x) = x, d2(x) = 1 + x with the given demand and fleet share.
inline Network two_link(double demand, double alpha = 0.0) {
  Network net;
  net.name = "two-link";
  net.nodes = {"o", "d"};
  net.links = {Link{"l1", "o", "d", DelayPoly{{0.0, 1.0, 0.0, 0.0}}},
               Link{"l2", "o", "d", DelayPoly{{1.0, 1.0, 0.0, 0.0}}}};
  net.od_pairs = {OdSpec{"o", "d", demand, alpha}};
  return net;
}

inline Network parallel(std::vector<DelayPoly> delays, double demand, double alpha = 0.0) {
  Network net;
  net.nodes = {"o", "d"};
  for (std::size_t l = 0; l < delays.size(); ++l) {
    net.links.push_back(Link{"l" + std::to_string(l + 1), "o", "d", delays[l]});
  }
  net.od_pairs = {OdSpec{"o", "d", demand, alpha}};
  return net;
}

}  // namespace fleetpoa::test
