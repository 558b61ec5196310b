#include "fleetpoa/network.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "fleetpoa/errors.hpp"

namespace fleetpoa {

std::vector<double> FlowProfile::aggregate() const {
  std::vector<double> out(zS.size());
  for (std::size_t p = 0; p < zS.size(); ++p) out[p] = zS[p] + zC[p];
  return out;
}

std::vector<double> LoadProfile::aggregate() const {
  std::vector<double> out(fS.size());
  for (std::size_t l = 0; l < fS.size(); ++l) out[l] = fS[l] + fC[l];
  return out;
}

std::vector<double> LoadProfile::stacked() const {
  std::vector<double> out(fS);
  out.insert(out.end(), fC.begin(), fC.end());
  return out;
}

double DelayPoly::value(double x) const {
  return ((coeffs[3] * x + coeffs[2]) * x + coeffs[1]) * x + coeffs[0];
}

double DelayPoly::first_derivative(double x) const {
  return (3.0 * coeffs[3] * x + 2.0 * coeffs[2]) * x + coeffs[1];
}

double DelayPoly::second_derivative(double x) const {
  return 6.0 * coeffs[3] * x + 2.0 * coeffs[2];
}

double DelayPoly::integral(double lo, double hi) const {
  auto antiderivative = [this](double x) {
    return (((coeffs[3] / 4.0 * x + coeffs[2] / 3.0) * x + coeffs[1] / 2.0) * x + coeffs[0]) * x;
  };
  return antiderivative(hi) - antiderivative(lo);
}

std::optional<std::size_t> Network::link_index(const std::string& id) const {
  for (std::size_t l = 0; l < links.size(); ++l) {
    if (links[l].id == id) return l;
  }
  return std::nullopt;
}

double Network::total_demand() const {
  double total = 0.0;
  for (const auto& od : od_pairs) total += od.demand;
  return total;
}

Network Network::with_fleet_share(double alpha) const {
  Network out = *this;
  for (auto& od : out.od_pairs) od.fleet_share = alpha;
  return out;
}

bool Network::is_parallel() const {
  if (od_pairs.size() != 1 || links.empty()) return false;
  const auto& od = od_pairs.front();
  return std::all_of(links.begin(), links.end(), [&](const Link& link) {
    return link.tail == od.origin && link.head == od.destination;
  });
}

namespace {

bool reachable(const Network& net, const std::string& from, const std::string& to) {
  std::set<std::string> seen{from};
  std::vector<std::string> stack{from};
  while (!stack.empty()) {
    std::string node = stack.back();
    stack.pop_back();
    if (node == to) return true;
    for (const auto& link : net.links) {
      if (link.tail == node && seen.insert(link.head).second) stack.push_back(link.head);
    }
  }
  return false;
}

}  // namespace

std::vector<std::string> validate_network(const Network& net) {
  std::vector<std::string> report;
  auto add = [&report](const std::string& msg) { report.push_back(msg); };

  std::set<std::string> nodes;
  for (const auto& n : net.nodes) {
    if (!nodes.insert(n).second) add("node " + n + ": duplicate node id");
  }
  if (net.links.empty()) add("network has no links");

  std::set<std::string> ids;
  for (const auto& link : net.links) {
    const std::string who = "link " + link.id + ": ";
    if (!ids.insert(link.id).second) add(who + "duplicate link id");
    if (!nodes.count(link.tail)) add(who + "tail " + link.tail + " is not a declared node");
    if (!nodes.count(link.head)) add(who + "head " + link.head + " is not a declared node");
    if (link.tail == link.head) add(who + "tail and head must differ");
    for (std::size_t i = 0; i < 4; ++i) {
      const double a = link.delay.coeffs[i];
      if (!std::isfinite(a)) {
        add(who + "coefficient a" + std::to_string(i) + " is not finite");
      } else if (a < 0.0) {
        add(who + "coefficient a" + std::to_string(i) + " must be non-negative");
      }
    }
    if (!(link.delay.coeffs[1] > 0.0)) add(who + "a1 must be strictly positive");
  }

  if (net.od_pairs.empty()) add("network has no OD pairs");
  for (std::size_t k = 0; k < net.od_pairs.size(); ++k) {
    const auto& od = net.od_pairs[k];
    const std::string who = "od pair " + std::to_string(k) + ": ";
    if (!nodes.count(od.origin)) add(who + "origin " + od.origin + " is not a declared node");
    if (!nodes.count(od.destination)) {
      add(who + "destination " + od.destination + " is not a declared node");
    }
    if (od.origin == od.destination) add(who + "origin and destination must differ");
    if (!(od.demand >= 0.0) || !std::isfinite(od.demand)) add(who + "demand must be non-negative");
    if (!(od.fleet_share >= 0.0 && od.fleet_share <= 1.0)) {
      add(who + "fleet_share must lie in [0, 1]");
    }
    if (od.origin != od.destination && !reachable(net, od.origin, od.destination)) {
      add(who + "destination unreachable from origin");
    }
  }
  return report;
}

IncidenceStructure::IncidenceStructure(std::size_t link_count, std::size_t od_count,
                                       std::vector<Path> paths)
    : links_(link_count), paths_(std::move(paths)), od_begin_(od_count + 1, 0) {
  for (std::size_t p = 0; p < paths_.size(); ++p) {
    if (paths_[p].od >= od_count) throw DimensionMismatch("path refers to unknown OD pair");
    if (p > 0 && paths_[p].od < paths_[p - 1].od) {
      throw InvalidArgument("paths must be grouped by OD pair");
    }
    if (paths_[p].links.empty()) throw InvalidArgument("path without links");
  }
  for (const auto& path : paths_) ++od_begin_[path.od + 1];
  std::partial_sum(od_begin_.begin(), od_begin_.end(), od_begin_.begin());

  matrix_.assign(links_ * paths_.size(), 0);
  for (std::size_t p = 0; p < paths_.size(); ++p) {
    for (std::size_t l : paths_[p].links) {
      if (l >= links_) throw DimensionMismatch("path refers to unknown link");
      matrix_[l * paths_.size() + p] = 1;
    }
  }
}

std::vector<double> IncidenceStructure::link_loads(std::span<const double> path_flows) const {
  if (path_flows.size() != paths_.size()) throw DimensionMismatch("path flow vector has wrong size");
  std::vector<double> loads(links_, 0.0);
  for (std::size_t p = 0; p < paths_.size(); ++p) {
    for (std::size_t l : paths_[p].links) loads[l] += path_flows[p];
  }
  return loads;
}

LoadProfile IncidenceStructure::loads(const FlowProfile& z) const {
  return LoadProfile(link_loads(z.zS), link_loads(z.zC));
}

std::vector<double> IncidenceStructure::path_costs(std::span<const double> link_costs) const {
  if (link_costs.size() != links_) throw DimensionMismatch("link cost vector has wrong size");
  std::vector<double> costs(paths_.size(), 0.0);
  for (std::size_t p = 0; p < paths_.size(); ++p) {
    for (std::size_t l : paths_[p].links) costs[p] += link_costs[l];
  }
  return costs;
}

double IncidenceStructure::spectral_norm_squared() const {
  const std::size_t n = paths_.size();
  if (n == 0) return 0.0;
  // Power iteration on A^T A, started from the all-ones vector (A has no negative entries,
  // so the Perron vector is non-negative and the start is never orthogonal to it).
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double lambda = 0.0;
  for (int it = 0; it < 10000; ++it) {
    std::vector<double> w = path_costs(link_loads(v));
    double norm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
    if (norm == 0.0) return 0.0;
    for (auto& x : w) x /= norm;
    const bool done = std::abs(norm - lambda) <= 1e-13 * norm;
    lambda = norm;
    v = std::move(w);
    if (done) break;
  }
  return lambda;
}

IncidenceStructure enumerate_paths(const Network& net, std::size_t max_paths) {
  std::unordered_map<std::string, std::vector<std::size_t>> outgoing;
  for (std::size_t l = 0; l < net.links.size(); ++l) outgoing[net.links[l].tail].push_back(l);

  std::vector<Path> paths;
  for (std::size_t k = 0; k < net.od_pairs.size(); ++k) {
    const auto& od = net.od_pairs[k];
    std::set<std::string> on_path{od.origin};
    std::vector<std::size_t> current;

    // Depth-first with outgoing links visited in index order yields lexicographic order.
    std::function<void(const std::string&)> extend = [&](const std::string& node) {
      if (node == od.destination) {
        if (paths.size() >= max_paths) {
          throw PathLimitExceeded("more than " + std::to_string(max_paths) +
                                  " paths; network too dense for path enumeration");
        }
        paths.push_back(Path{k, current});
        return;
      }
      auto it = outgoing.find(node);
      if (it == outgoing.end()) return;
      for (std::size_t l : it->second) {
        const std::string& next = net.links[l].head;
        if (on_path.count(next)) continue;
        on_path.insert(next);
        current.push_back(l);
        extend(next);
        current.pop_back();
        on_path.erase(next);
      }
    };
    extend(od.origin);
  }
  return IncidenceStructure(net.links.size(), net.od_pairs.size(), std::move(paths));
}

double feasibility_residual(const IncidenceStructure& inc, std::span<const OdSpec> ods,
                            const FlowProfile& z) {
  const std::size_t P = inc.path_count();
  if (z.zS.size() != P || z.zC.size() != P) {
    throw DimensionMismatch("flow profile has " + std::to_string(z.zS.size()) + "+" +
                            std::to_string(z.zC.size()) + " entries, expected 2x" +
                            std::to_string(P));
  }
  if (ods.size() != inc.od_count()) throw DimensionMismatch("OD list does not match incidence");

  double mismatch = 0.0;
  double negativity = 0.0;
  for (std::size_t k = 0; k < ods.size(); ++k) {
    double sum_s = 0.0;
    double sum_c = 0.0;
    for (std::size_t p = inc.od_begin(k); p < inc.od_end(k); ++p) {
      sum_s += z.zS[p];
      sum_c += z.zC[p];
      negativity = std::max({negativity, -z.zS[p], -z.zC[p]});
    }
    mismatch = std::max({mismatch, std::abs(sum_s - ods[k].selfish_demand()),
                         std::abs(sum_c - ods[k].fleet_demand())});
  }
  return mismatch + negativity;
}

}  // namespace fleetpoa
