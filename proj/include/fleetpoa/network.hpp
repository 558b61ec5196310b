#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fleetpoa/profiles.hpp"

namespace fleetpoa {

/// Link delay d(x) = a0 + a1 x + a2 x^2 + a3 x^3.
///
/// Valid delays have non-negative coefficients and a1 > 0, which makes d
/// strictly increasing and convex on [0, inf).
struct DelayPoly {
  std::array<double, 4> coeffs{0.0, 0.0, 0.0, 0.0};

  double a(std::size_t i) const { return coeffs[i]; }

  double value(double x) const;
  double first_derivative(double x) const;
  double second_derivative(double x) const;
  double third_derivative() const { return 6.0 * coeffs[3]; }
  /// Integral of d over [lo, hi].
  double integral(double lo, double hi) const;

  bool operator==(const DelayPoly&) const = default;
};

struct Link {
  std::string id;
  std::string tail;
  std::string head;
  DelayPoly delay;

  bool operator==(const Link&) const = default;
};

struct OdSpec {
  std::string origin;
  std::string destination;
  double demand = 0.0;
  double fleet_share = 0.0;

  double selfish_demand() const { return (1.0 - fleet_share) * demand; }
  double fleet_demand() const { return fleet_share * demand; }

  bool operator==(const OdSpec&) const = default;
};

struct Network {
  std::string name;
  std::vector<std::string> nodes;
  std::vector<Link> links;
  std::vector<OdSpec> od_pairs;

  std::size_t link_count() const noexcept { return links.size(); }
  std::optional<std::size_t> link_index(const std::string& id) const;
  /// Sum of all OD demands.
  double total_demand() const;
  /// Copy of this network with every OD pair's fleet share replaced.
  Network with_fleet_share(double alpha) const;
  /// True when there is a single OD pair and every link joins its origin to its destination.
  bool is_parallel() const;

  bool operator==(const Network&) const = default;
};

/// Lists every invariant violation of the network; an empty list means valid.
std::vector<std::string> validate_network(const Network& net);

struct Path {
  std::size_t od = 0;
  std::vector<std::size_t> links;
};

/// Paths grouped by OD pair together with the link-path incidence matrix.
class IncidenceStructure {
 public:
  IncidenceStructure() = default;
  IncidenceStructure(std::size_t link_count, std::size_t od_count, std::vector<Path> paths);

  std::size_t link_count() const noexcept { return links_; }
  std::size_t path_count() const noexcept { return paths_.size(); }
  std::size_t od_count() const noexcept { return od_begin_.empty() ? 0 : od_begin_.size() - 1; }

  const std::vector<Path>& paths() const noexcept { return paths_; }
  const Path& path(std::size_t p) const { return paths_[p]; }
  /// Paths of OD pair k occupy indices [od_begin(k), od_end(k)).
  std::size_t od_begin(std::size_t k) const { return od_begin_[k]; }
  std::size_t od_end(std::size_t k) const { return od_begin_[k + 1]; }

  /// A(l, p): 1 if link l lies on path p.
  int entry(std::size_t l, std::size_t p) const { return matrix_[l * paths_.size() + p]; }

  /// Link loads A z.
  std::vector<double> link_loads(std::span<const double> path_flows) const;
  LoadProfile loads(const FlowProfile& z) const;
  /// Path costs A^T c for per-link costs c.
  std::vector<double> path_costs(std::span<const double> link_costs) const;
  /// Largest eigenvalue of A^T A (squared spectral norm of A).
  double spectral_norm_squared() const;

 private:
  std::size_t links_ = 0;
  std::vector<Path> paths_;
  std::vector<std::size_t> od_begin_;
  std::vector<int> matrix_;
};

inline constexpr std::size_t kDefaultPathCap = 10000;

/// Enumerates all simple directed paths of every OD pair, lexicographically by link index.
IncidenceStructure enumerate_paths(const Network& net, std::size_t max_paths = kDefaultPathCap);

/// Distance of z from the feasible set Z: worst demand mismatch plus worst negativity.
double feasibility_residual(const IncidenceStructure& inc, std::span<const OdSpec> ods,
                            const FlowProfile& z);

}  // namespace fleetpoa
