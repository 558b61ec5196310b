#pragma once

#include <cstddef>
#include <vector>

namespace fleetpoa {

/// Per-path flows of the selfish class (S) and of the coordinated fleet (C).
struct FlowProfile {
  std::vector<double> zS;
  std::vector<double> zC;

  FlowProfile() = default;
  explicit FlowProfile(std::size_t paths) : zS(paths, 0.0), zC(paths, 0.0) {}
  FlowProfile(std::vector<double> s, std::vector<double> c) : zS(std::move(s)), zC(std::move(c)) {}

  std::size_t path_count() const noexcept { return zS.size(); }
  /// Aggregate path flow zS + zC.
  std::vector<double> aggregate() const;
};

/// Per-link loads of both classes. The aggregate load is always recomputed.
struct LoadProfile {
  std::vector<double> fS;
  std::vector<double> fC;

  LoadProfile() = default;
  explicit LoadProfile(std::size_t links) : fS(links, 0.0), fC(links, 0.0) {}
  LoadProfile(std::vector<double> s, std::vector<double> c) : fS(std::move(s)), fC(std::move(c)) {}

  std::size_t link_count() const noexcept { return fS.size(); }
  double aggregate(std::size_t l) const { return fS[l] + fC[l]; }
  std::vector<double> aggregate() const;
  /// Concatenation (fS, fC), the point of the 2L-dimensional load space.
  std::vector<double> stacked() const;
};

}  // namespace fleetpoa
