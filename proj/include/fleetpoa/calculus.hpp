#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fleetpoa/network.hpp"
#include "fleetpoa/profiles.hpp"

namespace fleetpoa {

/// d(F), d'(F) or d''(F) for order 0, 1, 2.
double link_delay(const DelayPoly& delay, double load, int order = 0);

/// Fleet marginal delay m = d(F) + fC d'(F) with F = fS + fC.
double marginal_delay(const DelayPoly& delay, double fS, double fC);

/// Link delays of the aggregate load, one per link.
std::vector<double> link_delays(const Network& net, const LoadProfile& f);
/// Link marginal delays, one per link.
std::vector<double> link_marginal_delays(const Network& net, const LoadProfile& f);

/// The game operator: (d_l(F_l))_l followed by (m_l(f_l))_l.
std::vector<double> operator_H(const Network& net, const LoadProfile& f);

struct ClassCosts {
  double selfish = 0.0;  ///< potential U_S = sum_l int_0^{fS_l} d_l(r + fC_l) dr
  double fleet = 0.0;    ///< fleet travel time U_C = sum_l fC_l d_l(F_l)
};

ClassCosts class_costs(const Network& net, const LoadProfile& f);

/// Total delay sum_l F_l d_l(F_l).
double total_delay(const Network& net, const LoadProfile& f);
double total_delay(const Network& net, const std::vector<double>& aggregate);

struct ConditionPoint {
  std::string link_id;
  double fS = 0.0;
  double fC = 0.0;
  double margin = 0.0;
};

/// Outcome of the convexity and strong-monotonicity checks over the box [0, D]^{2L}.
struct ConditionsReport {
  bool convexity_ok = false;
  bool strong_mono_ok = false;
  /// Unreduced form d' - dm/dfC / 4 > tol evaluated on the grid; cross-check only.
  bool strong_mono_grid_ok = false;
  double c = 0.0;  ///< strong-monotonicity modulus of H over the box
  double Q = 0.0;  ///< Lipschitz constant of H over the box
  double box = 0.0;
  std::size_t grid_points = 0;
  ConditionPoint worst_convexity;   ///< box minimizer of dm/dfC
  ConditionPoint worst_strong_mono; ///< box minimizer of 2d' - fC d''
  ConditionPoint worst_eigen;       ///< where the smallest symmetric-Jacobian eigenvalue was found

  bool ok() const { return convexity_ok && strong_mono_ok; }
};

inline constexpr double kStrictTolerance = 1e-9;
inline constexpr std::size_t kDefaultConditionGrid = 64;

ConditionsReport check_conditions(const Network& net, double total_demand,
                                  std::size_t grid_points = kDefaultConditionGrid);

namespace detail {

/// Per-link Jacobian block of H in the coordinates (fS_l, fC_l).
struct Block {
  double dd_dS, dd_dC, dm_dS, dm_dC;
};
Block jacobian_block(const DelayPoly& delay, double fS, double fC);
double min_symmetric_eigenvalue(const Block& b);
double spectral_norm(const Block& b);

/// q(x, y) = c0 + cx x + cy y + cxx x^2 + cxy x y + cyy y^2.
struct Quadratic2 {
  double c0, cx, cy, cxx, cxy, cyy;
  double operator()(double x, double y) const {
    return c0 + cx * x + cy * y + cxx * x * x + cxy * x * y + cyy * y * y;
  }
};
struct BoxMinimum {
  double x, y, value;
};
/// Exact minimum of q over [0, side]^2 (corners, edge and interior critical points).
BoxMinimum minimize_on_box(const Quadratic2& q, double side);
/// dm/dfC = 2 d'(F) + fC d''(F) as a quadratic in (fS, fC).
Quadratic2 convexity_margin(const DelayPoly& delay);
/// 2 d'(F) - fC d''(F) as a quadratic in (fS, fC).
Quadratic2 strong_mono_margin(const DelayPoly& delay);

}  // namespace detail

}  // namespace fleetpoa
