#include <algorithm>
#include <cmath>
#include <limits>

#include "fleetpoa/calculus.hpp"
#include "fleetpoa/errors.hpp"

namespace fleetpoa {

namespace detail {

Block jacobian_block(const DelayPoly& delay, double fS, double fC) {
  const double F = fS + fC;
  const double d1 = delay.first_derivative(F);
  const double d2 = delay.second_derivative(F);
  return Block{d1, d1, d1 + fC * d2, 2.0 * d1 + fC * d2};
}

double min_symmetric_eigenvalue(const Block& b) {
  const double a = b.dd_dS;
  const double c = b.dm_dC;
  const double off = 0.5 * (b.dd_dC + b.dm_dS);
  return 0.5 * (a + c) - std::hypot(0.5 * (a - c), off);
}

double spectral_norm(const Block& b) {
  const double frob2 =
      b.dd_dS * b.dd_dS + b.dd_dC * b.dd_dC + b.dm_dS * b.dm_dS + b.dm_dC * b.dm_dC;
  const double det = b.dd_dS * b.dm_dC - b.dd_dC * b.dm_dS;
  const double disc = std::max(0.0, frob2 * frob2 - 4.0 * det * det);
  return std::sqrt(0.5 * (frob2 + std::sqrt(disc)));
}

BoxMinimum minimize_on_box(const Quadratic2& q, double side) {
  BoxMinimum best{0.0, 0.0, std::numeric_limits<double>::infinity()};
  auto consider = [&](double x, double y) {
    if (x < 0.0 || y < 0.0 || x > side || y > side) return;
    const double v = q(x, y);
    if (v < best.value) best = {x, y, v};
  };
  consider(0.0, 0.0);
  consider(side, 0.0);
  consider(0.0, side);
  consider(side, side);

  // Edges: one-dimensional quadratics a + b t + c t^2.
  auto edge = [&](double b, double c, auto point) {
    if (c != 0.0) {
      const double t = -b / (2.0 * c);
      if (t > 0.0 && t < side) point(t);
    }
  };
  edge(q.cy, q.cyy, [&](double t) { consider(0.0, t); });
  edge(q.cy + q.cxy * side, q.cyy, [&](double t) { consider(side, t); });
  edge(q.cx, q.cxx, [&](double t) { consider(t, 0.0); });
  edge(q.cx + q.cxy * side, q.cxx, [&](double t) { consider(t, side); });

  const double det = 4.0 * q.cxx * q.cyy - q.cxy * q.cxy;
  if (std::abs(det) > 1e-300) {
    const double x = (-q.cx * 2.0 * q.cyy + q.cy * q.cxy) / det;
    const double y = (-q.cy * 2.0 * q.cxx + q.cx * q.cxy) / det;
    consider(x, y);
  }
  return best;
}

// With F = fS + fC:
//   2d'(F) + fC d''(F) = 2a1 + 4a2 F + 6a3 F^2 + fC (2a2 + 6a3 F)
//   2d'(F) - fC d''(F) = 2a1 + 4a2 F + 6a3 F^2 - fC (2a2 + 6a3 F)
Quadratic2 convexity_margin(const DelayPoly& d) {
  const double a1 = d.a(1), a2 = d.a(2), a3 = d.a(3);
  return Quadratic2{2.0 * a1, 4.0 * a2, 6.0 * a2, 6.0 * a3, 18.0 * a3, 12.0 * a3};
}

Quadratic2 strong_mono_margin(const DelayPoly& d) {
  const double a1 = d.a(1), a2 = d.a(2), a3 = d.a(3);
  return Quadratic2{2.0 * a1, 4.0 * a2, 2.0 * a2, 6.0 * a3, 6.0 * a3, 0.0};
}

}  // namespace detail

ConditionsReport check_conditions(const Network& net, double total_demand,
                                  std::size_t grid_points) {
  if (!(total_demand > 0.0)) throw InvalidArgument("condition box requires a positive demand");
  if (grid_points < 2) throw InvalidArgument("condition grid needs at least 2 points per axis");
  using namespace detail;

  const double box = total_demand;
  ConditionsReport report;
  report.box = box;
  report.grid_points = grid_points;
  report.strong_mono_grid_ok = true;

  double min_convexity = std::numeric_limits<double>::infinity();
  double min_strong = std::numeric_limits<double>::infinity();
  double min_eigen = std::numeric_limits<double>::infinity();
  double max_norm = 0.0;
  const double step = box / static_cast<double>(grid_points - 1);

  for (const auto& link : net.links) {
    const auto& delay = link.delay;

    const BoxMinimum conv = minimize_on_box(convexity_margin(delay), box);
    if (conv.value < min_convexity) {
      min_convexity = conv.value;
      report.worst_convexity = {link.id, conv.x, conv.y, conv.value};
    }
    const BoxMinimum strong = minimize_on_box(strong_mono_margin(delay), box);
    if (strong.value < min_strong) {
      min_strong = strong.value;
      report.worst_strong_mono = {link.id, strong.x, strong.y, strong.value};
    }

    double link_min = std::numeric_limits<double>::infinity();
    double at_s = 0.0, at_c = 0.0;
    for (std::size_t i = 0; i < grid_points; ++i) {
      const double fS = std::min(box, static_cast<double>(i) * step);
      for (std::size_t j = 0; j < grid_points; ++j) {
        const double fC = std::min(box, static_cast<double>(j) * step);
        const Block b = jacobian_block(delay, fS, fC);
        const double lam = min_symmetric_eigenvalue(b);
        if (lam < link_min) {
          link_min = lam;
          at_s = fS;
          at_c = fC;
        }
        max_norm = std::max(max_norm, spectral_norm(b));
        if (!(b.dd_dS - 0.25 * b.dm_dC > kStrictTolerance)) report.strong_mono_grid_ok = false;
      }
    }

    // Refine inside the grid cells around the coarse minimizer.
    constexpr int kRefine = 32;
    const double lo_s = std::max(0.0, at_s - step), hi_s = std::min(box, at_s + step);
    const double lo_c = std::max(0.0, at_c - step), hi_c = std::min(box, at_c + step);
    for (int i = 0; i <= kRefine; ++i) {
      const double fS = lo_s + (hi_s - lo_s) * i / kRefine;
      for (int j = 0; j <= kRefine; ++j) {
        const double fC = lo_c + (hi_c - lo_c) * j / kRefine;
        const double lam = min_symmetric_eigenvalue(jacobian_block(delay, fS, fC));
        if (lam < link_min) {
          link_min = lam;
          at_s = fS;
          at_c = fC;
        }
      }
    }
    if (link_min < min_eigen) {
      min_eigen = link_min;
      report.worst_eigen = {link.id, at_s, at_c, link_min};
    }
  }

  report.convexity_ok = min_convexity > kStrictTolerance;
  report.c = min_eigen - kStrictTolerance;
  report.Q = max_norm;
  report.strong_mono_ok = min_strong > kStrictTolerance && report.c > 0.0;
  return report;
}

}  // namespace fleetpoa
