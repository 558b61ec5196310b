#include "fleetpoa/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace fleetpoa {

namespace {

void require_single_od(const Network& net) {
  if (net.od_pairs.size() != 1) {
    throw AssumptionViolated("fleet-share analyses require exactly one OD pair (network has " +
                             std::to_string(net.od_pairs.size()) + ")");
  }
}

bool is_subset(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

bool intersects(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  for (std::size_t x : a) {
    if (std::binary_search(b.begin(), b.end(), x)) return true;
  }
  return false;
}

std::vector<std::size_t> above(const std::vector<double>& v, double threshold) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] > threshold) out.push_back(i);
  }
  return out;
}

/// Previous flow rescaled to the class demands of the new fleet share.
FlowProfile warm_start_flow(const FlowProfile& prev, double prev_alpha, double alpha) {
  FlowProfile z = prev;
  if (prev_alpha < 1.0) {
    for (auto& x : z.zS) x *= (1.0 - alpha) / (1.0 - prev_alpha);
  }
  if (prev_alpha > 0.0) {
    for (auto& x : z.zC) x *= alpha / prev_alpha;
  }
  return z;
}

SweepRecord make_record(const Network& net, double alpha, double demand, double t_min,
                        const EquilibriumResult& r) {
  SweepRecord rec;
  rec.alpha = alpha;
  rec.total_delay = total_delay(net, r.f_star);
  rec.poa = price_of_anarchy(rec.total_delay, t_min);
  rec.theta = r.theta;
  rec.mu = r.mu;
  rec.f_star = r.f_star;
  rec.z_star = r.z_star;
  rec.supports = compute_supports(r.z_star, r.f_star, kSupportThreshold, demand);
  rec.converged = r.converged;
  rec.wardrop_residual = r.wardrop_residual;
  rec.vi_gap = r.vi_gap;
  rec.iterations = r.iterations;
  return rec;
}

EquilibriumResult solve_at(const Network& net, const IncidenceStructure& inc, double alpha,
                           const ConditionsReport& conditions, const SweepOptions& opts,
                           const FlowProfile* start) {
  const Network at = net.with_fleet_share(alpha);
  SolverOptions so;
  so.tol = opts.tol;
  so.max_iters = opts.max_iters;
  so.conditions = conditions;
  if (start) so.initial = *start;
  try {
    return solve_equilibrium(at, inc, at.od_pairs, so);
  } catch (const NotConverged& e) {
    return e.last();
  }
}

}  // namespace

bool SupportSets::fleet_within_selfish() const { return is_subset(paths_C, paths_S); }

SupportSets compute_supports(const FlowProfile& z, const LoadProfile& f, double eps, double demand) {
  const double threshold = eps * demand;
  return SupportSets{above(z.zS, threshold), above(z.zC, threshold), above(f.fS, threshold),
                     above(f.fC, threshold)};
}

std::vector<double> uniform_alpha_grid(std::size_t n) {
  if (n < 2) throw InvalidArgument("fleet-share grid needs at least 2 points");
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  return grid;
}

Sweep sweep_alpha(const Network& net, const IncidenceStructure& inc, std::span<const double> grid,
                  const SweepOptions& opts) {
  require_single_od(net);
  for (double a : grid) {
    if (!(a >= 0.0 && a <= 1.0)) throw InvalidArgument("fleet share outside [0, 1]");
  }
  Sweep sweep;
  sweep.demand = net.od_pairs.front().demand;
  if (sweep.demand > 0.0) sweep.conditions = check_conditions(net, sweep.demand);
  sweep.optimum = solve_system_optimum(net, inc);
  const double t_min = sweep.optimum.T_min;
  sweep.records.resize(grid.size());

  auto conditions = sweep.conditions;
  if (!(sweep.demand > 0.0)) conditions.convexity_ok = conditions.strong_mono_ok = true;

  if (opts.warm_start || !opts.parallel) {
    const FlowProfile* prev = nullptr;
    FlowProfile start;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (opts.warm_start && prev) start = warm_start_flow(*prev, grid[i - 1], grid[i]);
      const auto r = solve_at(net, inc, grid[i], conditions, opts,
                              (opts.warm_start && prev) ? &start : nullptr);
      sweep.records[i] = make_record(net, grid[i], sweep.demand, t_min, r);
      prev = &sweep.records[i].z_star;
    }
    return sweep;
  }

  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(grid.size(), std::thread::hardware_concurrency()));
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < grid.size(); i += workers) {
        const auto r = solve_at(net, inc, grid[i], conditions, opts, nullptr);
        sweep.records[i] = make_record(net, grid[i], sweep.demand, t_min, r);
      }
    });
  }
  pool.clear();
  return sweep;
}

FlowProfile construct_scaled_equilibrium(const FlowProfile& z, double alpha_tilde, double alpha) {
  if (!(alpha_tilde > 0.0)) throw InvalidArgument("scaled construction needs alpha_tilde > 0");
  if (!(alpha >= 0.0 && alpha <= alpha_tilde)) {
    throw InvalidArgument("scaled construction needs 0 <= alpha <= alpha_tilde");
  }
  double demand = 0.0;
  for (std::size_t p = 0; p < z.path_count(); ++p) demand += z.zS[p] + z.zC[p];
  const double threshold = kSupportThreshold * demand;
  const auto paths_S = above(z.zS, threshold);
  const auto paths_C = above(z.zC, threshold);
  if (!is_subset(paths_C, paths_S)) {
    throw InvalidArgument("scaled construction needs fleet paths within selfish paths");
  }
  const double keep = alpha / alpha_tilde;
  FlowProfile out(z.path_count());
  for (std::size_t p = 0; p < z.path_count(); ++p) {
    out.zS[p] = z.zS[p] + (1.0 - keep) * z.zC[p];
    out.zC[p] = keep * z.zC[p];
  }
  return out;
}

FlowProfile construct_scaled_equilibrium(const EquilibriumResult& at_alpha_tilde, double alpha_tilde,
                                         double alpha) {
  return construct_scaled_equilibrium(at_alpha_tilde.z_star, alpha_tilde, alpha);
}

CriticalShareReport detect_critical_share(const Network& net, const IncidenceStructure& inc,
                                          const Sweep& sweep, const CriticalShareOptions& opts) {
  require_single_od(net);
  const auto& recs = sweep.records;
  if (recs.empty() || recs.front().alpha != 0.0) {
    throw InvalidArgument("critical-share detection needs a sweep starting at alpha = 0");
  }
  for (std::size_t i = 1; i < recs.size(); ++i) {
    if (!(recs[i].alpha > recs[i - 1].alpha)) throw InvalidArgument("sweep grid must be increasing");
  }

  CriticalShareReport report;
  std::size_t last = 0;
  while (last + 1 < recs.size() && recs[last + 1].supports.fleet_within_selfish()) ++last;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (recs[i].supports.fleet_within_selfish()) report.alpha_inclusion_pointwise = recs[i].alpha;
  }
  report.alpha_tilde_grid = recs[last].alpha;
  report.alpha_tilde = recs[last].alpha;
  report.alpha_tilde_upper = recs[last].alpha;
  report.z_at_alpha_tilde = recs[last].z_star;

  // Refine between the last inclusion-holding and the first failing grid point.
  if (last + 1 < recs.size()) {
    double lo = recs[last].alpha, hi = recs[last + 1].alpha;
    FlowProfile z_lo = recs[last].z_star;
    while (hi - lo > opts.resolution) {
      const double mid = 0.5 * (lo + hi);
      const FlowProfile start = warm_start_flow(z_lo, lo, mid);
      const auto r = solve_at(net, inc, mid, sweep.conditions, opts.solver, &start);
      if (compute_supports(r.z_star, r.f_star, kSupportThreshold, sweep.demand).fleet_within_selfish()) {
        lo = mid;
        z_lo = r.z_star;
      } else {
        hi = mid;
      }
    }
    report.alpha_tilde = lo;
    report.alpha_tilde_upper = hi;
    report.z_at_alpha_tilde = z_lo;
  }

  const auto& base = recs.front();
  const Network& cfg = net;
  for (std::size_t i = 0; i <= last; ++i) {
    const auto& rec = recs[i];
    report.flat_alphas.push_back(rec.alpha);
    report.poa_flat_deviation = std::max(report.poa_flat_deviation, std::abs(rec.poa - base.poa));
    for (std::size_t l = 0; l < rec.f_star.link_count(); ++l) {
      report.flat_load_deviation =
          std::max(report.flat_load_deviation, std::abs(rec.f_star.aggregate(l) - base.f_star.aggregate(l)));
    }
    if (report.alpha_tilde > 0.0) {
      const Network at = cfg.with_fleet_share(rec.alpha);
      const FlowProfile cand = construct_scaled_equilibrium(report.z_at_alpha_tilde, report.alpha_tilde,
                                                            rec.alpha);
      report.construction_residual =
          std::max(report.construction_residual, wardrop_residual(at, inc, at.od_pairs, cand));
      const LoadProfile load = inc.loads(cand);
      for (std::size_t l = 0; l < load.link_count(); ++l) {
        report.construction_load_error =
            std::max({report.construction_load_error, std::abs(load.fS[l] - rec.f_star.fS[l]),
                      std::abs(load.fC[l] - rec.f_star.fC[l])});
      }
    }
  }
  report.poa_flat_ok = report.poa_flat_deviation <= opts.tol;
  return report;
}

bool MonotonicityReport::all_ok() const {
  return poa_nonincreasing.ok && theta_nonincreasing.ok && mu_nondecreasing.ok &&
         fS_link_nonincreasing.ok && fC_link_nondecreasing.ok && support_nesting_ok &&
         (!parallel || shared_support_ok);
}

MonotonicityReport monotonicity_report(const Sweep& sweep, const Network& net,
                                       const MonotonicityOptions& opts) {
  require_single_od(net);
  MonotonicityReport report;
  report.parallel = net.is_parallel();
  report.exploratory = opts.exploratory;
  report.slack = opts.slack;
  if (!report.parallel && !opts.exploratory) {
    throw AssumptionViolated(
        "monotonicity checks require a parallel network (every link joins the origin directly to "
        "the destination); rerun in exploratory mode to record observations");
  }

  // Records an increase (sign +1) or decrease (sign -1) of next over prev beyond the slack.
  auto track = [&](MonotoneCheck& check, double prev, double next, double sign, double alpha,
                   const std::string& where) {
    const double violation = sign * (next - prev);
    if (violation > check.max_violation) {
      check.max_violation = violation;
      check.alpha = alpha;
      check.where = where;
    }
    if (violation > opts.slack) check.ok = false;
  };

  const auto& recs = sweep.records;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& cur = recs[i];
    if (cur.alpha > 0.0 && cur.alpha < 1.0 && sweep.demand > 0.0 &&
        !intersects(cur.supports.links_S, cur.supports.links_C)) {
      report.shared_support_ok = false;
    }
    if (i == 0) continue;
    const auto& prev = recs[i - 1];
    track(report.poa_nonincreasing, prev.poa, cur.poa, +1.0, prev.alpha, "");
    if (!is_subset(cur.supports.links_S, prev.supports.links_S) ||
        !is_subset(prev.supports.links_C, cur.supports.links_C)) {
      report.support_nesting_ok = false;
    }
    const bool same = prev.supports.links_S == cur.supports.links_S &&
                      prev.supports.links_C == cur.supports.links_C;
    if (!same) {
      report.breakpoints.emplace_back(prev.alpha, cur.alpha);
      continue;
    }
    track(report.theta_nonincreasing, prev.theta, cur.theta, +1.0, prev.alpha, "");
    track(report.mu_nondecreasing, prev.mu, cur.mu, -1.0, prev.alpha, "");
    for (std::size_t l = 0; l < net.link_count(); ++l) {
      track(report.fS_link_nonincreasing, prev.f_star.fS[l], cur.f_star.fS[l], +1.0, prev.alpha,
            net.links[l].id);
      track(report.fC_link_nondecreasing, prev.f_star.fC[l], cur.f_star.fC[l], -1.0, prev.alpha,
            net.links[l].id);
    }
    for (std::size_t p = 0; p < cur.z_star.path_count(); ++p) {
      const std::string where = "path " + std::to_string(p + 1);
      track(report.zS_path_nonincreasing, prev.z_star.zS[p], cur.z_star.zS[p], +1.0, prev.alpha, where);
      track(report.zC_path_nondecreasing, prev.z_star.zC[p], cur.z_star.zC[p], -1.0, prev.alpha, where);
    }
  }
  return report;
}

LipschitzReport empirical_lipschitz(std::span<const SweepRecord> records,
                                    const ConditionsReport& conditions, std::size_t link_count,
                                    double demand) {
  LipschitzReport report;
  report.bound_k = conditions.Q * std::sqrt(2.0 * static_cast<double>(link_count)) * demand / conditions.c;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& a = records[i - 1];
    const auto& b = records[i];
    if (!a.converged || !b.converged) continue;
    const double step = std::abs(b.alpha - a.alpha);
    if (step == 0.0) continue;
    double norm2 = 0.0;
    for (std::size_t l = 0; l < a.f_star.link_count(); ++l) {
      norm2 += std::pow(b.f_star.fS[l] - a.f_star.fS[l], 2) + std::pow(b.f_star.fC[l] - a.f_star.fC[l], 2);
    }
    report.max_ratio = std::max(report.max_ratio, std::sqrt(norm2) / step);
  }
  report.ok = conditions.c > 0.0 && report.max_ratio <= report.bound_k;
  return report;
}

}  // namespace fleetpoa
