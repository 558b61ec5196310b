// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fleetpoa/analysis.hpp"
#include "fleetpoa/calculus.hpp"
#include "fleetpoa/equilibrium.hpp"
#include "fleetpoa/generate.hpp"
#include "fleetpoa/io.hpp"
#include "fleetpoa/oracle.hpp"
#include "fleetpoa/sysopt.hpp"

using namespace fleetpoa;

namespace {

const std::vector<std::string> kFixtures = {"case_a.json",         "case_b.json",  "single_link.json",
                                            "parallel3_flat.json", "diamond.json", "braided7.json"};

Network load_fixture(const std::string& name) {
  return parse_network_file(std::string(FLEETPOA_FIXTURES) + "/" + name);
}

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

SolverOptions verified(const Network& net, double tol = kDefaultSolverTolerance) {
  SolverOptions opts;
  opts.tol = tol;
  opts.conditions = check_conditions(net, net.total_demand());
  return opts;
}

// Random parallel instances shared by the monotonicity, conditions and Lipschitz criteria.
struct RandomInstance {
  std::uint64_t seed;
  Network net;
  Sweep sweep;
};

std::vector<RandomInstance> g_random;
std::vector<std::pair<std::string, Sweep>> g_fixture_sweeps;

// Two parallel links d1 = x, d2 = 1 + x with unit demand. Link 2 is idle under selfish
// routing; the fleet balances m1 = 1 + aD - 2 fC2 against m2 = 1 + 2 fC2, so fC2 = a / 4
// and the selfish class stays on link 1 throughout.
struct CaseAClosedForm {
  static std::vector<double> aggregate(double a) { return {1.0 - 0.25 * a, 0.25 * a}; }
  static double total_delay(double a) {
    const auto F = aggregate(a);
    return F[0] * F[0] + F[1] * (1.0 + F[1]);
  }
  // Optimum balances 2 F1 = 1 + 2 F2.
  static double t_min() { return 0.75 * 0.75 + 0.25 * 1.25; }
};

bool criterion1(Verdict& v) {
  const Network base = load_fixture("case_a.json");
  const CaseAClosedForm exact;
  const double t_min = exact.t_min();
  v.require(std::abs(t_min - 0.875) < 1e-15, "closed-form T_min");
  const std::vector<std::pair<double, double>> targets = {
      {0.0, 8.0 / 7.0}, {0.5, 0.90625 / 0.875}, {1.0, 1.0}};
  const std::vector<double> tolerances = {1e-6, 1e-5, 1e-6};
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto [alpha, expected] = targets[i];
    v.require(std::abs(exact.total_delay(alpha) / t_min - expected) < 1e-14, "closed form at alpha");
    const Network net = base.with_fleet_share(alpha);
    const auto inc = enumerate_paths(net);
    const auto eq = solve_equilibrium(net, inc, verified(net));
    const auto opt = solve_system_optimum(net, inc);
    const double poa = price_of_anarchy(total_delay(net, eq.f_star), opt.T_min);
    const double err = std::abs(poa - expected);
    v.detail << " PoA(" << alpha << ")=" << format_number(poa) << " err " << format_number(err) << ";";
    v.require(err <= tolerances[i], "PoA tolerance");
    const std::size_t n = 1001;
    const auto oracle = brute_force_equilibrium(net, inc, net.od_pairs, n);
    const double step = net.total_demand() / (n - 1);
    v.require(max_abs_diff(oracle.f.aggregate(), exact.aggregate(alpha)) <= 2 * step, "oracle cross-check");
  }
  return v.pass;
}

bool criterion2(Verdict& v) {
  const Network net = load_fixture("case_b.json");
  const auto inc = enumerate_paths(net);
  const auto sweep = sweep_alpha(net, inc, uniform_alpha_grid(101));
  const auto rep = detect_critical_share(net, inc, sweep);
  const double err_tilde = std::abs(rep.alpha_tilde - 0.5);
  v.detail << " alpha_tilde=" << format_number(rep.alpha_tilde) << ";";
  v.require(err_tilde <= 1e-4, "alpha_tilde within 1e-4");
  double flat = 0.0;
  double poa075 = 0.0, poa1 = 0.0;
  for (const auto& r : sweep.records) {
    v.require(r.converged, "convergence");
    if (r.alpha <= 0.5 + 1e-12) flat = std::max(flat, std::abs(r.poa - 24.0 / 23.0));
    if (std::abs(r.alpha - 0.75) < 1e-12) poa075 = r.poa;
    if (r.alpha == 1.0) poa1 = r.poa;
  }
  v.detail << " max |PoA - 24/23| on [0,0.5]=" << format_number(flat) << "; PoA(0.75)=" << format_number(poa075)
           << "; PoA(1)=" << format_number(poa1) << ";";
  v.require(flat <= 1e-6, "flat PoA");
  v.require(std::abs(poa075 - 2.90625 / 2.875) <= 1e-5, "PoA(0.75)");
  v.require(std::abs(poa1 - 1.0) <= 1e-6, "PoA(1)");
  return v.pass;
}

bool criterion3(Verdict& v) {
  const Network net = load_fixture("case_b.json");
  const auto inc = enumerate_paths(net);
  const auto sweep = sweep_alpha(net, inc, uniform_alpha_grid(101));
  const auto rep = detect_critical_share(net, inc, sweep);
  double residual = 0.0, load_error = 0.0;
  std::size_t checked = 0;
  for (const auto& r : sweep.records) {
    if (r.alpha > rep.alpha_tilde) break;
    const auto candidate = construct_scaled_equilibrium(rep.z_at_alpha_tilde, rep.alpha_tilde, r.alpha);
    const Network at = net.with_fleet_share(r.alpha);
    residual = std::max(residual, wardrop_residual(at, inc, candidate));
    load_error = std::max(load_error, max_abs_diff(inc.link_loads(candidate.zS), r.f_star.fS));
    load_error = std::max(load_error, max_abs_diff(inc.link_loads(candidate.zC), r.f_star.fC));
    ++checked;
  }
  v.detail << " " << checked << " grid points; residual " << format_number(residual) << "; load error "
           << format_number(load_error) << ";";
  v.require(checked == 50, "flat range covers the grid points up to 0.49");
  v.require(residual < 1e-7, "Wardrop residual");
  v.require(load_error < 1e-7, "load match");
  return v.pass;
}

bool criterion4(Verdict& v) {
  const std::vector<double> demands = {1.0, 2.0, 4.0};
  const std::vector<double> alphas = {0.0, 0.3, 0.6, 1.0};
  const std::size_t n_eq = 1001, n_opt = 2001;
  double worst_ratio = 0.0, worst_opt = 0.0;
  for (std::uint64_t i = 0; i < 10; ++i) {
    const double D = demands[i % demands.size()];
    const Network base = gen_random_parallel(500 + i, 2, D);
    const auto inc = enumerate_paths(base);
    const double step = D / (n_eq - 1);
    for (double alpha : alphas) {
      const Network net = base.with_fleet_share(alpha);
      const auto eq = solve_equilibrium(net, inc, verified(net));
      const auto oracle = brute_force_equilibrium(net, inc, net.od_pairs, n_eq);
      const double diff = std::max(max_abs_diff(eq.f_star.fS, oracle.f.fS), max_abs_diff(eq.f_star.fC, oracle.f.fC));
      worst_ratio = std::max(worst_ratio, diff / step);
      v.require(diff <= 2 * step, "equilibrium load vs oracle (seed " + std::to_string(500 + i) + ")");
    }
    const auto opt = solve_system_optimum(base, inc);
    const auto boracle = brute_force_optimum(base, inc, D, n_opt);
    const double d = std::abs(opt.T_min - boracle.T);
    worst_opt = std::max(worst_opt, d);
    v.require(d <= 1e-4, "optimum vs oracle");
    v.require(boracle.T >= opt.T_min - 1e-9, "oracle optimum above certified optimum");
  }
  v.detail << " worst load diff " << format_number(worst_ratio) << " grid steps; worst |T - T_oracle| "
           << format_number(worst_opt) << ";";
  return v.pass;
}

bool criterion5(Verdict& v) {
  const std::vector<double> demands = {1.0, 2.0, 4.0};
  double worst = 0.0;
  std::size_t breakpoints = 0;
  for (std::uint64_t i = 0; i < 25; ++i) {
    RandomInstance inst;
    inst.seed = 1000 + i;
    inst.net = gen_random_parallel(inst.seed, 3 + i % 4, demands[i % demands.size()]);
    const auto inc = enumerate_paths(inst.net);
    inst.sweep = sweep_alpha(inst.net, inc, uniform_alpha_grid(101));
    const auto rep = monotonicity_report(inst.sweep, inst.net);
    for (const auto& r : inst.sweep.records) v.require(r.converged, "convergence");
    const std::string tag = " (seed " + std::to_string(inst.seed) + ")";
    v.require(rep.poa_nonincreasing.ok, "PoA non-increasing" + tag);
    v.require(rep.theta_nonincreasing.ok, "theta non-increasing" + tag);
    v.require(rep.mu_nondecreasing.ok, "mu non-decreasing" + tag);
    v.require(rep.fS_link_nonincreasing.ok, "fS non-increasing" + tag);
    v.require(rep.fC_link_nondecreasing.ok, "fC non-decreasing" + tag);
    v.require(rep.support_nesting_ok, "support nesting" + tag);
    for (const auto* c : {&rep.poa_nonincreasing, &rep.theta_nonincreasing, &rep.mu_nondecreasing,
                          &rep.fS_link_nonincreasing, &rep.fC_link_nondecreasing}) {
      worst = std::max(worst, c->max_violation);
    }
    breakpoints += rep.breakpoints.size();
    g_random.push_back(std::move(inst));
  }
  v.detail << " 25 instances; worst violation " << format_number(worst) << " (slack "
           << format_number(10 * kDefaultSolverTolerance) << "); " << breakpoints << " support changes;";
  return v.pass;
}

bool criterion6(Verdict& v) {
  std::mt19937_64 rng(6);
  std::size_t instances = 0, pairs = 0;
  double tightest = 1e300;
  auto check = [&](const Network& net, const std::string& tag) {
    const double D = net.total_demand();
    const auto rep = check_conditions(net, D);
    v.require(rep.convexity_ok, "convexity " + tag);
    v.require(rep.strong_mono_ok, "strong monotonicity " + tag);
    if (!rep.ok()) return;
    std::uniform_real_distribution<double> u(0.0, D);
    const std::size_t L = net.link_count();
    for (int k = 0; k < 100; ++k) {
      LoadProfile x(L), y(L);
      for (std::size_t l = 0; l < L; ++l) {
        x.fS[l] = u(rng);
        x.fC[l] = u(rng);
        y.fS[l] = u(rng);
        y.fC[l] = u(rng);
      }
      const auto hx = operator_H(net, x), hy = operator_H(net, y);
      const auto xs = x.stacked(), ys = y.stacked();
      double inner = 0.0, sq = 0.0;
      for (std::size_t j = 0; j < xs.size(); ++j) {
        inner += (hx[j] - hy[j]) * (xs[j] - ys[j]);
        sq += (xs[j] - ys[j]) * (xs[j] - ys[j]);
      }
      tightest = std::min(tightest, inner / (rep.c * sq));
      v.require(inner >= rep.c * sq, "pairwise strong monotonicity " + tag);
      ++pairs;
    }
    ++instances;
  };
  for (const auto& inst : g_random) check(inst.net, "seed " + std::to_string(inst.seed));
  for (const auto& name : kFixtures) check(load_fixture(name), name);
  v.require(instances == g_random.size() + kFixtures.size(), "instance count");
  v.detail << " " << instances << " instances, " << pairs << " pairs; min ratio to c " << format_number(tightest)
           << ";";
  return v.pass;
}

bool criterion7(Verdict& v) {
  for (const auto& name : kFixtures) {
    const Network net = load_fixture(name);
    const auto inc = enumerate_paths(net);
    g_fixture_sweeps.emplace_back(name, sweep_alpha(net, inc, uniform_alpha_grid(101)));
  }
  double worst = 0.0;
  std::size_t sweeps = 0;
  auto check = [&](const Network& net, const Sweep& s, const std::string& tag) {
    const auto rep = empirical_lipschitz(s.records, s.conditions, net.link_count(), s.demand);
    worst = std::max(worst, rep.max_ratio / rep.bound_k);
    v.require(rep.ok, "Lipschitz bound " + tag);
    ++sweeps;
  };
  for (const auto& inst : g_random) check(inst.net, inst.sweep, "seed " + std::to_string(inst.seed));
  for (const auto& [name, s] : g_fixture_sweeps) check(load_fixture(name), s, name);
  v.detail << " " << sweeps << " sweeps; worst ratio / bound " << format_number(worst) << ";";
  return v.pass;
}

bool criterion8(Verdict& v) {
  std::mt19937_64 rng(8);
  double worst = 0.0;
  std::size_t points = 0;
  for (const auto& name : kFixtures) {
    const Network net = load_fixture(name);
    const double D = net.total_demand();
    const std::size_t L = net.link_count();
    const double h = 1e-5 * std::max(1.0, D);
    std::uniform_real_distribution<double> u(2 * h, D - 2 * h);
    for (int k = 0; k < 50; ++k) {
      LoadProfile f(L);
      for (std::size_t l = 0; l < L; ++l) {
        f.fS[l] = u(rng);
        f.fC[l] = u(rng);
      }
      const auto H = operator_H(net, f);
      for (std::size_t l = 0; l < L; ++l) {
        for (int cls = 0; cls < 2; ++cls) {
          LoadProfile up = f, dn = f;
          auto& a = cls == 0 ? up.fS : up.fC;
          auto& b = cls == 0 ? dn.fS : dn.fC;
          a[l] += h;
          b[l] -= h;
          const auto cu = class_costs(net, up), cd = class_costs(net, dn);
          const double g = cls == 0 ? (cu.selfish - cd.selfish) / (2 * h) : (cu.fleet - cd.fleet) / (2 * h);
          const double ref = H[cls * L + l];
          const double rel = std::abs(g - ref) / std::max(std::abs(ref), 1e-300);
          worst = std::max(worst, rel);
          v.require(rel <= 1e-6, "gradient " + name);
        }
      }
      ++points;
    }
  }
  v.detail << " " << points << " points; worst relative error " << format_number(worst) << ";";
  return v.pass;
}

bool criterion9(Verdict& v) {
  const Network net = load_fixture("braided7.json");
  const auto inc = enumerate_paths(net);
  v.require(net.link_count() == 7 && inc.path_count() == 4, "seven links and four paths");
  v.require(!net.is_parallel(), "non-parallel topology");
  // The solver's gap test is relative to f^T H; the absolute bound needs a tighter tolerance.
  SweepOptions sweep_opts;
  sweep_opts.tol = 1e-9;
  const auto sweep = sweep_alpha(net, inc, uniform_alpha_grid(101), sweep_opts);
  double worst_gap = 0.0;
  for (const auto& r : sweep.records) {
    v.require(r.converged, "convergence");
    worst_gap = std::max(worst_gap, r.vi_gap);
  }
  v.require(worst_gap < 1e-8, "vi_gap below 1e-8");
  MonotonicityOptions opts;
  opts.exploratory = true;
  opts.slack = 10 * sweep_opts.tol;
  const auto rep = monotonicity_report(sweep, net, opts);
  v.require(rep.exploratory && !rep.parallel, "exploratory report");
  v.detail << " worst vi_gap " << format_number(worst_gap) << "; observed PoA "
           << (rep.poa_nonincreasing.ok ? "non-increasing" : "not monotone") << ", path flows "
           << (rep.zC_path_nondecreasing.ok ? "monotone" : "not monotone") << ";";
  return v.pass;
}

struct Criterion {
  int id;
  std::string title;
  double budget_seconds;
  std::function<bool(Verdict&)> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "two-link D=1 PoA at alpha 0, 0.5, 1", 1.0, criterion1},
      {2, "two-link D=2 critical share and PoA profile", 5.0, criterion2},
      {3, "scaled construction below the critical share", 5.0, criterion3},
      {4, "solver vs brute-force oracle on random 2-link instances", 30.0, criterion4},
      {5, "monotonicity on 25 random parallel instances", 300.0, criterion5},
      {6, "conditions and pairwise strong monotonicity", 60.0, criterion6},
      {7, "Lipschitz bound on every sweep", 60.0, criterion7},
      {8, "finite-difference gradients of the class costs", 10.0, criterion8},
      {9, "seven-link non-parallel exploratory run", 30.0, criterion9},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = c.body(v);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_seconds) {
      ok = false;
      v.detail << " [over time budget " << c.budget_seconds << " s]";
    }
    ok = ok && v.pass;
    failures += ok ? 0 : 1;
    std::printf("%s criterion %d: %s (%.2f s)%s\n", ok ? "PASS" : "FAIL", c.id, c.title.c_str(), secs,
                v.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
