#include "fleetpoa/cli.hpp"

#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "fleetpoa/analysis.hpp"
#include "fleetpoa/errors.hpp"
#include "fleetpoa/generate.hpp"
#include "fleetpoa/io.hpp"
#include "fleetpoa/oracle.hpp"

namespace fleetpoa {

using nlohmann::json;

namespace {

const char* const kCommands[] = {"validate", "check",        "solve",          "optimum", "sweep",
                                 "critical-share", "monotonicity", "oracle-compare", "gen"};

class Output {
 public:
  Output(const RunConfig& cfg, std::ostream& fallback) : fallback_(fallback) {
    if (cfg.out) {
      file_.open(*cfg.out, std::ios::binary);
      if (!file_) throw ParseError("cannot open output file " + *cfg.out);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : fallback_; }

 private:
  std::ofstream file_;
  std::ostream& fallback_;
};

void emit(Output& out, const json& doc) { out.stream() << doc.dump(2) << '\n'; }

Network load(const RunConfig& cfg) {
  if (cfg.network_path.empty()) throw ParseError("--network is required for " + cfg.command);
  Network net = parse_network_file(cfg.network_path);
  if (cfg.alpha) net = net.with_fleet_share(*cfg.alpha);
  return net;
}

SweepOptions sweep_options(const RunConfig& cfg) {
  SweepOptions opts;
  opts.tol = cfg.tol;
  opts.max_iters = cfg.max_iters;
  opts.warm_start = !cfg.parallel;
  opts.parallel = cfg.parallel;
  return opts;
}

void require_single_od(const Network& net) {
  if (net.od_pairs.size() != 1) {
    throw AssumptionViolated("this command requires exactly one OD pair");
  }
}

int cmd_validate(const RunConfig& cfg, Output& out) {
  std::ifstream in(cfg.network_path, std::ios::binary);
  if (!in) throw ParseError("cannot open network file " + cfg.network_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const Network net = parse_network_json(buf.str());
  const auto violations = validate_network(net);
  json doc{{"name", net.name}, {"valid", violations.empty()}, {"violations", violations},
           {"links", net.link_count()}, {"od_pairs", net.od_pairs.size()}};
  if (violations.empty()) doc["paths"] = enumerate_paths(net).path_count();
  emit(out, doc);
  return violations.empty() ? kExitOk : kExitIo;
}

int cmd_check(const RunConfig& cfg, Output& out) {
  const Network net = load(cfg);
  const auto report = check_conditions(net, net.total_demand());
  emit(out, to_json(report));
  return report.ok() ? kExitOk : kExitAssumption;
}

int cmd_solve(const RunConfig& cfg, Output& out, std::ostream& err) {
  const Network net = load(cfg);
  const auto inc = enumerate_paths(net);
  SolverOptions so;
  so.tol = cfg.tol;
  so.max_iters = cfg.max_iters;
  if (net.total_demand() > 0.0) {
    so.conditions = check_conditions(net, net.total_demand());
  } else {
    so.allow_unverified = true;
  }
  const auto optimum = solve_system_optimum(net, inc);
  auto describe = [&](const EquilibriumResult& r) {
    const double T = total_delay(net, r.f_star);
    return json{{"equilibrium", to_json(r, net)},
                {"total_delay", round12(T)},
                {"T_min", round12(optimum.T_min)},
                {"poa", round12(price_of_anarchy(T, optimum.T_min))}};
  };
  try {
    emit(out, describe(solve_equilibrium(net, inc, so)));
    return kExitOk;
  } catch (const NotConverged& e) {
    emit(out, describe(e.last()));
    err << "error: " << e.what() << '\n';
    return kExitNotConverged;
  }
}

int cmd_optimum(const RunConfig& cfg, Output& out) {
  const Network net = load(cfg);
  const auto inc = enumerate_paths(net);
  emit(out, to_json(solve_system_optimum(net, inc), net));
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, Output& out, std::ostream& err) {
  const Network net = load(cfg);
  const auto inc = enumerate_paths(net);
  const auto grid = uniform_alpha_grid(cfg.grid);
  const Sweep sweep = sweep_alpha(net, inc, grid, sweep_options(cfg));
  write_sweep_csv(out.stream(), net, sweep);
  std::size_t failed = 0;
  for (const auto& r : sweep.records) failed += r.converged ? 0 : 1;
  if (failed) {
    err << "warning: " << failed << " of " << sweep.records.size() << " sweep points did not converge\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_critical_share(const RunConfig& cfg, Output& out) {
  const Network net = load(cfg);
  require_single_od(net);
  const auto inc = enumerate_paths(net);
  const Sweep sweep = sweep_alpha(net, inc, uniform_alpha_grid(cfg.grid), sweep_options(cfg));
  CriticalShareOptions opts;
  opts.solver = sweep_options(cfg);
  json doc = to_json(detect_critical_share(net, inc, sweep, opts));
  doc["poa_at_zero"] = round12(sweep.records.front().poa);
  emit(out, doc);
  return kExitOk;
}

int cmd_monotonicity(const RunConfig& cfg, Output& out) {
  const Network net = load(cfg);
  require_single_od(net);
  if (!net.is_parallel() && !cfg.exploratory) {
    throw AssumptionViolated(
        "monotonicity checks require a parallel network (every link joins the origin directly to "
        "the destination); pass --exploratory to record observations instead");
  }
  const auto inc = enumerate_paths(net);
  const Sweep sweep = sweep_alpha(net, inc, uniform_alpha_grid(cfg.grid), sweep_options(cfg));
  MonotonicityOptions mopts;
  mopts.slack = 10.0 * cfg.tol;
  mopts.exploratory = cfg.exploratory;
  json doc = to_json(monotonicity_report(sweep, net, mopts));
  doc["lipschitz"] =
      to_json(empirical_lipschitz(sweep.records, sweep.conditions, net.link_count(), sweep.demand));
  emit(out, doc);
  return kExitOk;
}

int cmd_oracle_compare(const RunConfig& cfg, Output& out) {
  const Network net = load(cfg);
  require_single_od(net);
  const auto inc = enumerate_paths(net);
  SolverOptions so;
  so.tol = cfg.tol;
  so.max_iters = cfg.max_iters;
  so.conditions = check_conditions(net, net.total_demand());
  const auto eq = solve_equilibrium(net, inc, so);
  const auto oracle_eq = brute_force_equilibrium(net, inc, net.od_pairs, cfg.oracle_grid);
  const auto opt = solve_system_optimum(net, inc);
  const auto oracle_opt = brute_force_optimum(net, inc, net.total_demand(), kOracleMaxGrid);

  double load_diff = 0.0;
  for (std::size_t l = 0; l < net.link_count(); ++l) {
    load_diff = std::max({load_diff, std::abs(eq.f_star.fS[l] - oracle_eq.f.fS[l]),
                          std::abs(eq.f_star.fC[l] - oracle_eq.f.fC[l])});
  }
  emit(out, json{{"solver_load", to_json(eq.f_star, net)},
                 {"oracle_load", to_json(oracle_eq.f, net)},
                 {"oracle_certificate", round12(oracle_eq.certificate)},
                 {"oracle_grid_step", round12(net.total_demand() / static_cast<double>(cfg.oracle_grid - 1))},
                 {"max_load_difference", round12(load_diff)},
                 {"solver_T_min", round12(opt.T_min)},
                 {"oracle_T_min", round12(oracle_opt.T)},
                 {"T_min_difference", round12(oracle_opt.T - opt.T_min)}});
  return kExitOk;
}

int cmd_gen(const RunConfig& cfg, Output& out) {
  out.stream() << write_network(gen_random_parallel(cfg.seed.value_or(1), cfg.links, cfg.demand));
  return kExitOk;
}

}  // namespace

std::optional<RunConfig> parse_command_line(int argc, const char* const* argv, std::ostream& out,
                                            std::ostream& err, int& exit_code) {
  RunConfig cfg;
  CLI::App app{"Mixed selfish/fleet routing equilibria, system optimum and price of anarchy"};
  app.add_option("command", cfg.command, "Command to run")
      ->required()
      ->check(CLI::IsMember(std::vector<std::string>(std::begin(kCommands), std::end(kCommands))));
  app.add_option("--network", cfg.network_path, "Network description file");
  app.add_option("--alpha", cfg.alpha, "Fleet share overriding the file")->check(CLI::Range(0.0, 1.0));
  app.add_option("--grid", cfg.grid, "Number of fleet-share sweep points")->check(CLI::Range(2, 1000000));
  app.add_option("--tol", cfg.tol, "Solver tolerance")->check(CLI::PositiveNumber);
  app.add_option("--max-iters", cfg.max_iters, "Solver iteration cap")->check(CLI::PositiveNumber);
  app.add_option("--out", cfg.out, "Write results to this file instead of stdout");
  app.add_option("--seed", cfg.seed, "Generator seed (gen, default 1)");
  app.add_option("--links", cfg.links, "Number of links (gen)")->check(CLI::Range(2, 100000));
  app.add_option("--demand", cfg.demand, "Total demand (gen)")->check(CLI::PositiveNumber);
  app.add_option("--oracle-grid", cfg.oracle_grid, "Oracle grid points per dimension (oracle-compare)")
      ->check(CLI::Range(2, static_cast<int>(kOracleMaxGrid)));
  app.add_flag("--exploratory", cfg.exploratory, "Record monotonicity observations on non-parallel networks");
  app.add_flag("--parallel", cfg.parallel, "Cold-start sweep points concurrently");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    exit_code = app.exit(e, out, err);
    if (exit_code != 0) exit_code = kExitIo;
    return std::nullopt;
  }
  return cfg;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.alpha && !(*cfg.alpha >= 0.0 && *cfg.alpha <= 1.0)) {
      throw InvalidArgument("--alpha must lie in [0, 1]");
    }
    if (cfg.grid < 2) throw InvalidArgument("--grid must be at least 2");
    Output output(cfg, out);
    const std::string& c = cfg.command;
    if (c == "validate") return cmd_validate(cfg, output);
    if (c == "check") return cmd_check(cfg, output);
    if (c == "solve") return cmd_solve(cfg, output, err);
    if (c == "optimum") return cmd_optimum(cfg, output);
    if (c == "sweep") return cmd_sweep(cfg, output, err);
    if (c == "critical-share") return cmd_critical_share(cfg, output);
    if (c == "monotonicity") return cmd_monotonicity(cfg, output);
    if (c == "oracle-compare") return cmd_oracle_compare(cfg, output);
    if (c == "gen") return cmd_gen(cfg, output);
    throw InvalidArgument("unknown command " + c);
  } catch (const AssumptionViolated& e) {
    err << "error: " << e.what() << '\n';
    return kExitAssumption;
  } catch (const ConditionsUnverified& e) {
    err << "error: " << e.what() << '\n';
    return kExitAssumption;
  } catch (const NotConverged& e) {
    err << "error: " << e.what() << '\n';
    return kExitNotConverged;
  } catch (const OptimumNotConverged& e) {
    err << "error: " << e.what() << '\n';
    return kExitNotConverged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace fleetpoa
