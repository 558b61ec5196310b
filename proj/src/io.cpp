#include "fleetpoa/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "fleetpoa/errors.hpp"

namespace fleetpoa {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ParseError(where + ": unknown field \"" + key + "\"");
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing field \"" + key + "\"");
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) throw ParseError(where + ": field \"" + key + "\" must be a string");
  return v.get<std::string>();
}

double require_number(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number()) throw ParseError(where + ": field \"" + key + "\" must be a number");
  return v.get<double>();
}

}  // namespace

Network parse_network_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("syntax error: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("network document must be an object");
  reject_unknown(doc, {"name", "nodes", "links", "od_pairs"}, "network");

  Network net;
  if (doc.contains("name")) net.name = require_string(doc, "name", "network");

  const json& nodes = require(doc, "nodes", "network");
  if (!nodes.is_array()) throw ParseError("network: \"nodes\" must be an array");
  for (const auto& n : nodes) {
    if (!n.is_string()) throw ParseError("network: node ids must be strings");
    net.nodes.push_back(n.get<std::string>());
  }

  const json& links = require(doc, "links", "network");
  if (!links.is_array()) throw ParseError("network: \"links\" must be an array");
  for (std::size_t i = 0; i < links.size(); ++i) {
    const json& l = links[i];
    const std::string where = "link #" + std::to_string(i);
    if (!l.is_object()) throw ParseError(where + ": must be an object");
    reject_unknown(l, {"id", "tail", "head", "delay"}, where);
    Link link;
    link.id = require_string(l, "id", where);
    link.tail = require_string(l, "tail", where);
    link.head = require_string(l, "head", where);
    const json& delay = require(l, "delay", where);
    if (!delay.is_array() || delay.size() != 4) {
      throw ParseError(where + " (" + link.id + "): delay must have 4 coefficients");
    }
    for (std::size_t k = 0; k < 4; ++k) {
      if (!delay[k].is_number()) throw ParseError(where + ": delay coefficients must be numbers");
      link.delay.coeffs[k] = delay[k].get<double>();
    }
    net.links.push_back(std::move(link));
  }

  const json& ods = require(doc, "od_pairs", "network");
  if (!ods.is_array()) throw ParseError("network: \"od_pairs\" must be an array");
  for (std::size_t i = 0; i < ods.size(); ++i) {
    const json& o = ods[i];
    const std::string where = "od pair #" + std::to_string(i);
    if (!o.is_object()) throw ParseError(where + ": must be an object");
    reject_unknown(o, {"origin", "destination", "demand", "fleet_share"}, where);
    OdSpec od;
    od.origin = require_string(o, "origin", where);
    od.destination = require_string(o, "destination", where);
    od.demand = require_number(o, "demand", where);
    if (o.contains("fleet_share")) od.fleet_share = require_number(o, "fleet_share", where);
    net.od_pairs.push_back(std::move(od));
  }
  return net;
}

Network parse_network_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open network file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  Network net = parse_network_json(buf.str());
  auto violations = validate_network(net);
  if (!violations.empty()) {
    std::string msg = "network validation failed:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw ParseError(msg, std::move(violations));
  }
  return net;
}

json network_to_json(const Network& net) {
  json doc;
  doc["name"] = net.name;
  doc["nodes"] = net.nodes;
  doc["links"] = json::array();
  for (const auto& l : net.links) {
    doc["links"].push_back({{"id", l.id},
                            {"tail", l.tail},
                            {"head", l.head},
                            {"delay", json::array({round12(l.delay.coeffs[0]), round12(l.delay.coeffs[1]),
                                                   round12(l.delay.coeffs[2]), round12(l.delay.coeffs[3])})}});
  }
  doc["od_pairs"] = json::array();
  for (const auto& od : net.od_pairs) {
    doc["od_pairs"].push_back({{"origin", od.origin},
                               {"destination", od.destination},
                               {"demand", round12(od.demand)},
                               {"fleet_share", round12(od.fleet_share)}});
  }
  return doc;
}

std::string write_network(const Network& net) { return network_to_json(net).dump(2) + "\n"; }

std::string format_number(double x) {
  if (x == 0.0) x = 0.0;  // drop the sign of -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

double round12(double x) {
  if (!std::isfinite(x)) return x;
  return std::strtod(format_number(x).c_str(), nullptr);
}

namespace {

json numbers(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(round12(x));
  return out;
}

json point(const ConditionPoint& p) {
  return {{"link", p.link_id}, {"fS", round12(p.fS)}, {"fC", round12(p.fC)}, {"margin", round12(p.margin)}};
}

}  // namespace

json to_json(const ConditionsReport& r) {
  return {{"convexity_ok", r.convexity_ok},
          {"strong_mono_ok", r.strong_mono_ok},
          {"strong_mono_grid_ok", r.strong_mono_grid_ok},
          {"c", round12(r.c)},
          {"Q", round12(r.Q)},
          {"box", round12(r.box)},
          {"grid_points", r.grid_points},
          {"worst_convexity", point(r.worst_convexity)},
          {"worst_strong_mono", point(r.worst_strong_mono)},
          {"worst_eigen", point(r.worst_eigen)}};
}

json to_json(const LoadProfile& f, const Network& net) {
  json out = json::object();
  for (std::size_t l = 0; l < net.link_count(); ++l) {
    out[net.links[l].id] = {{"fS", round12(f.fS[l])}, {"fC", round12(f.fC[l])}, {"F", round12(f.aggregate(l))}};
  }
  return out;
}

json to_json(const EquilibriumResult& r, const Network& net) {
  return {{"z_star", {{"zS", numbers(r.z_star.zS)}, {"zC", numbers(r.z_star.zC)}}},
          {"f_star", to_json(r.f_star, net)},
          {"theta", round12(r.theta)},
          {"mu", round12(r.mu)},
          {"theta_by_od", numbers(r.theta_by_od)},
          {"mu_by_od", numbers(r.mu_by_od)},
          {"wardrop_residual", round12(r.wardrop_residual)},
          {"vi_gap", round12(r.vi_gap)},
          {"fixed_point_residual", round12(r.fixed_point_residual)},
          {"step", round12(r.step)},
          {"iterations", r.iterations},
          {"converged", r.converged}};
}

json to_json(const SystemOptimum& r, const Network& net) {
  json loads = json::object();
  for (std::size_t l = 0; l < net.link_count(); ++l) loads[net.links[l].id] = round12(r.F_omega[l]);
  return {{"F_omega", loads},
          {"path_flow", numbers(r.path_flow)},
          {"T_min", round12(r.T_min)},
          {"duality_gap", round12(r.duality_gap)},
          {"iterations", r.iterations},
          {"converged", r.converged}};
}

json to_json(const SupportSets& s) {
  return {{"paths_S", s.paths_S}, {"paths_C", s.paths_C}, {"links_S", s.links_S}, {"links_C", s.links_C}};
}

json to_json(const CriticalShareReport& r) {
  return {{"alpha_tilde", round12(r.alpha_tilde)},
          {"alpha_tilde_grid", round12(r.alpha_tilde_grid)},
          {"alpha_tilde_upper", round12(r.alpha_tilde_upper)},
          {"alpha_inclusion_pointwise", round12(r.alpha_inclusion_pointwise)},
          {"poa_flat_ok", r.poa_flat_ok},
          {"poa_flat_deviation", round12(r.poa_flat_deviation)},
          {"flat_load_deviation", round12(r.flat_load_deviation)},
          {"construction_residual", round12(r.construction_residual)},
          {"construction_load_error", round12(r.construction_load_error)},
          {"flat_alphas", numbers(r.flat_alphas)},
          {"z_at_alpha_tilde", {{"zS", numbers(r.z_at_alpha_tilde.zS)}, {"zC", numbers(r.z_at_alpha_tilde.zC)}}}};
}

json to_json(const MonotoneCheck& c) {
  return {{"ok", c.ok}, {"max_violation", round12(c.max_violation)}, {"alpha", round12(c.alpha)}, {"where", c.where}};
}

json to_json(const MonotonicityReport& r) {
  json bps = json::array();
  for (const auto& [lo, hi] : r.breakpoints) bps.push_back(json::array({round12(lo), round12(hi)}));
  return {{"parallel", r.parallel},
          {"exploratory", r.exploratory},
          {"slack", round12(r.slack)},
          {"poa_nonincreasing", to_json(r.poa_nonincreasing)},
          {"theta_nonincreasing", to_json(r.theta_nonincreasing)},
          {"mu_nondecreasing", to_json(r.mu_nondecreasing)},
          {"fS_link_nonincreasing", to_json(r.fS_link_nonincreasing)},
          {"fC_link_nondecreasing", to_json(r.fC_link_nondecreasing)},
          {"zS_path_nonincreasing", to_json(r.zS_path_nonincreasing)},
          {"zC_path_nondecreasing", to_json(r.zC_path_nondecreasing)},
          {"support_nesting_ok", r.support_nesting_ok},
          {"shared_support_ok", r.shared_support_ok},
          {"breakpoints", bps},
          {"all_ok", r.all_ok()}};
}

json to_json(const LipschitzReport& r) {
  return {{"max_ratio", round12(r.max_ratio)}, {"bound_k", round12(r.bound_k)}, {"ok", r.ok}};
}

void write_sweep_csv(std::ostream& out, const Network& net, const Sweep& sweep) {
  out << "alpha,poa,total_delay,theta,mu,converged";
  for (const auto& l : net.links) {
    out << ",fS_" << l.id << ",fC_" << l.id << ",F_" << l.id << ",d_" << l.id << ",m_" << l.id;
  }
  out << '\n';
  for (const auto& rec : sweep.records) {
    out << format_number(rec.alpha) << ',' << format_number(rec.poa) << ','
        << format_number(rec.total_delay) << ',' << format_number(rec.theta) << ','
        << format_number(rec.mu) << ',' << (rec.converged ? 1 : 0);
    const auto d = link_delays(net, rec.f_star);
    const auto m = link_marginal_delays(net, rec.f_star);
    for (std::size_t l = 0; l < net.link_count(); ++l) {
      out << ',' << format_number(rec.f_star.fS[l]) << ',' << format_number(rec.f_star.fC[l]) << ','
          << format_number(rec.f_star.aggregate(l)) << ',' << format_number(d[l]) << ','
          << format_number(m[l]);
    }
    out << '\n';
  }
}

}  // namespace fleetpoa
