#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "fleetpoa/analysis.hpp"
#include "fleetpoa/calculus.hpp"
#include "fleetpoa/equilibrium.hpp"
#include "fleetpoa/network.hpp"
#include "fleetpoa/oracle.hpp"
#include "fleetpoa/sysopt.hpp"

namespace fleetpoa {

/// Strictly parses a network description; unknown fields are rejected.
/// Does not validate; see parse_network_file for the validating entry point.
Network parse_network_json(std::string_view text);

/// Reads, parses and validates a network file. Throws ParseError on any failure.
Network parse_network_file(const std::filesystem::path& path);

nlohmann::json network_to_json(const Network& net);
/// Pretty-printed network document, terminated by a newline.
std::string write_network(const Network& net);

/// Rounds to 12 significant digits so the JSON writer prints at most that many.
double round12(double x);
/// "%.12g" formatting used by every text output.
std::string format_number(double x);

nlohmann::json to_json(const ConditionsReport& r);
nlohmann::json to_json(const LoadProfile& f, const Network& net);
nlohmann::json to_json(const EquilibriumResult& r, const Network& net);
nlohmann::json to_json(const SystemOptimum& r, const Network& net);
nlohmann::json to_json(const SupportSets& s);
nlohmann::json to_json(const CriticalShareReport& r);
nlohmann::json to_json(const MonotoneCheck& c);
nlohmann::json to_json(const MonotonicityReport& r);
nlohmann::json to_json(const LipschitzReport& r);

/// Sweep table: alpha,poa,total_delay,theta,mu,converged then
/// fS_<id>,fC_<id>,F_<id>,d_<id>,m_<id> for each link in file order.
void write_sweep_csv(std::ostream& out, const Network& net, const Sweep& sweep);

}  // namespace fleetpoa
