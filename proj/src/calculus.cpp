#include "fleetpoa/calculus.hpp"

#include "fleetpoa/errors.hpp"

namespace fleetpoa {

namespace {

void require_non_negative(double x, const char* what) {
  if (!(x >= 0.0)) throw InvalidArgument(std::string(what) + " must be non-negative");
}

void require_links(const Network& net, const LoadProfile& f) {
  if (f.fS.size() != net.link_count() || f.fC.size() != net.link_count()) {
    throw DimensionMismatch("load profile does not match the number of links");
  }
}

}  // namespace

double link_delay(const DelayPoly& delay, double load, int order) {
  require_non_negative(load, "link load");
  switch (order) {
    case 0: return delay.value(load);
    case 1: return delay.first_derivative(load);
    case 2: return delay.second_derivative(load);
    default: throw InvalidArgument("derivative order must be 0, 1 or 2");
  }
}

double marginal_delay(const DelayPoly& delay, double fS, double fC) {
  require_non_negative(fS, "class-S load");
  require_non_negative(fC, "class-C load");
  const double F = fS + fC;
  return delay.value(F) + fC * delay.first_derivative(F);
}

std::vector<double> link_delays(const Network& net, const LoadProfile& f) {
  require_links(net, f);
  std::vector<double> out(net.link_count());
  for (std::size_t l = 0; l < out.size(); ++l) {
    out[l] = link_delay(net.links[l].delay, f.aggregate(l));
  }
  return out;
}

std::vector<double> link_marginal_delays(const Network& net, const LoadProfile& f) {
  require_links(net, f);
  std::vector<double> out(net.link_count());
  for (std::size_t l = 0; l < out.size(); ++l) {
    out[l] = marginal_delay(net.links[l].delay, f.fS[l], f.fC[l]);
  }
  return out;
}

std::vector<double> operator_H(const Network& net, const LoadProfile& f) {
  std::vector<double> h = link_delays(net, f);
  std::vector<double> m = link_marginal_delays(net, f);
  h.insert(h.end(), m.begin(), m.end());
  return h;
}

ClassCosts class_costs(const Network& net, const LoadProfile& f) {
  require_links(net, f);
  ClassCosts out;
  for (std::size_t l = 0; l < net.link_count(); ++l) {
    require_non_negative(f.fS[l], "class-S load");
    require_non_negative(f.fC[l], "class-C load");
    const auto& d = net.links[l].delay;
    // int_0^{fS} d(r + fC) dr = int_{fC}^{fS + fC} d(u) du
    out.selfish += d.integral(f.fC[l], f.fC[l] + f.fS[l]);
    out.fleet += f.fC[l] * d.value(f.aggregate(l));
  }
  return out;
}

double total_delay(const Network& net, const std::vector<double>& aggregate) {
  if (aggregate.size() != net.link_count()) throw DimensionMismatch("aggregate load has wrong size");
  double total = 0.0;
  for (std::size_t l = 0; l < aggregate.size(); ++l) {
    require_non_negative(aggregate[l], "aggregate load");
    total += aggregate[l] * net.links[l].delay.value(aggregate[l]);
  }
  return total;
}

double total_delay(const Network& net, const LoadProfile& f) {
  require_links(net, f);
  return total_delay(net, f.aggregate());
}

}  // namespace fleetpoa
