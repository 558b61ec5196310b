#include <iostream>

#include "fleetpoa/cli.hpp"

int main(int argc, char** argv) {
  int code = 0;
  const auto cfg = fleetpoa::parse_command_line(argc, argv, std::cout, std::cerr, code);
  if (!cfg) return code;
  return fleetpoa::run(*cfg, std::cout, std::cerr);
}
