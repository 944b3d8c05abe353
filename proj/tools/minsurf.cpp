#include <iostream>
#include <string>
#include <vector>

#include "minsurf/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return minsurf::run_cli(args, std::cout, std::cerr);
}
