#include <iostream>
#include <string>
#include <vector>

#include "hyperbmc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hyperbmc::run_cli(args, std::cout, std::cerr);
}
