#include <iostream>
#include <string>
#include <vector>

#include "graphsi/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return graphsi::run_cli(args, std::cout, std::cerr);
}
