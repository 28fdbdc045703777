#include <iostream>
#include <string>
#include <vector>

#include "twoheads/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return twoheads::run_cli(args, std::cout, std::cerr);
}
