#include <iostream>
#include <string>
#include <vector>

#include "cosmo/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return cosmo::run_cli(args, std::cout, std::cerr);
}
