#include <iostream>
#include <string>
#include <vector>

#include "robust_t/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return robust_t::cli::run_cli(args, std::cout, std::cerr);
}
