#include <iostream>
#include <string>
#include <vector>

#include "bshq_cli/cli.hpp"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return bshq::cli::run(args, std::cout, std::cerr);
}
