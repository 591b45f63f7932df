#include <iostream>
#include <string>
#include <vector>

#include "pgr/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return pgr::run_cli(args, std::cout, std::cerr);
}
