#include "linmba/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return linmba::run_cli(args, std::cout, std::cerr);
}
