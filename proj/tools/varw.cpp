#include <iostream>
#include <string>
#include <vector>

#include "varw/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return varw::run_cli(args, std::cout, std::cerr);
}
