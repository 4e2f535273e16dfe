#include <iostream>

#include "mmerge/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mmerge::run_cli(args, std::cout, std::cerr);
}
