#include <iostream>

#include "chaosmine/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return chaosmine::run_cli(args, std::cout, std::cerr);
}
