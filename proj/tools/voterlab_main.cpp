#include <iostream>
#include <string>
#include <vector>

#include "voterlab/cli.hpp"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv, argv + argc);
  return voterlab::run_cli(args, std::cout, std::cerr);
}
