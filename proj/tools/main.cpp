#include <iostream>
#include <string>
#include <vector>

#include "awgp/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return awgp::cli::run(args, std::cout, std::cerr);
}
