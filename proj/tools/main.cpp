#include <iostream>
#include <string>
#include <vector>

#include "ssimdecomp/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return ssimdecomp::cli::run(args, std::cout, std::cerr);
}
