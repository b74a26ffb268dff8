#include <iostream>
#include <string>
#include <vector>

#include "semprobe/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return semprobe::cli::run(args, std::cout, std::cerr);
}
