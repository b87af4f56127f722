#include <iostream>
#include <string>
#include <vector>

#include "orbitforge/tools/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return orbitforge::tools::run(args, std::cout, std::cerr);
}
