#include <iostream>

#include "sld/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return sld::cli::run(args, std::cout, std::cerr);
}
