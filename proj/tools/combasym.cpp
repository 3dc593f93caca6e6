#include <iostream>

#include "combasym/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return combasym::run(args, std::cout, std::cerr);
}
