#include <iostream>
#include <string>
#include <vector>

#include "equidist/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return equidist::dispatch(args, std::cout, std::cerr);
}
