#include <iostream>
#include <string>
#include <vector>

#include "pvq/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pvq::run(args, std::cout, std::cerr);
}
