#include <iostream>

#include "hnn/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hnn::run_command(args, std::cout, std::cerr);
}
