#include <iostream>
#include <string>
#include <vector>

#include "dba/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return dba::run_cli(args, std::cout, std::cerr);
}
