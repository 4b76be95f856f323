#include <iostream>
#include <string>
#include <vector>

#include "wxaug_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return wxaug::cli::run(args, std::cout, std::cerr);
}
