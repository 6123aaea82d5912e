#include <vector>

#include "rauzylab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return rauzylab::run_command(args);
}
