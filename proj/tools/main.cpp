#include <vector>

#include "reyeweb/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return reyeweb::cli_main(args);
}
