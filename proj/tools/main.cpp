#include <iostream>

#include "gqads/cli.hpp"

int main(int argc, char** argv) {
  return gqads::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
