#include <iostream>

#include "surftest/cli.hpp"

int main(int argc, char** argv) {
  return surftest::cli::run(argc, argv, std::cout, std::cerr);
}
