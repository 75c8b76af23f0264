#include <iostream>

#include "constellation/cli.hpp"

int main(int argc, char** argv) {
  return constellation::cli::run(argc, argv, std::cout, std::cerr);
}
